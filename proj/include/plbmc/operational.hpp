#pragma once

#include "error.hpp"
#include "formula.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace plbmc
{

/// A finite-domain state variable (`define-item`).
struct item_decl
{
    std::string name;
    std::vector< term > domain;
    source_loc loc;

    [[nodiscard]] bool contains( const term& v ) const
    {
        return std::find( domain.begin(), domain.end(), v ) != domain.end();
    }
};

/// A one-dimensional array of finite-domain cells (`define-array`).
struct array_decl
{
    std::string name;
    std::vector< term > index_domain;
    std::vector< term > value_domain;
    source_loc loc;
};

/// Everything a spec declares. Scoped to one document; nothing is global.
struct declarations
{
    std::vector< item_decl > items;
    std::vector< array_decl > arrays;
    std::vector< formula > atoms; // from `(declare ...)`

    [[nodiscard]] const item_decl* find_item( const std::string& name ) const
    {
        for ( const auto& d : items )
            if ( d.name == name )
                return &d;
        return nullptr;
    }

    [[nodiscard]] const array_decl* find_array( const std::string& name ) const
    {
        for ( const auto& d : arrays )
            if ( d.name == name )
                return &d;
        return nullptr;
    }
};

/// `(name= value)` lowered to its dedicated one-hot atom.
inline formula lower_item_atom( const item_decl& decl, const term& value, source_loc loc = {} )
{
    if ( !decl.contains( value ) )
        throw spec_error( "value " + value.str() + " outside the domain of item " + decl.name, loc );
    return item_atom( decl.name, value );
}

inline formula lower_array_atom( const array_decl& decl, const term& index, const term& value,
                                 source_loc loc = {} )
{
    const auto in = []( const std::vector< term >& dom, const term& v ) {
        return std::find( dom.begin(), dom.end(), v ) != dom.end();
    };
    if ( !in( decl.index_domain, index ) )
        throw spec_error( "index " + index.str() + " outside the index domain of array " + decl.name, loc );
    if ( !in( decl.value_domain, value ) )
        throw spec_error( "value " + value.str() + " outside the domain of array " + decl.name, loc );
    return array_atom( decl.name, index, value );
}

/// Validates every item/array atom of a quantifier-free formula against the
/// declarations. The atoms already have their lowered identity, so this only
/// rejects out-of-domain values and unknown names.
inline void check_atoms( const formula& f, const declarations& decls )
{
    if ( f.kind() == op::atom )
    {
        if ( f.akind() == atom_kind::item )
        {
            const auto* d = decls.find_item( f.name() );
            if ( !d )
                throw spec_error( "undeclared item " + f.name(), f.loc() );
            lower_item_atom( *d, f.args().at( 0 ), f.loc() );
        }
        else if ( f.akind() == atom_kind::array )
        {
            const auto* d = decls.find_array( f.name() );
            if ( !d )
                throw spec_error( "undeclared array " + f.name(), f.loc() );
            lower_array_atom( *d, f.args().at( 0 ), f.args().at( 1 ), f.loc() );
        }
        return;
    }
    for ( const auto& k : f.kids() )
        check_atoms( k, decls );
}

namespace detail
{

inline void exactly_one( std::vector< formula > atoms, std::vector< formula >& out )
{
    out.push_back( lor( atoms ) );
    for ( std::size_t i = 0; i < atoms.size(); ++i )
        for ( std::size_t j = i + 1; j < atoms.size(); ++j )
            out.push_back( lnot( land( { atoms[ i ], atoms[ j ] } ) ) );
}

} // namespace detail

/// One exactly-one group per item and per array cell, to be asserted at
/// every instant.
inline std::vector< formula > domain_constraints( const declarations& decls )
{
    std::vector< formula > out;
    for ( const auto& item : decls.items )
    {
        std::vector< formula > atoms;
        for ( const auto& v : item.domain )
            atoms.push_back( item_atom( item.name, v ) );
        detail::exactly_one( std::move( atoms ), out );
    }
    for ( const auto& arr : decls.arrays )
        for ( const auto& idx : arr.index_domain )
        {
            std::vector< formula > atoms;
            for ( const auto& v : arr.value_domain )
                atoms.push_back( array_atom( arr.name, idx, v ) );
            detail::exactly_one( std::move( atoms ), out );
        }
    return out;
}

} // namespace plbmc
