#pragma once

#include "circuit.hpp"
#include "encoder.hpp"
#include "error.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace plbmc
{

/// `c <name> <var> <instant>` annotation, so external tools can map solver
/// variables back to atoms.
struct cnf_comment
{
    std::string name;
    int var = 0;
    int instant = 0;

    friend bool operator==( const cnf_comment&, const cnf_comment& ) = default;
};

struct cnf_instance
{
    int num_vars = 0;
    std::vector< std::vector< int > > clauses;
    std::vector< cnf_comment > comments;

    friend bool operator==( const cnf_instance&, const cnf_instance& ) = default;
};

enum class verdict
{
    sat,
    unsat,
};

/// Model is indexed by variable (entry 0 unused).
struct sat_result
{
    verdict answer = verdict::unsat;
    std::optional< std::vector< bool > > model;

    [[nodiscard]] bool is_sat() const { return answer == verdict::sat; }
    [[nodiscard]] bool value( int var ) const { return ( *model )[ static_cast< std::size_t >( var ) ]; }
};

/// Removes duplicate literals; returns false for a tautology.
inline bool normalize_clause( std::vector< int >& clause )
{
    std::sort( clause.begin(), clause.end(), []( int a, int b ) {
        return std::abs( a ) != std::abs( b ) ? std::abs( a ) < std::abs( b ) : a < b;
    } );
    clause.erase( std::unique( clause.begin(), clause.end() ), clause.end() );
    for ( std::size_t i = 0; i + 1 < clause.size(); ++i )
        if ( clause[ i ] == -clause[ i + 1 ] )
            return false;
    return true;
}

/// Structural (Tseitin) conversion of a circuit: one definition variable per
/// AND gate reachable from `root`, numbered after `first_free - 1`, plus a
/// unit clause asserting the root.
inline cnf_instance circuit_to_cnf( const circuit& circ, circuit::ref root, int num_original_vars )
{
    cnf_instance inst;
    inst.num_vars = num_original_vars;
    if ( root == circuit::true_ref )
        return inst;
    if ( root == circuit::false_ref )
    {
        inst.clauses.emplace_back();
        return inst;
    }

    std::vector< int > gate_var( circ.size(), 0 );
    const auto lit = [ & ]( circuit::ref r ) {
        const auto& n = circ.at( r );
        const int v = n.k == circuit::kind::var ? n.var : gate_var[ circuit::index( r ) ];
        return circuit::is_negated( r ) ? -v : v;
    };

    // Post-order over reachable gates.
    std::vector< std::uint32_t > stack{ circuit::index( root ) };
    std::vector< std::uint8_t > state( circ.size(), 0 );
    while ( !stack.empty() )
    {
        const auto id = stack.back();
        const auto& n = circ.nodes()[ id ];
        if ( n.k != circuit::kind::gate || state[ id ] == 2 )
        {
            stack.pop_back();
            continue;
        }
        if ( state[ id ] == 0 )
        {
            state[ id ] = 1;
            for ( auto kid : n.kids )
                if ( state[ circuit::index( kid ) ] == 0 )
                    stack.push_back( circuit::index( kid ) );
            continue;
        }
        stack.pop_back();
        state[ id ] = 2;
        const int g = ++inst.num_vars;
        gate_var[ id ] = g;
        std::vector< int > big{ g };
        for ( auto kid : n.kids )
        {
            inst.clauses.push_back( { -g, lit( kid ) } );
            big.push_back( -lit( kid ) );
        }
        inst.clauses.push_back( std::move( big ) );
    }
    inst.clauses.push_back( { lit( root ) } );

    std::vector< std::vector< int > > kept;
    kept.reserve( inst.clauses.size() );
    for ( auto& c : inst.clauses )
        if ( normalize_clause( c ) )
            kept.push_back( std::move( c ) );
    inst.clauses = std::move( kept );
    return inst;
}

/// CNF for an encoded problem. Variables 1..numvar keep their var_map meaning;
/// atom and selector variables are annotated.
inline cnf_instance to_cnf( const encoded_problem& p )
{
    auto inst = circuit_to_cnf( p.circ, p.root, p.vm.numvar() );
    for ( int a : p.vm.props() )
        for ( int t = 0; t <= p.vm.k(); ++t )
            inst.comments.push_back( { p.vm.node( a ).f.atom_key(), p.vm.var_of( a, 0, t ), t } );
    for ( std::size_t i = 0; i < p.vm.loop_selectors().size(); ++i )
        inst.comments.push_back( { "**LOOP**", p.vm.loop_selectors()[ i ], static_cast< int >( i ) + 1 } );
    for ( std::size_t i = 0; i < p.vm.past_selectors().size(); ++i )
        inst.comments.push_back( { "**POOL**", p.vm.past_selectors()[ i ], static_cast< int >( i ) } );
    return inst;
}

/// DIMACS: `p cnf V C`, then comment lines, then 0-terminated clauses.
inline void emit_dimacs( const cnf_instance& inst, std::ostream& out )
{
    out << "p cnf " << inst.num_vars << ' ' << inst.clauses.size() << '\n';
    for ( const auto& c : inst.comments )
        out << "c " << c.name << ' ' << c.var << ' ' << c.instant << '\n';
    for ( const auto& clause : inst.clauses )
    {
        for ( int l : clause )
            out << l << ' ';
        out << "0\n";
    }
    if ( !out )
        throw error( "failed to write DIMACS output" );
}

inline std::string to_dimacs( const cnf_instance& inst )
{
    std::ostringstream s;
    emit_dimacs( inst, s );
    return s.str();
}

inline cnf_instance parse_dimacs( std::istream& in )
{
    cnf_instance inst;
    std::string line;
    bool header = false;
    std::size_t expected = 0;
    std::vector< int > current;
    int lineno = 0;
    while ( std::getline( in, line ) )
    {
        ++lineno;
        std::istringstream ls( line );
        std::string first;
        if ( !( ls >> first ) )
            continue;
        if ( first == "c" )
        {
            cnf_comment c;
            if ( ls >> c.name >> c.var >> c.instant )
                inst.comments.push_back( c );
            continue;
        }
        if ( first == "p" )
        {
            std::string fmt;
            long long v = 0, n = 0;
            if ( header || !( ls >> fmt >> v >> n ) || fmt != "cnf" || v < 0 || n < 0 )
                throw error( "DIMACS line " + std::to_string( lineno ) + ": malformed header" );
            header = true;
            inst.num_vars = static_cast< int >( v );
            expected = static_cast< std::size_t >( n );
            continue;
        }
        if ( !header )
            throw error( "DIMACS line " + std::to_string( lineno ) + ": clause before header" );
        std::istringstream cs( line );
        long long l = 0;
        while ( cs >> l )
        {
            if ( l == 0 )
            {
                inst.clauses.push_back( std::move( current ) );
                current.clear();
                continue;
            }
            if ( std::llabs( l ) > inst.num_vars )
                throw error( "DIMACS line " + std::to_string( lineno ) + ": literal " + std::to_string( l ) + " exceeds variable count" );
            current.push_back( static_cast< int >( l ) );
        }
        if ( !cs.eof() )
            throw error( "DIMACS line " + std::to_string( lineno ) + ": not an integer" );
    }
    if ( !header )
        throw error( "DIMACS input has no header" );
    if ( !current.empty() )
        throw error( "DIMACS input ends inside a clause" );
    if ( inst.clauses.size() != expected )
        throw error( "DIMACS header announces " + std::to_string( expected ) + " clauses, found " + std::to_string( inst.clauses.size() ) );
    return inst;
}

inline cnf_instance parse_dimacs( const std::string& text )
{
    std::istringstream s( text );
    return parse_dimacs( s );
}

/// True iff `model` satisfies every clause of `inst`.
inline bool verify_model( const cnf_instance& inst, const std::vector< bool >& model )
{
    if ( model.size() < static_cast< std::size_t >( inst.num_vars ) + 1 )
        return false;
    for ( const auto& clause : inst.clauses )
    {
        bool ok = false;
        for ( int l : clause )
            if ( model[ static_cast< std::size_t >( std::abs( l ) ) ] == ( l > 0 ) )
            {
                ok = true;
                break;
            }
        if ( !ok )
            return false;
    }
    return true;
}

} // namespace plbmc
