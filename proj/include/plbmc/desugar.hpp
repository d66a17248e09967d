#pragma once

#include "error.hpp"
#include "formula.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace plbmc
{

/// Collects non-fatal diagnostics (e.g. quantifier shadowing).
using diagnostics = std::vector< std::string >;

namespace detail
{

inline term subst_term( const term& t, const std::string& var, const term& value )
{
    return t.is_symbol() && t.as_symbol() == var ? value : t;
}

inline condition subst_condition( const condition& c, const std::string& var, const term& value )
{
    condition out = c;
    for ( auto& t : out.terms )
        t = subst_term( t, var, value );
    for ( auto& k : out.kids )
        k = subst_condition( k, var, value );
    return out;
}

inline domain_expr subst_domain( const domain_expr& d, const std::string& var, const term& value )
{
    domain_expr out = d;
    for ( auto& v : out.values )
        v = subst_term( v, var, value );
    if ( out.range )
        out.range = std::make_pair( subst_term( out.range->first, var, value ),
                                    subst_term( out.range->second, var, value ) );
    return out;
}

inline std::string cond_term_error( const term& t )
{
    return "'" + t.str() + "' is not an integer (unbound quantifier variable?)";
}

} // namespace detail

/// Replaces free occurrences of `var` by `value`. An inner quantifier or case
/// binding the same name shadows it; that is permitted but reported.
inline formula substitute( const formula& f, const std::string& var, const term& value, diagnostics* diags = nullptr )
{
    using namespace detail;
    detail::formula_node n = *f.node();
    bool changed = false;
    const auto set = [ &changed ]( auto& slot, auto v ) {
        if ( !( slot == v ) )
        {
            slot = std::move( v );
            changed = true;
        }
    };

    for ( auto& a : n.args )
        set( a, subst_term( a, var, value ) );
    if ( n.cond )
        set( *n.cond, subst_condition( *n.cond, var, value ) );

    bool shadowed = false;
    if ( f.kind() == op::forall || f.kind() == op::exists )
    {
        set( n.domain, subst_domain( n.domain, var, value ) );
        shadowed = n.name == var;
        if ( shadowed && n.cond )
            n.cond = f.cond(); // the filter sees the inner binding
    }
    if ( f.kind() == op::and_case || f.kind() == op::or_case )
    {
        for ( auto& [ v, d ] : n.bindings )
        {
            if ( shadowed )
                break; // later domains see the inner binding
            set( d, subst_domain( d, var, value ) );
            shadowed = v == var;
        }
    }
    if ( shadowed )
    {
        const std::string msg = f.loc().str() + ": warning: quantifier variable " + var + " shadows an outer binding";
        // reported once, not once per outer instance
        if ( diags && std::find( diags->begin(), diags->end(), msg ) == diags->end() )
            diags->push_back( msg );
    }
    else
    {
        for ( auto& k : n.kids )
        {
            auto s = substitute( k, var, value, diags );
            if ( !( s.node() == k.node() ) )
            {
                k = std::move( s );
                changed = true;
            }
        }
    }
    return changed ? formula::finish( std::move( n ) ) : f;
}

/// Evaluates a ground expansion-time condition.
inline bool eval_condition( const condition& c )
{
    switch ( c.k )
    {
    case condition::kind::eql:
        return c.terms[ 0 ] == c.terms[ 1 ];
    case condition::kind::lt:
    case condition::kind::le:
        for ( const auto& t : c.terms )
            if ( !t.is_int() )
                throw spec_error( detail::cond_term_error( t ), c.loc );
        return c.k == condition::kind::lt ? c.terms[ 0 ].as_int() < c.terms[ 1 ].as_int()
                                          : c.terms[ 0 ].as_int() <= c.terms[ 1 ].as_int();
    case condition::kind::not_:
        return !eval_condition( c.kids[ 0 ] );
    case condition::kind::and_:
        for ( const auto& k : c.kids )
            if ( !eval_condition( k ) )
                return false;
        return true;
    case condition::kind::or_:
        for ( const auto& k : c.kids )
            if ( eval_condition( k ) )
                return true;
        return false;
    }
    return false;
}

/// Literal values of a domain; range bounds must be integers by now.
inline std::vector< term > domain_values( const domain_expr& d, source_loc loc = {} )
{
    if ( !d.range )
        return d.values;
    const auto& [ lo, hi ] = *d.range;
    for ( const auto* b : { &lo, &hi } )
        if ( !b->is_int() )
            throw spec_error( "range bound '" + b->str() + "' is not an integer (unbound quantifier variable?)", loc );
    std::vector< term > out;
    for ( auto v = lo.as_int(); v <= hi.as_int(); ++v )
        out.emplace_back( v );
    return out;
}

/// One level of finite-domain expansion: -A- becomes a conjunction and -E- a
/// disjunction of body instances, filtered by the optional condition.
inline formula expand_quantifier( const formula& q, diagnostics* diags = nullptr )
{
    if ( q.kind() != op::forall && q.kind() != op::exists )
        throw spec_error( "expand_quantifier expects -A- or -E-", q.loc() );
    const auto values = domain_values( q.domain(), q.loc() );
    if ( values.empty() )
        throw spec_error( "empty quantifier domain for variable " + q.name(), q.loc() );
    std::vector< formula > instances;
    for ( const auto& v : values )
    {
        if ( q.cond() && !eval_condition( detail::subst_condition( *q.cond(), q.name(), v ) ) )
            continue;
        instances.push_back( substitute( q.kid( 0 ), q.name(), v, diags ) );
    }
    return q.kind() == op::forall ? land( std::move( instances ) ) : lor( std::move( instances ) );
}

/// and-case / or-case to nested quantifiers over its bindings.
///
/// and-case: forall bindings, (&& (-> g_i b_i)... (-> (&& (!! g_i)...) else))
/// or-case:  exists bindings, (|| (&& g_i b_i)... (&& (!! g_i)... else))
inline formula expand_case( const formula& c )
{
    if ( c.kind() != op::and_case && c.kind() != op::or_case )
        throw spec_error( "expand_case expects and-case or or-case", c.loc() );
    const bool is_and = c.kind() == op::and_case;
    const std::size_t n = c.kids().size() - ( c.has_else() ? 1 : 0 );

    std::vector< formula > parts;
    std::vector< formula > negated_guards;
    for ( std::size_t i = 0; i + 1 < n; i += 2 )
    {
        const auto& guard = c.kid( i );
        const auto& body = c.kid( i + 1 );
        parts.push_back( is_and ? implies( guard, body ) : land( { guard, body } ) );
        negated_guards.push_back( lnot( guard ) );
    }
    if ( c.has_else() )
    {
        const auto& else_body = c.kids().back();
        if ( is_and )
        {
            if ( negated_guards.empty() )
                parts.push_back( else_body );
            else
                parts.push_back( implies( negated_guards.size() == 1 ? negated_guards[ 0 ] : land( negated_guards ), else_body ) );
        }
        else
        {
            negated_guards.push_back( else_body );
            parts.push_back( negated_guards.size() == 1 ? negated_guards[ 0 ] : land( negated_guards ) );
        }
    }

    formula body = parts.size() == 1 ? parts[ 0 ] : ( is_and ? land( parts ) : lor( parts ) );
    const auto& b = c.bindings();
    for ( auto it = b.rbegin(); it != b.rend(); ++it )
        body = quantifier( is_and ? op::forall : op::exists, it->first, it->second, body, std::nullopt, c.loc() );
    return body;
}

namespace detail
{

inline formula conj_of( std::vector< formula > fs )
{
    if ( fs.empty() )
        return tt();
    if ( fs.size() == 1 )
        return fs[ 0 ];
    return land( std::move( fs ) );
}

inline formula disj_of( std::vector< formula > fs )
{
    if ( fs.empty() )
        return ff();
    if ( fs.size() == 1 )
        return fs[ 0 ];
    return lor( std::move( fs ) );
}

inline formula chain( op kind, formula f, std::int64_t n )
{
    for ( std::int64_t i = 0; i < n; ++i )
        f = formula::make( kind, { f } );
    return f;
}

inline formula xs( formula f, std::int64_t n ) { return chain( op::next, std::move( f ), n ); }
inline formula ys( formula f, std::int64_t n ) { return chain( op::yesterday, std::move( f ), n ); }
inline formula zs( formula f, std::int64_t n ) { return chain( op::zeta, std::move( f ), n ); }

inline std::int64_t literal_offset( const formula& f, std::size_t i )
{
    const auto& t = f.args().at( i );
    if ( !t.is_int() )
        throw spec_error( "offset '" + t.str() + "' is not a literal integer (unbound quantifier variable?)", f.loc() );
    return t.as_int();
}

// Offsets [lo, hi] covered by an _xy variant of width t; the default is _ee.
inline std::pair< std::int64_t, std::int64_t > variant_range( variant v, std::int64_t t )
{
    const bool near_incl = v == variant::ie || v == variant::ii;
    const bool far_incl = v == variant::ei || v == variant::ii;
    return { near_incl ? 0 : 1, far_incl ? t : t - 1 };
}

inline bool near_inclusive( variant v ) { return v == variant::ie || v == variant::ii; }
inline bool far_inclusive( variant v ) { return v == variant::ei || v == variant::ii; }

} // namespace detail

/// Expands every sugar node into the core PLTL fragment.
inline formula desugar( const formula& f, diagnostics* diags = nullptr )
{
    using namespace detail;
    const auto d = [ diags ]( const formula& g ) { return desugar( g, diags ); };

    switch ( f.kind() )
    {
    case op::atom:
    case op::tt:
    case op::ff:
        return f;
    case op::cond:
        return eval_condition( *f.cond() ) ? tt() : ff();
    case op::forall:
    case op::exists:
        return d( expand_quantifier( f, diags ) );
    case op::and_case:
    case op::or_case:
        return d( expand_case( f ) );
    default:
        break;
    }

    if ( is_core( f.kind() ) )
    {
        std::vector< formula > kids;
        bool changed = false;
        for ( const auto& k : f.kids() )
        {
            kids.push_back( d( k ) );
            changed = changed || kids.back().node() != k.node();
        }
        return changed ? f.with_kids( std::move( kids ) ) : f;
    }

    const auto positive = [ & ]( std::int64_t t ) {
        if ( t <= 0 )
            throw spec_error( detail::op_name( f.kind() ) + " requires an offset > 0, got " + std::to_string( t ), f.loc() );
    };

    switch ( f.kind() )
    {
    case op::futr:
    case op::past:
    {
        const auto t = literal_offset( f, 0 );
        if ( t < 0 )
            throw spec_error( detail::op_name( f.kind() ) + " requires an offset >= 0, got " + std::to_string( t ), f.loc() );
        return f.kind() == op::futr ? xs( d( f.kid( 0 ) ), t ) : ys( d( f.kid( 0 ) ), t );
    }
    case op::dist:
    {
        const auto t = literal_offset( f, 0 );
        return t >= 0 ? xs( d( f.kid( 0 ) ), t ) : ys( d( f.kid( 0 ) ), -t );
    }
    case op::lasts:
    case op::lasted:
    case op::withinf:
    case op::withinp:
    {
        const auto t = literal_offset( f, 0 );
        positive( t );
        const auto a = d( f.kid( 0 ) );
        const auto [ lo, hi ] = variant_range( f.var(), t );
        std::vector< formula > terms;
        for ( auto k = lo; k <= hi; ++k )
        {
            switch ( f.kind() )
            {
            case op::lasts:
            case op::withinf: terms.push_back( xs( a, k ) ); break;
            case op::lasted: terms.push_back( zs( a, k ) ); break;
            default: terms.push_back( ys( a, k ) ); break;
            }
        }
        return f.kind() == op::lasts || f.kind() == op::lasted ? conj_of( std::move( terms ) ) : disj_of( std::move( terms ) );
    }
    case op::nexttime:
    case op::lasttime:
    {
        const auto t = literal_offset( f, 0 );
        positive( t );
        const auto a = d( f.kid( 0 ) );
        const bool fut = f.kind() == op::nexttime;
        std::vector< formula > terms{ fut ? xs( a, t ) : ys( a, t ) };
        for ( auto k = near_inclusive( f.var() ) ? 0 : 1; k < t; ++k )
            terms.push_back( fut ? xs( lnot( a ), k ) : zs( lnot( a ), k ) );
        return conj_of( std::move( terms ) );
    }
    case op::somf:
    {
        auto u = until( tt(), d( f.kid( 0 ) ) );
        return f.var() == variant::i ? u : next( u );
    }
    case op::alwf:
    {
        auto r = release( ff(), d( f.kid( 0 ) ) );
        return f.var() == variant::i ? r : next( r );
    }
    case op::somp:
    {
        auto s = since( tt(), d( f.kid( 0 ) ) );
        return f.var() == variant::i ? s : yesterday( s );
    }
    case op::alwp:
    {
        auto t = trigger( ff(), d( f.kid( 0 ) ) );
        return f.var() == variant::i ? t : zeta( t );
    }
    case op::som:
    {
        const auto a = d( f.kid( 0 ) );
        return lor( { yesterday( since( tt(), a ) ), a, next( until( tt(), a ) ) } );
    }
    case op::alw:
    {
        const auto a = d( f.kid( 0 ) );
        return land( { zeta( trigger( ff(), a ) ), a, next( release( ff(), a ) ) } );
    }
    case op::until_v:
    case op::since_v:
    {
        const auto a = d( f.kid( 0 ) );
        const auto b = d( f.kid( 1 ) );
        const bool fut = f.kind() == op::until_v;
        const auto target = far_inclusive( f.var() ) ? land( { a, b } ) : b;
        auto core = fut ? until( a, target ) : since( a, target );
        if ( near_inclusive( f.var() ) )
            return core;
        return fut ? next( core ) : yesterday( core );
    }
    case op::bounded_until:
    case op::bounded_since:
    {
        const bool fut = f.kind() == op::bounded_until;
        const auto a = d( f.kid( 0 ) );
        const auto b = d( f.kid( 1 ) );
        const auto shift = [ fut ]( const formula& g, std::int64_t n ) { return fut ? xs( g, n ) : ys( g, n ); };
        const std::int64_t first = near_inclusive( f.var() ) ? 0 : 1;
        const std::int64_t excl = far_inclusive( f.var() ) ? 0 : 1;
        const auto lo = literal_offset( f, 0 );
        if ( lo < 0 )
            throw spec_error( "bounded operator requires a lower bound >= 0", f.loc() );

        if ( f.args().size() == 2 )
        {
            const auto hi = literal_offset( f, 1 );
            if ( hi < lo )
                throw spec_error( "bounded operator has an empty interval [" + std::to_string( lo ) + ", " +
                                      std::to_string( hi ) + "]",
                                  f.loc() );
            std::vector< formula > witnesses;
            for ( auto w = std::max( lo, first ); w <= hi; ++w )
            {
                std::vector< formula > conj{ shift( b, w ) };
                for ( auto k = first; k <= w - excl; ++k )
                    conj.push_back( shift( a, k ) );
                witnesses.push_back( conj_of( std::move( conj ) ) );
            }
            return disj_of( std::move( witnesses ) );
        }

        const auto target = excl ? b : land( { a, b } );
        auto unbounded_core = fut ? until( a, target ) : since( a, target );
        if ( lo <= first )
            return first == 0 ? unbounded_core : shift( unbounded_core, 1 );
        std::vector< formula > conj;
        for ( auto k = first; k < lo; ++k )
            conj.push_back( shift( a, k ) );
        conj.push_back( shift( unbounded_core, lo ) );
        return conj_of( std::move( conj ) );
    }
    default:
        break;
    }
    throw spec_error( "cannot desugar operator " + detail::op_name( f.kind() ), f.loc() );
}

/// True when `f` contains only core operators.
inline bool is_core_formula( const formula& f )
{
    if ( !is_core( f.kind() ) )
        return false;
    for ( const auto& k : f.kids() )
        if ( !is_core_formula( k ) )
            return false;
    return true;
}

} // namespace plbmc
