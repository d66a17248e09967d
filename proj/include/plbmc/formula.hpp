#pragma once

#include "error.hpp"
#include "sexpr.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace plbmc
{

/// A term is an integer or a (upper-case) symbol. Bare symbols double as
/// quantifier variables until substitution replaces them.
class term
{
public:
    term() = default;
    term( std::int64_t v ) : _v( v ) {}
    term( int v ) : _v( std::int64_t{ v } ) {}
    term( std::string s ) : _v( std::move( s ) ) {}
    term( const char* s ) : _v( std::string( s ) ) {}

    [[nodiscard]] bool is_int() const { return std::holds_alternative< std::int64_t >( _v ); }
    [[nodiscard]] bool is_symbol() const { return !is_int(); }
    [[nodiscard]] std::int64_t as_int() const { return std::get< std::int64_t >( _v ); }
    [[nodiscard]] const std::string& as_symbol() const { return std::get< std::string >( _v ); }

    [[nodiscard]] std::string str() const
    {
        return is_int() ? std::to_string( as_int() ) : as_symbol();
    }

    [[nodiscard]] sexpr to_sexpr() const
    {
        return is_int() ? sexpr::integer( as_int() ) : sexpr::symbol( as_symbol() );
    }

    static term from_sexpr( const sexpr& s )
    {
        assert( s.is_atom() );
        return s.is_integer() ? term( s.value() ) : term( s.text() );
    }

    friend bool operator==( const term&, const term& ) = default;
    friend auto operator<=>( const term&, const term& ) = default;

    [[nodiscard]] std::size_t hash() const
    {
        return is_int() ? std::hash< std::int64_t >{}( as_int() )
                        : std::hash< std::string >{}( as_symbol() ) * 31 + 7;
    }

private:
    std::variant< std::int64_t, std::string > _v{ std::int64_t{ 0 } };
};

enum class op : std::uint8_t
{
    // core fragment
    atom,
    tt,
    ff,
    not_,
    and_,
    or_,
    implies,
    iff,
    next,
    yesterday,
    zeta,
    until,
    since,
    release,
    trigger,

    // sugar, removed by desugar()
    cond,
    futr,
    past,
    dist,
    lasts,
    lasted,
    withinf,
    withinp,
    nexttime,
    lasttime,
    somf,
    somp,
    alwf,
    alwp,
    som,
    alw,
    until_v,
    since_v,
    bounded_until,
    bounded_since,
    forall,
    exists,
    and_case,
    or_case,
};

/// Endpoint variant of a metric operator. The first letter governs the near
/// endpoint (now), the second the far one (now +/- t).
enum class variant : std::uint8_t
{
    none,
    ee,
    ei,
    ie,
    ii,
    e,
    i,
};

enum class atom_kind : std::uint8_t
{
    prop,
    item,
    array,
};

[[nodiscard]] inline bool is_core( op o ) { return o <= op::trigger; }

[[nodiscard]] inline std::string_view variant_suffix( variant v )
{
    switch ( v )
    {
    case variant::none: return "";
    case variant::ee: return "_EE";
    case variant::ei: return "_EI";
    case variant::ie: return "_IE";
    case variant::ii: return "_II";
    case variant::e: return "_E";
    case variant::i: return "_I";
    }
    return "";
}

/// Expansion-time condition over terms: the `eql`/`equal`/`<`/`<=`/`not`/
/// `and`/`or` subset.
struct condition
{
    enum class kind : std::uint8_t
    {
        eql,
        lt,
        le,
        not_,
        and_,
        or_,
    };

    kind k = kind::eql;
    std::vector< term > terms;
    std::vector< condition > kids;
    source_loc loc;

    friend bool operator==( const condition& a, const condition& b )
    {
        return a.k == b.k && a.terms == b.terms && a.kids == b.kids;
    }
};

/// Quantifier domain: a literal list, or `(range lo hi)` whose bounds may
/// still be variables.
struct domain_expr
{
    std::vector< term > values;
    std::optional< std::pair< term, term > > range;

    friend bool operator==( const domain_expr&, const domain_expr& ) = default;
};

class formula;

namespace detail
{

struct formula_node
{
    op kind = op::tt;
    variant var = variant::none;
    atom_kind akind = atom_kind::prop;
    std::string name;                 // atom/item/array name, quantifier variable
    std::vector< term > args;         // atom arguments, metric offsets
    std::vector< formula > kids;      // operands; cases: guard, body, guard, body, ...
    domain_expr domain;               // quantifiers
    std::vector< std::pair< std::string, domain_expr > > bindings; // cases
    std::optional< condition > cond;  // cond nodes, quantifier filters
    bool has_else = false;            // cases: last kid is the else body
    source_loc loc;
    std::size_t hash = 0;
};

} // namespace detail

/// Immutable, shared formula tree. Copies are cheap.
class formula
{
public:
    formula() : formula( make( op::tt ) ) {}

    explicit formula( std::shared_ptr< const detail::formula_node > n ) : _n( std::move( n ) ) {}

    [[nodiscard]] op kind() const { return _n->kind; }
    [[nodiscard]] variant var() const { return _n->var; }
    [[nodiscard]] atom_kind akind() const { return _n->akind; }
    [[nodiscard]] const std::string& name() const { return _n->name; }
    [[nodiscard]] const std::vector< term >& args() const { return _n->args; }
    [[nodiscard]] const std::vector< formula >& kids() const { return _n->kids; }
    [[nodiscard]] const formula& kid( std::size_t i ) const { return _n->kids[ i ]; }
    [[nodiscard]] const domain_expr& domain() const { return _n->domain; }
    [[nodiscard]] const auto& bindings() const { return _n->bindings; }
    [[nodiscard]] const std::optional< condition >& cond() const { return _n->cond; }
    [[nodiscard]] bool has_else() const { return _n->has_else; }
    [[nodiscard]] source_loc loc() const { return _n->loc; }
    [[nodiscard]] std::size_t hash() const { return _n->hash; }
    [[nodiscard]] const detail::formula_node* node() const { return _n.get(); }

    friend bool operator==( const formula& a, const formula& b )
    {
        if ( a._n == b._n )
            return true;
        const auto& x = *a._n;
        const auto& y = *b._n;
        return x.hash == y.hash && x.kind == y.kind && x.var == y.var && x.akind == y.akind &&
               x.name == y.name && x.args == y.args && x.has_else == y.has_else &&
               x.domain == y.domain && x.bindings == y.bindings && x.cond == y.cond &&
               x.kids == y.kids;
    }

    /// Builds a node from its parts; the structural hash is computed here.
    static formula make( op kind, std::vector< formula > kids = {}, variant var = variant::none,
                         std::vector< term > args = {}, std::string name = {},
                         source_loc loc = {} )
    {
        detail::formula_node n;
        n.kind = kind;
        n.kids = std::move( kids );
        n.var = var;
        n.args = std::move( args );
        n.name = std::move( name );
        n.loc = loc;
        return finish( std::move( n ) );
    }

    static formula finish( detail::formula_node n )
    {
        std::size_t h = static_cast< std::size_t >( n.kind ) * 0x9e3779b97f4a7c15ULL;
        auto mix = [ &h ]( std::size_t v ) { h ^= v + 0x9e3779b97f4a7c15ULL + ( h << 6 ) + ( h >> 2 ); };
        mix( static_cast< std::size_t >( n.var ) );
        mix( static_cast< std::size_t >( n.akind ) );
        mix( std::hash< std::string >{}( n.name ) );
        for ( const auto& a : n.args )
            mix( a.hash() );
        for ( const auto& k : n.kids )
            mix( k.hash() );
        for ( const auto& v : n.domain.values )
            mix( v.hash() );
        for ( const auto& [ var, dom ] : n.bindings )
        {
            mix( std::hash< std::string >{}( var ) );
            for ( const auto& v : dom.values )
                mix( v.hash() );
        }
        mix( n.has_else ? 1 : 2 );
        n.hash = h;
        return formula( std::make_shared< const detail::formula_node >( std::move( n ) ) );
    }

    /// Same node with replaced operands.
    [[nodiscard]] formula with_kids( std::vector< formula > kids ) const
    {
        detail::formula_node n = *_n;
        n.kids = std::move( kids );
        return finish( std::move( n ) );
    }

    [[nodiscard]] sexpr to_sexpr() const;
    [[nodiscard]] std::string str() const { return to_sexpr().str(); }

    /// Identity of an atom as used by the encoder and history files.
    [[nodiscard]] std::string atom_key() const
    {
        assert( kind() == op::atom );
        switch ( akind() )
        {
        case atom_kind::item:
            return "item:" + name() + "=" + args().at( 0 ).str();
        case atom_kind::array:
            return "array:" + name() + "[" + args().at( 0 ).str() + "]=" + args().at( 1 ).str();
        case atom_kind::prop:
            break;
        }
        if ( args().empty() )
            return name();
        std::string key = name() + "(";
        for ( std::size_t i = 0; i < args().size(); ++i )
            key += ( i ? "," : "" ) + args()[ i ].str();
        return key + ")";
    }

    /// Human-readable rendering used in history files.
    [[nodiscard]] std::string atom_display() const
    {
        switch ( akind() )
        {
        case atom_kind::item:
            return name() + " = " + args().at( 0 ).str();
        case atom_kind::array:
            return name() + "[" + args().at( 0 ).str() + "] = " + args().at( 1 ).str();
        case atom_kind::prop:
            break;
        }
        return atom_key();
    }

private:
    std::shared_ptr< const detail::formula_node > _n;
};

struct formula_hash
{
    std::size_t operator()( const formula& f ) const { return f.hash(); }
};

// Core builders. These keep the exact shape asked for; no simplification.

inline formula prop( std::string name, std::vector< term > args = {} )
{
    return formula::make( op::atom, {}, variant::none, std::move( args ), std::move( name ) );
}

inline formula item_atom( std::string item, term value )
{
    detail::formula_node n;
    n.kind = op::atom;
    n.akind = atom_kind::item;
    n.name = std::move( item );
    n.args = { std::move( value ) };
    return formula::finish( std::move( n ) );
}

inline formula array_atom( std::string array, term index, term value )
{
    detail::formula_node n;
    n.kind = op::atom;
    n.akind = atom_kind::array;
    n.name = std::move( array );
    n.args = { std::move( index ), std::move( value ) };
    return formula::finish( std::move( n ) );
}

inline formula tt() { return formula::make( op::tt ); }
inline formula ff() { return formula::make( op::ff ); }
inline formula lnot( formula f ) { return formula::make( op::not_, { std::move( f ) } ); }
inline formula land( std::vector< formula > fs ) { return formula::make( op::and_, std::move( fs ) ); }
inline formula lor( std::vector< formula > fs ) { return formula::make( op::or_, std::move( fs ) ); }
inline formula implies( formula a, formula b ) { return formula::make( op::implies, { std::move( a ), std::move( b ) } ); }
inline formula iff( formula a, formula b ) { return formula::make( op::iff, { std::move( a ), std::move( b ) } ); }
inline formula next( formula f ) { return formula::make( op::next, { std::move( f ) } ); }
inline formula yesterday( formula f ) { return formula::make( op::yesterday, { std::move( f ) } ); }
inline formula zeta( formula f ) { return formula::make( op::zeta, { std::move( f ) } ); }
inline formula until( formula a, formula b ) { return formula::make( op::until, { std::move( a ), std::move( b ) } ); }
inline formula since( formula a, formula b ) { return formula::make( op::since, { std::move( a ), std::move( b ) } ); }
inline formula release( formula a, formula b ) { return formula::make( op::release, { std::move( a ), std::move( b ) } ); }
inline formula trigger( formula a, formula b ) { return formula::make( op::trigger, { std::move( a ), std::move( b ) } ); }

/// Unary metric sugar: futr/past/dist/lasts/.../lasttime with offset `t`.
inline formula metric( op kind, variant v, formula f, term t )
{
    return formula::make( kind, { std::move( f ) }, v, { std::move( t ) } );
}

/// somf/somp/alwf/alwp/som/alw.
inline formula unbounded( op kind, variant v, formula f )
{
    return formula::make( kind, { std::move( f ) }, v );
}

/// until_xy / since_xy. Without a variant these are the plain core operators.
inline formula until_v( variant v, formula a, formula b )
{
    if ( v == variant::none )
        return until( std::move( a ), std::move( b ) );
    return formula::make( op::until_v, { std::move( a ), std::move( b ) }, v );
}

inline formula since_v( variant v, formula a, formula b )
{
    if ( v == variant::none )
        return since( std::move( a ), std::move( b ) );
    return formula::make( op::since_v, { std::move( a ), std::move( b ) }, v );
}

/// `until_xy_<=_<= lo hi a b` when `hi` is present, `until_xy_>= lo a b` otherwise.
/// The variant defaults to ie.
inline formula bounded( op kind, variant v, term lo, std::optional< term > hi, formula a, formula b )
{
    if ( v == variant::none )
        v = variant::ie;
    std::vector< term > offsets{ std::move( lo ) };
    if ( hi )
        offsets.push_back( std::move( *hi ) );
    return formula::make( kind, { std::move( a ), std::move( b ) }, v, std::move( offsets ) );
}

inline formula quantifier( op kind, std::string var, domain_expr dom, formula body,
                           std::optional< condition > filter = std::nullopt, source_loc loc = {} )
{
    detail::formula_node n;
    n.kind = kind;
    n.name = std::move( var );
    n.domain = std::move( dom );
    n.kids = { std::move( body ) };
    n.cond = std::move( filter );
    n.loc = loc;
    return formula::finish( std::move( n ) );
}

inline formula forall( std::string var, std::vector< term > dom, formula body )
{
    return quantifier( op::forall, std::move( var ), domain_expr{ std::move( dom ), {} }, std::move( body ) );
}

inline formula exists( std::string var, std::vector< term > dom, formula body )
{
    return quantifier( op::exists, std::move( var ), domain_expr{ std::move( dom ), {} }, std::move( body ) );
}

inline formula cond_formula( condition c, source_loc loc = {} )
{
    detail::formula_node n;
    n.kind = op::cond;
    n.cond = std::move( c );
    n.loc = loc;
    return formula::finish( std::move( n ) );
}

/// and-case / or-case. `branches` are (guard, body) pairs.
inline formula case_formula( op kind, std::vector< std::pair< std::string, domain_expr > > bindings,
                             std::vector< std::pair< formula, formula > > branches,
                             std::optional< formula > else_body, source_loc loc = {} )
{
    detail::formula_node n;
    n.kind = kind;
    n.bindings = std::move( bindings );
    for ( auto& [ g, b ] : branches )
    {
        n.kids.push_back( std::move( g ) );
        n.kids.push_back( std::move( b ) );
    }
    if ( else_body )
    {
        n.kids.push_back( std::move( *else_body ) );
        n.has_else = true;
    }
    n.loc = loc;
    return formula::finish( std::move( n ) );
}

// Printing

namespace detail
{

inline std::string op_name( op o )
{
    switch ( o )
    {
    case op::atom: return "-P-";
    case op::tt: return "TRUE";
    case op::ff: return "FALSE";
    case op::not_: return "!!";
    case op::and_: return "&&";
    case op::or_: return "||";
    case op::implies: return "->";
    case op::iff: return "<->";
    case op::next: return "NEXT";
    case op::yesterday: return "YESTERDAY";
    case op::zeta: return "ZETA";
    case op::until: return "UNTIL";
    case op::since: return "SINCE";
    case op::release: return "RELEASE";
    case op::trigger: return "TRIGGER";
    case op::cond: return "COND";
    case op::futr: return "FUTR";
    case op::past: return "PAST";
    case op::dist: return "DIST";
    case op::lasts: return "LASTS";
    case op::lasted: return "LASTED";
    case op::withinf: return "WITHINF";
    case op::withinp: return "WITHINP";
    case op::nexttime: return "NEXTTIME";
    case op::lasttime: return "LASTTIME";
    case op::somf: return "SOMF";
    case op::somp: return "SOMP";
    case op::alwf: return "ALWF";
    case op::alwp: return "ALWP";
    case op::som: return "SOM";
    case op::alw: return "ALW";
    case op::until_v: return "UNTIL";
    case op::since_v: return "SINCE";
    case op::bounded_until: return "UNTIL";
    case op::bounded_since: return "SINCE";
    case op::forall: return "-A-";
    case op::exists: return "-E-";
    case op::and_case: return "AND-CASE";
    case op::or_case: return "OR-CASE";
    }
    return "?";
}

inline sexpr cond_to_sexpr( const condition& c )
{
    std::vector< sexpr > out;
    switch ( c.k )
    {
    case condition::kind::eql: out.push_back( sexpr::symbol( "EQUAL" ) ); break;
    case condition::kind::lt: out.push_back( sexpr::symbol( "<" ) ); break;
    case condition::kind::le: out.push_back( sexpr::symbol( "<=" ) ); break;
    case condition::kind::not_: out.push_back( sexpr::symbol( "NOT" ) ); break;
    case condition::kind::and_: out.push_back( sexpr::symbol( "AND" ) ); break;
    case condition::kind::or_: out.push_back( sexpr::symbol( "OR" ) ); break;
    }
    for ( const auto& t : c.terms )
        out.push_back( t.to_sexpr() );
    for ( const auto& k : c.kids )
        out.push_back( cond_to_sexpr( k ) );
    return sexpr::list( std::move( out ) );
}

inline sexpr domain_to_sexpr( const domain_expr& d )
{
    if ( d.range )
        return sexpr::list( { sexpr::symbol( "RANGE" ), d.range->first.to_sexpr(), d.range->second.to_sexpr() } );
    std::vector< sexpr > out;
    for ( const auto& v : d.values )
        out.push_back( v.to_sexpr() );
    return sexpr::list( std::move( out ) );
}

} // namespace detail

inline sexpr formula::to_sexpr() const
{
    using detail::op_name;
    std::vector< sexpr > out;
    const auto sym = []( std::string s ) { return sexpr::symbol( std::move( s ) ); };

    switch ( kind() )
    {
    case op::atom:
        if ( akind() == atom_kind::prop )
        {
            out.push_back( sym( "-P-" ) );
            out.push_back( sym( name() ) );
        }
        else
            out.push_back( sym( name() + "=" ) );
        for ( const auto& a : args() )
            out.push_back( a.to_sexpr() );
        return sexpr::list( std::move( out ) );
    case op::tt:
    case op::ff:
        return sym( op_name( kind() ) );
    case op::cond:
        return detail::cond_to_sexpr( *cond() );
    case op::forall:
    case op::exists:
        out.push_back( sym( op_name( kind() ) ) );
        out.push_back( sym( name() ) );
        out.push_back( detail::domain_to_sexpr( domain() ) );
        if ( cond() )
            out.push_back( detail::cond_to_sexpr( *cond() ) );
        out.push_back( kid( 0 ).to_sexpr() );
        return sexpr::list( std::move( out ) );
    case op::and_case:
    case op::or_case:
    {
        out.push_back( sym( op_name( kind() ) ) );
        std::vector< sexpr > binds;
        for ( const auto& [ v, d ] : bindings() )
        {
            binds.push_back( sym( v ) );
            binds.push_back( detail::domain_to_sexpr( d ) );
        }
        out.push_back( sexpr::list( std::move( binds ) ) );
        const std::size_t n = kids().size() - ( has_else() ? 1 : 0 );
        for ( std::size_t i = 0; i + 1 < n; i += 2 )
            out.push_back( sexpr::list( { kid( i ).to_sexpr(), kid( i + 1 ).to_sexpr() } ) );
        if ( has_else() )
            out.push_back( sexpr::list( { sym( "ELSE" ), kids().back().to_sexpr() } ) );
        return sexpr::list( std::move( out ) );
    }
    case op::bounded_until:
    case op::bounded_since:
    {
        std::string head = op_name( kind() ) + std::string( variant_suffix( var() ) );
        head += args().size() == 2 ? "_<=_<=" : "_>=";
        out.push_back( sym( head ) );
        for ( const auto& a : args() )
            out.push_back( a.to_sexpr() );
        out.push_back( kid( 0 ).to_sexpr() );
        out.push_back( kid( 1 ).to_sexpr() );
        return sexpr::list( std::move( out ) );
    }
    default:
        break;
    }

    out.push_back( sym( op_name( kind() ) + std::string( variant_suffix( var() ) ) ) );
    for ( const auto& k : kids() )
        out.push_back( k.to_sexpr() );
    for ( const auto& a : args() )
        out.push_back( a.to_sexpr() );
    return sexpr::list( std::move( out ) );
}

/// Nesting depth of future-tense and past-tense operators.
struct temporal_depths
{
    int future = 0;
    int past = 0;

    friend bool operator==( const temporal_depths&, const temporal_depths& ) = default;
};

inline temporal_depths temporal_depth( const formula& f )
{
    temporal_depths d;
    for ( const auto& k : f.kids() )
    {
        const auto kd = temporal_depth( k );
        d.future = std::max( d.future, kd.future );
        d.past = std::max( d.past, kd.past );
    }
    switch ( f.kind() )
    {
    case op::next:
    case op::until:
    case op::release:
        ++d.future;
        break;
    case op::yesterday:
    case op::zeta:
    case op::since:
    case op::trigger:
        ++d.past;
        break;
    default:
        break;
    }
    return d;
}

/// Number of distinct subformulas (structural sharing counted once).
inline std::size_t closure_size( const formula& f )
{
    std::vector< formula > seen;
    std::function< void( const formula& ) > walk = [ & ]( const formula& g ) {
        if ( std::find( seen.begin(), seen.end(), g ) != seen.end() )
            return;
        seen.push_back( g );
        for ( const auto& k : g.kids() )
            walk( k );
    };
    walk( f );
    return seen.size();
}

} // namespace plbmc
