#pragma once

#include "error.hpp"
#include "formula.hpp"
#include "history.hpp"
#include "operational.hpp"
#include "sexpr.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plbmc
{

enum class engine_kind
{
    mono,
    bi,
};

struct spec_options
{
    std::optional< int > bound;
    std::optional< engine_kind > engine;
    bool loop_free = false;
    std::optional< std::string > solver;
};

/// A parsed, validated spec file.
struct spec_document
{
    declarations decls;
    std::optional< formula > init;
    std::vector< formula > transitions;
    std::optional< formula > property;
    std::optional< partial_history > history;
    spec_options options;
};

namespace detail
{

struct metric_entry
{
    std::string_view base;
    op kind;
    bool two_letter; // _ee/_ei/_ie/_ii, otherwise _e/_i
};

inline constexpr metric_entry metric_table[] = {
    { "LASTS", op::lasts, true },       { "LASTED", op::lasted, true },
    { "WITHINF", op::withinf, true },   { "WITHINP", op::withinp, true },
    { "NEXTTIME", op::nexttime, true }, { "LASTTIME", op::lasttime, true },
    { "SOMF", op::somf, false },        { "SOMP", op::somp, false },
    { "ALWF", op::alwf, false },        { "ALWP", op::alwp, false },
    { "UNTIL", op::until_v, true },     { "SINCE", op::since_v, true },
};

inline std::optional< variant > parse_variant( std::string_view suffix, bool two_letter )
{
    if ( two_letter )
    {
        if ( suffix == "EE" ) return variant::ee;
        if ( suffix == "EI" ) return variant::ei;
        if ( suffix == "IE" ) return variant::ie;
        if ( suffix == "II" ) return variant::ii;
        return std::nullopt;
    }
    if ( suffix == "E" ) return variant::e;
    if ( suffix == "I" ) return variant::i;
    return std::nullopt;
}

} // namespace detail

/// Turns s-expressions into formulas. Needs the declarations to tell item
/// and array atoms apart and to resolve named domains.
class formula_parser
{
public:
    formula_parser( const declarations& decls, const std::map< std::string, std::vector< term > >& domains )
        : _decls( decls ), _domains( domains )
    {
    }

    [[nodiscard]] formula parse( const sexpr& s ) const
    {
        if ( s.is_atom() )
        {
            if ( s.is_symbol( "TRUE" ) )
                return tt();
            if ( s.is_symbol( "FALSE" ) )
                return ff();
            throw spec_error( "expected a formula, found '" + s.str() + "'", s.loc() );
        }
        const auto head = s.head();
        if ( !head )
            throw spec_error( "expected an operator at the head of '" + s.str() + "'", s.loc() );
        const std::string& h = *head;
        const auto loc = s.loc();

        if ( h == "-P-" )
        {
            if ( s.size() < 2 || !s[ 1 ].is_symbol() )
                throw spec_error( "(-P- NAME args...) expects a proposition name", loc );
            std::vector< term > args;
            for ( std::size_t i = 2; i < s.size(); ++i )
                args.push_back( parse_term( s[ i ] ) );
            return located( prop( s[ 1 ].text(), std::move( args ) ), loc );
        }
        if ( h == "!!" )
            return located( lnot( parse( arg( s, 1, 1 ) ) ), loc );
        if ( h == "&&" || h == "||" )
        {
            std::vector< formula > fs;
            for ( std::size_t i = 1; i < s.size(); ++i )
                fs.push_back( parse( s[ i ] ) );
            return located( h == "&&" ? land( std::move( fs ) ) : lor( std::move( fs ) ), loc );
        }
        if ( h == "->" || h == "<->" )
        {
            auto a = parse( arg( s, 1, 2 ) );
            auto b = parse( arg( s, 2, 2 ) );
            return located( h == "->" ? implies( a, b ) : iff( a, b ), loc );
        }
        if ( h == "NEXT" )
            return located( next( parse( arg( s, 1, 1 ) ) ), loc );
        if ( h == "YESTERDAY" )
            return located( yesterday( parse( arg( s, 1, 1 ) ) ), loc );
        if ( h == "ZETA" )
            return located( zeta( parse( arg( s, 1, 1 ) ) ), loc );
        if ( h == "UNTIL" || h == "SINCE" || h == "RELEASE" || h == "TRIGGER" )
        {
            auto a = parse( arg( s, 1, 2 ) );
            auto b = parse( arg( s, 2, 2 ) );
            const op kind = h == "UNTIL" ? op::until : h == "SINCE" ? op::since : h == "RELEASE" ? op::release : op::trigger;
            return located( formula::make( kind, { a, b } ), loc );
        }
        if ( h == "FUTR" || h == "PAST" || h == "DIST" )
        {
            const op kind = h == "FUTR" ? op::futr : h == "PAST" ? op::past : op::dist;
            return located( metric( kind, variant::none, parse( arg( s, 1, 2 ) ), parse_term( arg( s, 2, 2 ) ) ), loc );
        }
        if ( h == "SOM" || h == "ALW" )
            return located( unbounded( h == "SOM" ? op::som : op::alw, variant::none, parse( arg( s, 1, 1 ) ) ), loc );
        if ( h == "-A-" || h == "-E-" )
            return parse_quantifier( s, h == "-A-" ? op::forall : op::exists );
        if ( h == "AND-CASE" || h == "OR-CASE" )
            return parse_case( s, h == "AND-CASE" ? op::and_case : op::or_case );
        if ( is_condition_head( h ) )
            return cond_formula( parse_condition( s ), loc );
        if ( auto f = parse_metric_family( s, h ) )
            return *f;
        if ( h.size() > 1 && h.back() == '=' && h != "<=" && h != ">=" )
            return parse_item_atom( s, h.substr( 0, h.size() - 1 ) );

        throw spec_error( "unknown operator '" + h + "'", loc );
    }

    [[nodiscard]] term parse_term( const sexpr& s ) const
    {
        if ( !s.is_atom() )
            throw spec_error( "expected a constant or variable, found '" + s.str() + "'", s.loc() );
        return term::from_sexpr( s );
    }

    [[nodiscard]] domain_expr parse_domain( const sexpr& s ) const
    {
        if ( s.is_symbol() )
        {
            auto it = _domains.find( s.text() );
            if ( it == _domains.end() )
                throw spec_error( "unknown domain '" + s.text() + "'", s.loc() );
            return domain_expr{ it->second, {} };
        }
        if ( s.is_integer() )
            throw spec_error( "expected a domain list, found '" + s.str() + "'", s.loc() );
        if ( s.head() == "RANGE" )
        {
            if ( s.size() != 3 )
                throw spec_error( "(range lo hi) expects two bounds", s.loc() );
            term lo = parse_term( s[ 1 ] );
            term hi = parse_term( s[ 2 ] );
            if ( lo.is_int() && hi.is_int() )
                return domain_expr{ expand_range( lo.as_int(), hi.as_int() ), {} };
            return domain_expr{ {}, std::make_pair( lo, hi ) };
        }
        domain_expr d;
        for ( const auto& c : s.children() )
            d.values.push_back( parse_term( c ) );
        return d;
    }

    static std::vector< term > expand_range( std::int64_t lo, std::int64_t hi )
    {
        std::vector< term > out;
        for ( auto v = lo; v <= hi; ++v )
            out.emplace_back( v );
        return out;
    }

    [[nodiscard]] condition parse_condition( const sexpr& s ) const
    {
        const auto head = s.head();
        if ( !head || !is_condition_head( *head ) )
            throw spec_error( "expected a condition (eql, equal, <, <=, not, and, or), found '" + s.str() + "'", s.loc() );
        condition c;
        c.loc = s.loc();
        const std::string& h = *head;
        if ( h == "EQL" || h == "EQUAL" || h == "<" || h == "<=" )
        {
            c.k = h == "<" ? condition::kind::lt : h == "<=" ? condition::kind::le : condition::kind::eql;
            c.terms = { parse_term( arg( s, 1, 2 ) ), parse_term( arg( s, 2, 2 ) ) };
            return c;
        }
        if ( h == "NOT" )
        {
            c.k = condition::kind::not_;
            c.kids = { parse_condition( arg( s, 1, 1 ) ) };
            return c;
        }
        c.k = h == "AND" ? condition::kind::and_ : condition::kind::or_;
        for ( std::size_t i = 1; i < s.size(); ++i )
            c.kids.push_back( parse_condition( s[ i ] ) );
        return c;
    }

private:
    const declarations& _decls;
    const std::map< std::string, std::vector< term > >& _domains;

    static bool is_condition_head( const std::string& h )
    {
        return h == "EQL" || h == "EQUAL" || h == "<" || h == "<=" || h == "NOT" || h == "AND" || h == "OR";
    }

    static formula located( const formula& f, source_loc loc )
    {
        detail::formula_node n = *f.node();
        n.loc = loc;
        return formula::finish( std::move( n ) );
    }

    // Operand `i` of a form that must have exactly `n` operands.
    static const sexpr& arg( const sexpr& s, std::size_t i, std::size_t n )
    {
        if ( s.size() != n + 1 )
            throw spec_error( "'" + *s.head() + "' expects " + std::to_string( n ) + " operand(s), got " +
                                  std::to_string( s.size() - 1 ),
                              s.loc() );
        return s[ i ];
    }

    std::optional< formula > parse_metric_family( const sexpr& s, const std::string& h ) const
    {
        // Bounded until/since: UNTIL_XY_<=_<= lo hi a b, UNTIL_XY_>= lo a b.
        for ( std::string_view base : { std::string_view( "UNTIL" ), std::string_view( "SINCE" ) } )
        {
            if ( !h.starts_with( base ) )
                continue;
            std::string_view rest = std::string_view( h ).substr( base.size() );
            const bool both = rest.ends_with( "_<=_<=" );
            const bool lower = !both && rest.ends_with( "_>=" );
            if ( !both && !lower )
                continue;
            rest.remove_suffix( both ? 6 : 3 );
            variant v = variant::ie;
            if ( !rest.empty() )
            {
                auto parsed = rest.starts_with( "_" ) ? detail::parse_variant( rest.substr( 1 ), true ) : std::nullopt;
                if ( !parsed )
                    throw spec_error( "unknown operator '" + h + "'", s.loc() );
                v = *parsed;
            }
            const op kind = base == "UNTIL" ? op::bounded_until : op::bounded_since;
            if ( both )
                return located( bounded( kind, v, parse_term( arg( s, 1, 4 ) ), parse_term( arg( s, 2, 4 ) ),
                                         parse( arg( s, 3, 4 ) ), parse( arg( s, 4, 4 ) ) ),
                                s.loc() );
            return located( bounded( kind, v, parse_term( arg( s, 1, 3 ) ), std::nullopt, parse( arg( s, 2, 3 ) ),
                                     parse( arg( s, 3, 3 ) ) ),
                            s.loc() );
        }

        for ( const auto& e : detail::metric_table )
        {
            if ( !h.starts_with( e.base ) )
                continue;
            std::string_view rest = std::string_view( h ).substr( e.base.size() );
            variant v = variant::none;
            if ( !rest.empty() )
            {
                if ( !rest.starts_with( "_" ) )
                    continue;
                auto parsed = detail::parse_variant( rest.substr( 1 ), e.two_letter );
                if ( !parsed )
                    continue;
                v = *parsed;
            }
            else if ( e.kind == op::until_v || e.kind == op::since_v )
                continue; // plain UNTIL/SINCE are core
            if ( e.kind == op::until_v || e.kind == op::since_v )
                return located( formula::make( e.kind, { parse( arg( s, 1, 2 ) ), parse( arg( s, 2, 2 ) ) }, v ), s.loc() );
            if ( !e.two_letter )
                return located( unbounded( e.kind, v, parse( arg( s, 1, 1 ) ) ), s.loc() );
            return located( metric( e.kind, v, parse( arg( s, 1, 2 ) ), parse_term( arg( s, 2, 2 ) ) ), s.loc() );
        }
        return std::nullopt;
    }

    formula parse_item_atom( const sexpr& s, const std::string& name ) const
    {
        if ( s.size() == 2 )
        {
            if ( !_decls.find_item( name ) )
                throw spec_error( "reference to undeclared item '" + name + "'", s.loc() );
            return located( item_atom( name, parse_term( s[ 1 ] ) ), s.loc() );
        }
        if ( s.size() == 3 )
        {
            if ( !_decls.find_array( name ) )
                throw spec_error( "reference to undeclared array '" + name + "'", s.loc() );
            return located( array_atom( name, parse_term( s[ 1 ] ), parse_term( s[ 2 ] ) ), s.loc() );
        }
        throw spec_error( "'" + name + "=' expects one value (item) or an index and a value (array)", s.loc() );
    }

    formula parse_quantifier( const sexpr& s, op kind ) const
    {
        if ( s.size() != 4 && s.size() != 5 )
            throw spec_error( "quantifier expects (VAR DOMAIN [CONDITION] BODY)", s.loc() );
        if ( !s[ 1 ].is_symbol() )
            throw spec_error( "quantifier variable must be a symbol", s[ 1 ].loc() );
        auto dom = parse_domain( s[ 2 ] );
        std::optional< condition > filter;
        if ( s.size() == 5 )
            filter = parse_condition( s[ 3 ] );
        return quantifier( kind, s[ 1 ].text(), std::move( dom ), parse( s[ s.size() - 1 ] ), std::move( filter ), s.loc() );
    }

    formula parse_case( const sexpr& s, op kind ) const
    {
        if ( s.size() < 2 || !s[ 1 ].is_list() || s[ 1 ].size() % 2 != 0 )
            throw spec_error( "case construct expects a binding list (VAR DOMAIN ...)", s.loc() );
        std::vector< std::pair< std::string, domain_expr > > bindings;
        for ( std::size_t i = 0; i < s[ 1 ].size(); i += 2 )
        {
            if ( !s[ 1 ][ i ].is_symbol() )
                throw spec_error( "case binding variable must be a symbol", s[ 1 ][ i ].loc() );
            bindings.emplace_back( s[ 1 ][ i ].text(), parse_domain( s[ 1 ][ i + 1 ] ) );
        }
        std::vector< std::pair< formula, formula > > branches;
        std::optional< formula > else_body;
        for ( std::size_t i = 2; i < s.size(); ++i )
        {
            const auto& b = s[ i ];
            if ( !b.is_list() || b.size() != 2 )
                throw spec_error( "case branch expects (GUARD BODY) or (ELSE BODY)", b.loc() );
            if ( b[ 0 ].is_symbol( "ELSE" ) )
            {
                if ( else_body )
                    throw spec_error( "multiple else branches", b.loc() );
                if ( i + 1 != s.size() )
                    throw spec_error( "else branch must be last", b.loc() );
                else_body = parse( b[ 1 ] );
                continue;
            }
            branches.emplace_back( parse( b[ 0 ] ), parse( b[ 1 ] ) );
        }
        return case_formula( kind, std::move( bindings ), std::move( branches ), std::move( else_body ), s.loc() );
    }
};

namespace detail
{

inline int parse_positive( const sexpr& s, const char* what )
{
    if ( !s.is_integer() || s.value() < 0 || s.value() > 1'000'000 )
        throw spec_error( std::string( what ) + " must be a nonnegative integer", s.loc() );
    return static_cast< int >( s.value() );
}

inline partial_history parse_history_section( const sexpr& section, const formula_parser& fp )
{
    partial_history h;
    for ( std::size_t i = 1; i < section.size(); ++i )
    {
        const auto& entry = section[ i ];
        const auto head = entry.head();
        if ( head == "LOOP" || head == "POOL" )
        {
            if ( entry.size() != 2 )
                throw spec_error( "(" + *head + " N) expects one instant", entry.loc() );
            ( head == "LOOP" ? h.loop : h.pool ) = parse_positive( entry[ 1 ], "history instant" );
            continue;
        }
        if ( head != "TIME" || entry.size() < 2 )
            throw spec_error( "history entries are (time N facts...), (loop N) or (pool N)", entry.loc() );
        const int instant = parse_positive( entry[ 1 ], "history instant" );
        for ( std::size_t j = 2; j < entry.size(); ++j )
        {
            formula f = fp.parse( entry[ j ] );
            bool polarity = true;
            if ( f.kind() == op::not_ )
            {
                polarity = false;
                f = f.kid( 0 );
            }
            if ( f.kind() != op::atom )
                throw spec_error( "history facts must be atoms or negated atoms", entry[ j ].loc() );
            h.facts.push_back( { instant, f, polarity } );
        }
    }
    if ( auto bad = h.contradiction() )
        throw spec_error( "history asserts " + bad->atom.atom_key() + " both true and false at time " +
                              std::to_string( bad->instant ),
                          section.loc() );
    return h;
}

inline void check_prop_arity( const formula& f, std::map< std::string, std::size_t >& arity )
{
    if ( f.kind() == op::atom && f.akind() == atom_kind::prop )
    {
        auto [ it, fresh ] = arity.emplace( f.name(), f.args().size() );
        if ( !fresh && it->second != f.args().size() )
            throw spec_error( "proposition " + f.name() + " used with " + std::to_string( f.args().size() ) +
                                  " argument(s), declared with " + std::to_string( it->second ),
                              f.loc() );
        return;
    }
    for ( const auto& k : f.kids() )
        check_prop_arity( k, arity );
}

} // namespace detail

/// Builds a SpecDocument from the top-level forms of a spec file.
inline spec_document parse_spec( const std::vector< sexpr >& forms )
{
    spec_document doc;
    std::map< std::string, std::vector< term > > domains;

    const auto literal_domain = [ & ]( const sexpr& s, const std::string& owner ) {
        formula_parser fp( doc.decls, domains );
        auto d = fp.parse_domain( s );
        if ( d.range )
            throw spec_error( "domain of " + owner + " must have literal bounds", s.loc() );
        if ( d.values.empty() )
            throw spec_error( "domain of " + owner + " is empty", s.loc() );
        for ( std::size_t i = 0; i < d.values.size(); ++i )
            for ( std::size_t j = i + 1; j < d.values.size(); ++j )
                if ( d.values[ i ] == d.values[ j ] )
                    throw spec_error( "duplicate value " + d.values[ i ].str() + " in domain of " + owner, s.loc() );
        return d.values;
    };
    const auto name_taken = [ & ]( const std::string& name ) {
        return doc.decls.find_item( name ) || doc.decls.find_array( name );
    };

    // Declarations first, so that formulas may use items declared later.
    for ( const auto& form : forms )
    {
        const auto head = form.head();
        if ( !head )
            throw spec_error( "expected a section such as (init ...), found '" + form.str() + "'", form.loc() );
        if ( *head == "DEFINE-DOMAIN" )
        {
            if ( form.size() != 3 || !form[ 1 ].is_symbol() )
                throw spec_error( "(define-domain NAME (values...))", form.loc() );
            domains[ form[ 1 ].text() ] = literal_domain( form[ 2 ], form[ 1 ].text() );
        }
        else if ( *head == "DEFINE-ITEM" )
        {
            if ( form.size() != 3 || !form[ 1 ].is_symbol() )
                throw spec_error( "(define-item NAME DOMAIN)", form.loc() );
            if ( name_taken( form[ 1 ].text() ) )
                throw spec_error( "duplicate declaration of " + form[ 1 ].text(), form.loc() );
            doc.decls.items.push_back( { form[ 1 ].text(), literal_domain( form[ 2 ], form[ 1 ].text() ), form.loc() } );
        }
        else if ( *head == "DEFINE-ARRAY" )
        {
            if ( form.size() != 4 || !form[ 1 ].is_symbol() )
                throw spec_error( "(define-array NAME INDEX-DOMAIN DOMAIN)", form.loc() );
            if ( name_taken( form[ 1 ].text() ) )
                throw spec_error( "duplicate declaration of " + form[ 1 ].text(), form.loc() );
            doc.decls.arrays.push_back( { form[ 1 ].text(), literal_domain( form[ 2 ], form[ 1 ].text() ),
                                          literal_domain( form[ 3 ], form[ 1 ].text() ), form.loc() } );
        }
    }

    formula_parser fp( doc.decls, domains );
    for ( const auto& form : forms )
    {
        const std::string& h = *form.head();
        const auto one = [ & ]() -> const sexpr& {
            if ( form.size() != 2 )
                throw spec_error( "(" + h + " FORMULA) expects exactly one formula", form.loc() );
            return form[ 1 ];
        };
        if ( h == "DEFINE-DOMAIN" || h == "DEFINE-ITEM" || h == "DEFINE-ARRAY" )
            continue;
        if ( h == "DECLARE" )
        {
            for ( std::size_t i = 1; i < form.size(); ++i )
            {
                auto a = fp.parse( form[ i ] );
                if ( a.kind() != op::atom )
                    throw spec_error( "(declare ...) lists atoms only", form[ i ].loc() );
                doc.decls.atoms.push_back( a );
            }
        }
        else if ( h == "INIT" )
        {
            if ( doc.init )
                throw spec_error( "duplicate init section", form.loc() );
            doc.init = fp.parse( one() );
        }
        else if ( h == "TRANS" )
            doc.transitions.push_back( fp.parse( one() ) );
        else if ( h == "PROPERTY" )
        {
            if ( doc.property )
                throw spec_error( "duplicate property section", form.loc() );
            doc.property = fp.parse( one() );
        }
        else if ( h == "HISTORY" )
        {
            if ( doc.history )
                throw spec_error( "at most one history section is allowed", form.loc() );
            doc.history = detail::parse_history_section( form, fp );
        }
        else if ( h == "OPTIONS" )
        {
            for ( std::size_t i = 1; i < form.size(); ++i )
            {
                const auto& o = form[ i ];
                const auto oh = o.head();
                if ( oh == "BOUND" && o.size() == 2 )
                {
                    const int k = detail::parse_positive( o[ 1 ], "bound" );
                    if ( k < 1 )
                        throw spec_error( "bound must be at least 1", o.loc() );
                    doc.options.bound = k;
                }
                else if ( oh == "ENGINE" && o.size() == 2 && ( o[ 1 ].is_symbol( "MONO" ) || o[ 1 ].is_symbol( "BI" ) ) )
                    doc.options.engine = o[ 1 ].is_symbol( "MONO" ) ? engine_kind::mono : engine_kind::bi;
                else if ( oh == "LOOP-FREE" && o.size() == 1 )
                    doc.options.loop_free = true;
                else if ( oh == "SOLVER" && o.size() == 2 && o[ 1 ].is_symbol() )
                {
                    std::string id = o[ 1 ].text();
                    for ( auto& c : id )
                        c = static_cast< char >( std::tolower( static_cast< unsigned char >( c ) ) );
                    doc.options.solver = id;
                }
                else
                    throw spec_error( "unknown option '" + o.str() + "'", o.loc() );
            }
        }
        else
            throw spec_error( "unknown section keyword '" + h + "'", form.loc() );
    }

    std::map< std::string, std::size_t > arity;
    for ( const auto& a : doc.decls.atoms )
        detail::check_prop_arity( a, arity );
    if ( doc.init )
        detail::check_prop_arity( *doc.init, arity );
    for ( const auto& t : doc.transitions )
        detail::check_prop_arity( t, arity );
    if ( doc.property )
        detail::check_prop_arity( *doc.property, arity );
    return doc;
}

inline spec_document parse_spec( std::string_view text )
{
    return parse_spec( read_sexprs( text ) );
}

} // namespace plbmc
