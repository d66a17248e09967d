#pragma once

#include "cnf.hpp"
#include "encoder.hpp"
#include "error.hpp"
#include "formula.hpp"
#include "history.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace plbmc
{

/// An ultimately periodic word, concretely instants 0..k.
///
/// mono: u[0..loop-1] (u[loop..k])^w
/// bi:   ^w(u[0..pool]) u[0..k] (u[loop..k])^w
struct lasso_trace
{
    int k = 0;
    engine_kind engine = engine_kind::mono;
    std::vector< formula > atoms;             // column order
    std::vector< std::vector< bool > > values; // [instant][atom]
    int loop = 1;
    std::optional< int > pool;

    [[nodiscard]] std::optional< std::size_t > column( const formula& a ) const
    {
        for ( std::size_t i = 0; i < atoms.size(); ++i )
            if ( atoms[ i ] == a )
                return i;
        return std::nullopt;
    }

    [[nodiscard]] bool holds( const formula& a, int t ) const
    {
        auto c = column( a );
        return c && values[ static_cast< std::size_t >( t ) ][ *c ];
    }

    /// Throws unless the shape fields are consistent.
    void validate() const
    {
        if ( k < 1 )
            throw error( "trace bound must be at least 1" );
        if ( values.size() != static_cast< std::size_t >( k ) + 1 )
            throw error( "trace has " + std::to_string( values.size() ) + " instants, expected " + std::to_string( k + 1 ) );
        for ( const auto& row : values )
            if ( row.size() != atoms.size() )
                throw error( "trace row width differs from atom count" );
        if ( loop < 1 || loop > k )
            throw error( "trace loop start " + std::to_string( loop ) + " outside [1, " + std::to_string( k ) + "]" );
        if ( engine == engine_kind::bi && ( !pool || *pool < 0 || *pool > k ) )
            throw error( "bi-infinite trace needs a past loop start within [0, k]" );
    }
};

/// Reads the trace off a model. Atom columns follow the closure order.
inline lasso_trace decode( const sat_result& result, const var_map& vm )
{
    if ( !result.is_sat() || !result.model )
        throw error( "cannot decode an UNSAT result" );
    lasso_trace tr;
    tr.k = vm.k();
    tr.engine = vm.options().engine;
    for ( int a : vm.props() )
        tr.atoms.push_back( vm.node( a ).f );
    for ( int t = 0; t <= tr.k; ++t )
    {
        std::vector< bool > row;
        for ( int a : vm.props() )
            row.push_back( result.value( vm.var_of( a, 0, t ) ) );
        tr.values.push_back( std::move( row ) );
    }

    const auto pick = [ & ]( const std::vector< int >& sel, int first, const char* what ) {
        std::optional< int > found;
        for ( std::size_t i = 0; i < sel.size(); ++i )
            if ( result.value( sel[ i ] ) )
            {
                if ( found )
                    throw error( std::string( "model sets more than one " ) + what + " selector" );
                found = first + static_cast< int >( i );
            }
        if ( !found )
            throw error( std::string( "model sets no " ) + what + " selector" );
        return *found;
    };

    if ( vm.options().loop_free )
        tr.loop = tr.k; // no loop machinery; marker omitted when rendering
    else
        tr.loop = pick( vm.loop_selectors(), 1, "loop" );
    if ( tr.engine == engine_kind::bi )
        tr.pool = pick( vm.past_selectors(), 0, "past loop" );
    return tr;
}

/// Options for rendering: loop-free traces carry no loop marker.
inline void render_history( const lasso_trace& tr, std::ostream& out, bool with_loop = true )
{
    for ( int t = 0; t <= tr.k; ++t )
    {
        out << "------ time " << t << " ------\n";
        if ( with_loop && t == tr.loop )
            out << "  **LOOP**\n";
        if ( tr.pool && t == *tr.pool )
            out << "  **POOL**\n";
        for ( std::size_t a = 0; a < tr.atoms.size(); ++a )
            if ( tr.values[ static_cast< std::size_t >( t ) ][ a ] )
                out << "  " << tr.atoms[ a ].atom_display() << '\n';
        out << '\n';
    }
    out << "------ end ------\n";
    if ( !out )
        throw error( "failed to write history" );
}

inline std::string render_history( const lasso_trace& tr, bool with_loop = true )
{
    std::ostringstream s;
    render_history( tr, s, with_loop );
    return s.str();
}

namespace detail
{

inline std::string trim( std::string_view s )
{
    std::size_t b = 0, e = s.size();
    while ( b < e && std::isspace( static_cast< unsigned char >( s[ b ] ) ) )
        ++b;
    while ( e > b && std::isspace( static_cast< unsigned char >( s[ e - 1 ] ) ) )
        --e;
    return std::string( s.substr( b, e - b ) );
}

inline std::string upper( std::string s )
{
    for ( auto& c : s )
        c = static_cast< char >( std::toupper( static_cast< unsigned char >( c ) ) );
    return s;
}

inline term history_term( const std::string& text )
{
    const std::string s = trim( text );
    if ( s.empty() )
        throw error( "empty value in history" );
    std::size_t used = 0;
    try
    {
        const long long v = std::stoll( s, &used );
        if ( used == s.size() )
            return term( static_cast< std::int64_t >( v ) );
    }
    catch ( const std::exception& )
    {
    }
    return term( upper( s ) );
}

// NAME, NAME(a,b), NAME = V, NAME[I] = V
inline formula history_atom( const std::string& text, int lineno )
{
    const auto bad = [ & ]() { return error( "history line " + std::to_string( lineno ) + ": malformed atom '" + text + "'" ); };
    if ( auto eq = text.find( '=' ); eq != std::string::npos )
    {
        const std::string lhs = trim( text.substr( 0, eq ) );
        const term value = history_term( text.substr( eq + 1 ) );
        if ( auto lb = lhs.find( '[' ); lb != std::string::npos )
        {
            if ( lhs.back() != ']' || lb == 0 )
                throw bad();
            return array_atom( upper( trim( lhs.substr( 0, lb ) ) ), history_term( lhs.substr( lb + 1, lhs.size() - lb - 2 ) ), value );
        }
        if ( lhs.empty() )
            throw bad();
        return item_atom( upper( lhs ), value );
    }
    if ( auto lp = text.find( '(' ); lp != std::string::npos )
    {
        if ( text.back() != ')' || lp == 0 )
            throw bad();
        std::vector< term > args;
        std::string inner = text.substr( lp + 1, text.size() - lp - 2 );
        std::stringstream ss( inner );
        std::string part;
        while ( std::getline( ss, part, ',' ) )
            args.push_back( history_term( part ) );
        return prop( upper( trim( text.substr( 0, lp ) ) ), std::move( args ) );
    }
    for ( char c : text )
        if ( std::isspace( static_cast< unsigned char >( c ) ) )
            throw bad();
    return prop( upper( text ) );
}

} // namespace detail

/// Parses a history in render_history format. Listed atoms become positive
/// facts, `!ATOM` lines negative ones; anything unlisted is unconstrained.
inline partial_history parse_history( std::string_view text )
{
    partial_history h;
    std::optional< int > instant;
    bool ended = false;
    int lineno = 0;
    std::istringstream in{ std::string( text ) };
    std::string raw;
    while ( std::getline( in, raw ) )
    {
        ++lineno;
        const std::string line = detail::trim( raw );
        if ( line.empty() )
            continue;
        if ( ended )
            throw error( "history line " + std::to_string( lineno ) + ": content after end marker" );
        if ( line.starts_with( "------" ) )
        {
            std::istringstream hs( line );
            std::string open, word, close;
            hs >> open >> word;
            if ( word == "end" && ( hs >> close ) && close == open && !( hs >> word ) )
            {
                ended = true;
                continue;
            }
            long long t = -1;
            if ( word != "time" || !( hs >> t ) || !( hs >> close ) || close != open || t < 0 || ( hs >> word ) )
                throw error( "history line " + std::to_string( lineno ) + ": malformed header '" + line + "'" );
            if ( instant && t <= *instant )
                throw error( "history line " + std::to_string( lineno ) + ": instants must increase" );
            instant = static_cast< int >( t );
            continue;
        }
        if ( !instant )
            throw error( "history line " + std::to_string( lineno ) + ": entry before the first time header" );
        if ( line == "**LOOP**" )
        {
            h.loop = *instant;
            continue;
        }
        if ( line == "**POOL**" )
        {
            h.pool = *instant;
            continue;
        }
        const bool negative = line.front() == '!';
        const std::string body = detail::trim( negative ? line.substr( 1 ) : line );
        if ( body.empty() )
            throw error( "history line " + std::to_string( lineno ) + ": missing atom" );
        h.facts.push_back( { *instant, detail::history_atom( body, lineno ), !negative } );
    }
    if ( auto bad = h.contradiction() )
        throw error( "history asserts " + bad->atom.atom_display() + " both true and false at time " + std::to_string( bad->instant ) );
    return h;
}

/// Every fact of the trace as a total history (negatives included).
inline partial_history total_history( const lasso_trace& tr )
{
    partial_history h;
    for ( int t = 0; t <= tr.k; ++t )
        for ( std::size_t a = 0; a < tr.atoms.size(); ++a )
            h.facts.push_back( { t, tr.atoms[ a ], tr.values[ static_cast< std::size_t >( t ) ][ a ] } );
    h.loop = tr.loop;
    h.pool = tr.pool;
    return h;
}

/// Semantic evaluation of core formulas on lasso words.
///
/// The word is laid out explicitly: (bi) `future depth + 2` copies of the past
/// period, the window, then `past depth + 2` copies of the future period. The
/// rightmost copy is its own successor and the leftmost its own predecessor;
/// until/since take the least fixpoint there, release/trigger the greatest.
class lasso_oracle
{
public:
    explicit lasso_oracle( const formula& f )
    {
        std::unordered_map< formula, int, formula_hash > seen;
        intern( f, seen );
        const auto d = temporal_depth( f );
        _future_depth = d.future;
        _past_depth = d.past;
    }

    [[nodiscard]] std::size_t size() const { return _nodes.size(); }

    /// Truth value of the formula at window instant `position`.
    [[nodiscard]] bool eval( const lasso_trace& tr, int position ) const
    {
        const auto table = evaluate( tr );
        return table.back()[ static_cast< std::size_t >( window_index( tr, position ) ) ] != 0;
    }

    /// Truth value at every window instant 0..k.
    [[nodiscard]] std::vector< bool > eval_window( const lasso_trace& tr ) const
    {
        const auto table = evaluate( tr );
        std::vector< bool > out;
        for ( int t = 0; t <= tr.k; ++t )
            out.push_back( table.back()[ static_cast< std::size_t >( window_index( tr, t ) ) ] != 0 );
        return out;
    }

private:
    struct node
    {
        formula f;
        op kind;
        std::vector< int > kids;
    };

    std::vector< node > _nodes;
    int _future_depth = 0;
    int _past_depth = 0;

    int intern( const formula& f, std::unordered_map< formula, int, formula_hash >& seen )
    {
        if ( auto it = seen.find( f ); it != seen.end() )
            return it->second;
        if ( !is_core( f.kind() ) )
            throw error( "oracle needs a core formula, found " + f.str() );
        node n{ f, f.kind(), {} };
        for ( const auto& k : f.kids() )
            n.kids.push_back( intern( k, seen ) );
        _nodes.push_back( std::move( n ) );
        const int id = static_cast< int >( _nodes.size() ) - 1;
        seen.emplace( f, id );
        return id;
    }

    struct layout
    {
        std::vector< int > instant; // window instant shown at each position
        std::vector< int > succ;
        std::vector< int > pred; // -1: the mono origin
        int window_start = 0;
    };

    [[nodiscard]] int left_copies( const lasso_trace& tr ) const
    {
        return tr.engine == engine_kind::bi ? _future_depth + 2 : 0;
    }

    [[nodiscard]] int window_index( const lasso_trace& tr, int position ) const
    {
        if ( position < 0 || position > tr.k )
            throw error( "position " + std::to_string( position ) + " outside the window [0, " + std::to_string( tr.k ) + "]" );
        const int past_len = tr.engine == engine_kind::bi ? *tr.pool + 1 : 0;
        return left_copies( tr ) * past_len + position;
    }

    [[nodiscard]] layout build( const lasso_trace& tr ) const
    {
        tr.validate();
        layout l;
        const int left = left_copies( tr );
        if ( tr.engine == engine_kind::bi )
            for ( int c = 0; c < left; ++c )
                for ( int t = 0; t <= *tr.pool; ++t )
                    l.instant.push_back( t );
        l.window_start = static_cast< int >( l.instant.size() );
        for ( int t = 0; t <= tr.k; ++t )
            l.instant.push_back( t );
        const int right = _past_depth + 2;
        int last_copy_start = -1;
        for ( int c = 0; c < right; ++c )
        {
            last_copy_start = static_cast< int >( l.instant.size() );
            for ( int t = tr.loop; t <= tr.k; ++t )
                l.instant.push_back( t );
        }
        const int n = static_cast< int >( l.instant.size() );
        l.succ.resize( static_cast< std::size_t >( n ) );
        l.pred.resize( static_cast< std::size_t >( n ) );
        for ( int j = 0; j < n; ++j )
        {
            l.succ[ static_cast< std::size_t >( j ) ] = j + 1 < n ? j + 1 : last_copy_start;
            l.pred[ static_cast< std::size_t >( j ) ] = j - 1;
        }
        if ( tr.engine == engine_kind::bi )
            l.pred[ 0 ] = *tr.pool; // leftmost copy of u[0..pool] wraps on itself
        return l;
    }

    [[nodiscard]] std::vector< std::vector< std::uint8_t > > evaluate( const lasso_trace& tr ) const
    {
        const layout l = build( tr );
        const auto n = l.instant.size();
        const bool mono = tr.engine == engine_kind::mono;
        std::vector< std::vector< std::uint8_t > > v( _nodes.size(), std::vector< std::uint8_t >( n, 0 ) );

        for ( std::size_t id = 0; id < _nodes.size(); ++id )
        {
            const auto& nd = _nodes[ id ];
            auto& out = v[ id ];
            const auto kid = [ & ]( std::size_t i ) -> const std::vector< std::uint8_t >& {
                return v[ static_cast< std::size_t >( nd.kids[ i ] ) ];
            };
            switch ( nd.kind )
            {
            case op::atom:
            {
                const auto col = tr.column( nd.f );
                for ( std::size_t j = 0; j < n; ++j )
                    out[ j ] = col && tr.values[ static_cast< std::size_t >( l.instant[ j ] ) ][ *col ] ? 1 : 0;
                break;
            }
            case op::tt: std::fill( out.begin(), out.end(), 1 ); break;
            case op::ff: break;
            case op::not_:
                for ( std::size_t j = 0; j < n; ++j )
                    out[ j ] = kid( 0 )[ j ] ? 0 : 1;
                break;
            case op::and_:
            case op::or_:
            {
                const bool conj = nd.kind == op::and_;
                for ( std::size_t j = 0; j < n; ++j )
                {
                    bool acc = conj;
                    for ( std::size_t i = 0; i < nd.kids.size(); ++i )
                        acc = conj ? ( acc && kid( i )[ j ] ) : ( acc || kid( i )[ j ] );
                    out[ j ] = acc ? 1 : 0;
                }
                break;
            }
            case op::implies:
                for ( std::size_t j = 0; j < n; ++j )
                    out[ j ] = ( !kid( 0 )[ j ] || kid( 1 )[ j ] ) ? 1 : 0;
                break;
            case op::iff:
                for ( std::size_t j = 0; j < n; ++j )
                    out[ j ] = ( ( kid( 0 )[ j ] != 0 ) == ( kid( 1 )[ j ] != 0 ) ) ? 1 : 0;
                break;
            case op::next:
                for ( std::size_t j = 0; j < n; ++j )
                    out[ j ] = kid( 0 )[ static_cast< std::size_t >( l.succ[ j ] ) ];
                break;
            case op::yesterday:
            case op::zeta:
            {
                const std::uint8_t origin = nd.kind == op::zeta && mono ? 1 : 0;
                for ( std::size_t j = 0; j < n; ++j )
                    out[ j ] = l.pred[ j ] < 0 ? origin : kid( 0 )[ static_cast< std::size_t >( l.pred[ j ] ) ];
                break;
            }
            case op::until:
            case op::release:
            {
                // until = b | (a & X until), least; release = b & (a | X release), greatest
                const bool lfp = nd.kind == op::until;
                const auto& a = kid( 0 );
                const auto& b = kid( 1 );
                std::fill( out.begin(), out.end(), lfp ? 0 : 1 );
                for ( int pass = 0; pass < 2; ++pass )
                    for ( std::size_t j = n; j-- > 0; )
                    {
                        const bool nxt = out[ static_cast< std::size_t >( l.succ[ j ] ) ] != 0;
                        out[ j ] = lfp ? ( b[ j ] || ( a[ j ] && nxt ) ) : ( b[ j ] && ( a[ j ] || nxt ) );
                    }
                break;
            }
            case op::since:
            case op::trigger:
            {
                const bool lfp = nd.kind == op::since;
                const auto& a = kid( 0 );
                const auto& b = kid( 1 );
                std::fill( out.begin(), out.end(), lfp ? 0 : 1 );
                for ( int pass = 0; pass < 2; ++pass )
                    for ( std::size_t j = 0; j < n; ++j )
                    {
                        // at the mono origin the recursion stops
                        const bool prv = l.pred[ j ] < 0 ? !lfp : out[ static_cast< std::size_t >( l.pred[ j ] ) ] != 0;
                        out[ j ] = lfp ? ( b[ j ] || ( a[ j ] && prv ) ) : ( b[ j ] && ( a[ j ] || prv ) );
                    }
                break;
            }
            default:
                throw error( "oracle needs a core formula, found " + nd.f.str() );
            }
        }
        return v;
    }
};

/// Exact truth value of core formula `f` at window instant `position`.
inline bool eval_lasso( const lasso_trace& tr, const formula& f, int position )
{
    return lasso_oracle( f ).eval( tr, position );
}

} // namespace plbmc
