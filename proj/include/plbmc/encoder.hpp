#pragma once

#include "circuit.hpp"
#include "desugar.hpp"
#include "error.hpp"
#include "formula.hpp"
#include "frontend.hpp"
#include "history.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace plbmc
{

/// What gets encoded: a root formula asserted once, formulas asserted at every
/// position, and atoms that must exist even if nothing mentions them.
/// Everything is already desugared and lowered.
struct encode_input
{
    formula root = tt();
    std::vector< formula > globals;
    std::vector< formula > atoms;
    partial_history history;
};

struct encode_options
{
    int k = 2;
    engine_kind engine = engine_kind::mono;
    bool loop_free = false;
};

/// The encoder's closure node: a subformula of the normalized fragment
/// {atom, true, false, not, and, or, next, yesterday, until, since}.
struct closure_node
{
    formula f;
    op kind = op::tt;
    std::vector< int > kids;
    int future_depth = 0;
    int past_depth = 0;
    int first_var = 0;   // id of copy `-past_copies`, instant 0
    int past_copies = 0; // copies -past_copies..-1 (bi engine, leftwards)
    int future_copies = 0; // copies 1..future_copies (rightwards)
};

/// Rewrites a core formula into the fragment the encoder works on. Release,
/// trigger, zeta, implication and equivalence become not/until/since/yesterday.
inline formula normalize( const formula& f, engine_kind engine )
{
    const auto n = [ engine ]( const formula& g ) { return normalize( g, engine ); };
    const auto neg = []( const formula& g ) { return g.kind() == op::not_ ? g.kid( 0 ) : lnot( g ); };
    switch ( f.kind() )
    {
    case op::atom:
    case op::tt:
    case op::ff:
        return f;
    case op::not_:
        return neg( n( f.kid( 0 ) ) );
    case op::and_:
    case op::or_:
    {
        std::vector< formula > kids;
        for ( const auto& k : f.kids() )
            kids.push_back( n( k ) );
        if ( kids.empty() )
            return f.kind() == op::and_ ? tt() : ff();
        if ( kids.size() == 1 )
            return kids[ 0 ];
        return f.kind() == op::and_ ? land( std::move( kids ) ) : lor( std::move( kids ) );
    }
    case op::implies:
        return lor( { neg( n( f.kid( 0 ) ) ), n( f.kid( 1 ) ) } );
    case op::iff:
    {
        const auto a = n( f.kid( 0 ) );
        const auto b = n( f.kid( 1 ) );
        return land( { lor( { neg( a ), b } ), lor( { a, neg( b ) } ) } );
    }
    case op::next:
        return next( n( f.kid( 0 ) ) );
    case op::yesterday:
        return yesterday( n( f.kid( 0 ) ) );
    case op::zeta:
        if ( engine == engine_kind::bi )
            return yesterday( n( f.kid( 0 ) ) );
        return neg( yesterday( neg( n( f.kid( 0 ) ) ) ) );
    case op::until:
        return until( n( f.kid( 0 ) ), n( f.kid( 1 ) ) );
    case op::since:
        return since( n( f.kid( 0 ) ), n( f.kid( 1 ) ) );
    case op::release:
        return neg( until( neg( n( f.kid( 0 ) ) ), neg( n( f.kid( 1 ) ) ) ) );
    case op::trigger:
        return neg( since( neg( n( f.kid( 0 ) ) ), neg( n( f.kid( 1 ) ) ) ) );
    default:
        break;
    }
    throw spec_error( "encoder received a non-core operator: " + f.str(), f.loc() );
}

/// Bijection between (subformula, instant) and solver variables, plus the
/// loop selectors. Also holds the closure partitions.
class var_map
{
public:
    enum class var_kind
    {
        subformula,
        loop_selector,
        past_selector,
        boundary,
    };

    struct var_info
    {
        var_kind kind = var_kind::subformula;
        int node = -1;
        int copy = 0;
        int instant = 0;
    };

    var_map() = default;

    [[nodiscard]] int k() const { return _opts.k; }
    [[nodiscard]] const encode_options& options() const { return _opts; }
    [[nodiscard]] int numvar() const { return static_cast< int >( _info.size() ) - 1; }
    [[nodiscard]] const std::vector< closure_node >& closure() const { return _nodes; }
    [[nodiscard]] const closure_node& node( int i ) const { return _nodes[ static_cast< std::size_t >( i ) ]; }

    [[nodiscard]] const std::vector< int >& props() const { return _props; }
    [[nodiscard]] const std::vector< int >& bools() const { return _bools; }
    [[nodiscard]] const std::vector< int >& futures() const { return _futures; }
    [[nodiscard]] const std::vector< int >& pasts() const { return _pasts; }

    /// L_i for i in 1..k (empty in loop-free mode).
    [[nodiscard]] const std::vector< int >& loop_selectors() const { return _loop_sel; }
    /// P_p for p in 0..k-1 (bi engine only).
    [[nodiscard]] const std::vector< int >& past_selectors() const { return _past_sel; }
    [[nodiscard]] int loop_var( int i ) const { return _loop_sel.at( static_cast< std::size_t >( i - 1 ) ); }
    [[nodiscard]] int pool_var( int p ) const { return _past_sel.at( static_cast< std::size_t >( p ) ); }

    [[nodiscard]] int root_node() const { return _root; }
    [[nodiscard]] int root_instant() const { return _opts.engine == engine_kind::bi ? 0 : 1; }
    [[nodiscard]] int root_var() const { return var_of( _root, 0, root_instant() ); }

    [[nodiscard]] std::optional< int > find( const formula& f ) const
    {
        auto it = _index.find( normalize( f, _opts.engine ) );
        if ( it == _index.end() )
            return std::nullopt;
        return it->second;
    }

    /// Variable of `f` at concrete instant `t`.
    [[nodiscard]] int call( const formula& f, int t ) const
    {
        if ( t < 0 || t > k() )
            throw error( "instant " + std::to_string( t ) + " outside [0, " + std::to_string( k() ) + "]" );
        auto n = find( f );
        if ( !n )
            throw error( "formula not in the closure: " + f.str() );
        return var_of( *n, 0, t );
    }

    /// Inverse of call(): the (normalized) subformula and instant of `x`.
    [[nodiscard]] std::pair< formula, int > back_call( int x ) const
    {
        const auto& info = describe( x );
        if ( info.kind != var_kind::subformula )
            throw error( "variable " + std::to_string( x ) + " is not a subformula variable" );
        return { _nodes[ static_cast< std::size_t >( info.node ) ].f, info.instant };
    }

    [[nodiscard]] int back_call_time( int x ) const { return describe( x ).instant; }

    [[nodiscard]] const var_info& describe( int x ) const
    {
        if ( x < 1 || x > numvar() )
            throw error( "unknown variable " + std::to_string( x ) );
        return _info[ static_cast< std::size_t >( x ) ];
    }

    /// Variable of closure node `n`, copy `c` (clamped to the node's range),
    /// instant `t`.
    [[nodiscard]] int var_of( int n, int c, int t ) const
    {
        const auto& nd = _nodes[ static_cast< std::size_t >( n ) ];
        c = std::clamp( c, -nd.past_copies, nd.future_copies );
        return nd.first_var + ( c + nd.past_copies ) * ( k() + 1 ) + t;
    }

private:
    friend class encoder;

    encode_options _opts;
    std::vector< closure_node > _nodes;
    std::unordered_map< formula, int, formula_hash > _index;
    std::vector< var_info > _info{ var_info{} };
    std::vector< int > _props, _bools, _futures, _pasts;
    std::vector< int > _loop_sel, _past_sel;
    int _root = -1;

    int intern( const formula& f )
    {
        if ( auto it = _index.find( f ); it != _index.end() )
            return it->second;
        closure_node n;
        n.f = f;
        n.kind = f.kind();
        for ( const auto& k : f.kids() )
            n.kids.push_back( intern( k ) );
        for ( int kid : n.kids )
        {
            n.future_depth = std::max( n.future_depth, _nodes[ static_cast< std::size_t >( kid ) ].future_depth );
            n.past_depth = std::max( n.past_depth, _nodes[ static_cast< std::size_t >( kid ) ].past_depth );
        }
        if ( n.kind == op::next || n.kind == op::until )
            ++n.future_depth;
        if ( n.kind == op::yesterday || n.kind == op::since )
            ++n.past_depth;
        const int id = static_cast< int >( _nodes.size() );
        switch ( n.kind )
        {
        case op::atom: _props.push_back( id ); break;
        case op::next:
        case op::until: _futures.push_back( id ); break;
        case op::yesterday:
        case op::since: _pasts.push_back( id ); break;
        default: _bools.push_back( id ); break;
        }
        _nodes.push_back( std::move( n ) );
        _index.emplace( f, id );
        return id;
    }

    int fresh( var_info info )
    {
        _info.push_back( info );
        return static_cast< int >( _info.size() ) - 1;
    }
};

/// The encoded problem: variable map plus a circuit whose root must be true.
struct encoded_problem
{
    var_map vm;
    circuit circ;
    circuit::ref root = circuit::true_ref;
    encode_input input; // kept so the problem can be re-encoded (loop-free)

    [[nodiscard]] engine_kind engine() const { return vm.options().engine; }
    [[nodiscard]] bool loop_free() const { return vm.options().loop_free; }
};

/// Bounded lasso encoding of PLTL with past.
///
/// Instants 0..k form the concrete window. L_i says the successor of k is i;
/// in the bi engine P_p says the predecessor of 0 is p. A subformula whose
/// value is not yet periodic after one period gets virtual copies of the
/// periods: its past depth many to the right, and (bi) its future depth many
/// to the left. The outermost copy wraps on itself; eventuality constraints
/// pick the least fixpoint there for until (rightwards) and since (leftwards).
class encoder
{
public:
    encoder( encode_input input, encode_options opts ) : _input( std::move( input ) )
    {
        _vm._opts = opts;
        if ( opts.loop_free && opts.engine != engine_kind::mono )
            throw error( "loop-free mode requires the mono engine" );
        if ( opts.loop_free ? opts.k < 1 : opts.k < 2 )
            throw error( "bound k=" + std::to_string( opts.k ) + " too small: need k >= " + ( opts.loop_free ? "1" : "2" ) );
    }

    encoded_problem run()
    {
        build_closure();
        allocate();
        constrain();
        encoded_problem p;
        p.root = _circ.land( _constraints );
        p.vm = std::move( _vm );
        p.circ = std::move( _circ );
        p.input = std::move( _input );
        return p;
    }

private:
    encode_input _input;
    var_map _vm;
    circuit _circ;
    std::vector< circuit::ref > _constraints;
    std::vector< int > _globals;
    std::vector< circuit::ref > _in_loop, _in_past;
    std::unordered_map< int, circuit::ref > _boundary;

    [[nodiscard]] int k() const { return _vm.k(); }
    [[nodiscard]] bool bi() const { return _vm._opts.engine == engine_kind::bi; }
    [[nodiscard]] bool loop_free() const { return _vm._opts.loop_free; }

    void build_closure()
    {
        const auto engine = _vm._opts.engine;
        for ( const auto& a : _input.atoms )
            _vm.intern( normalize( a, engine ) );
        for ( const auto& fact : _input.history.facts )
            _vm.intern( fact.atom );
        for ( const auto& g : _input.globals )
            _globals.push_back( _vm.intern( normalize( g, engine ) ) );
        _vm._root = _vm.intern( normalize( _input.root, engine ) );
    }

    void allocate()
    {
        // Atoms first, so the low variable ids are the state.
        std::vector< int > order = _vm._props;
        for ( int i = 0; i < static_cast< int >( _vm._nodes.size() ); ++i )
            if ( _vm._nodes[ static_cast< std::size_t >( i ) ].kind != op::atom )
                order.push_back( i );

        for ( int id : order )
        {
            auto& n = _vm._nodes[ static_cast< std::size_t >( id ) ];
            if ( !loop_free() )
            {
                n.future_copies = n.past_depth;
                n.past_copies = bi() ? n.future_depth : 0;
            }
            n.first_var = _vm.numvar() + 1;
            for ( int c = -n.past_copies; c <= n.future_copies; ++c )
                for ( int t = 0; t <= k(); ++t )
                    _vm.fresh( { var_map::var_kind::subformula, id, c, t } );
        }
        if ( !loop_free() )
        {
            for ( int i = 1; i <= k(); ++i )
                _vm._loop_sel.push_back( _vm.fresh( { var_map::var_kind::loop_selector, -1, 0, i } ) );
            if ( bi() )
                for ( int p = 0; p < k(); ++p )
                    _vm._past_sel.push_back( _vm.fresh( { var_map::var_kind::past_selector, -1, 0, p } ) );
        }
    }

    circuit::ref val( int n, int c, int t ) { return _circ.var( _vm.var_of( n, c, t ) ); }
    circuit::ref sel_loop( int i ) { return _circ.var( _vm.loop_var( i ) ); }
    circuit::ref sel_pool( int p ) { return _circ.var( _vm.pool_var( p ) ); }

    // Value of node `n` at the successor of (copy c, instant t).
    circuit::ref succ( int n, int c, int t )
    {
        if ( c >= 0 )
        {
            if ( t < k() )
                return val( n, c, t + 1 );
            if ( loop_free() )
                return boundary( n );
            std::vector< circuit::ref > alts;
            for ( int i = 1; i <= k(); ++i )
                alts.push_back( _circ.land( sel_loop( i ), val( n, c + 1, i ) ) );
            return _circ.lor( std::move( alts ) );
        }
        if ( t < k() )
            return _circ.ite( sel_pool( t ), val( n, c + 1, 0 ), val( n, c, t + 1 ) );
        return val( n, c + 1, 0 );
    }

    // Value of node `n` at the predecessor of (copy c, instant t).
    circuit::ref pred( int n, int c, int t )
    {
        if ( c <= 0 )
        {
            if ( t > 0 )
                return val( n, c, t - 1 );
            if ( !bi() )
                return circuit::false_ref;
            std::vector< circuit::ref > alts;
            for ( int p = 0; p < k(); ++p )
                alts.push_back( _circ.land( sel_pool( p ), val( n, c - 1, p ) ) );
            return _circ.lor( std::move( alts ) );
        }
        if ( t > 0 )
            return _circ.ite( sel_loop( t ), val( n, c - 1, k() ), val( n, c, t - 1 ) );
        return val( n, c - 1, k() );
    }

    // Loop-free mode: what lies beyond instant k is unconstrained.
    circuit::ref boundary( int n )
    {
        auto it = _boundary.find( n );
        if ( it != _boundary.end() )
            return it->second;
        const auto r = _circ.var( _vm.fresh( { var_map::var_kind::boundary, n, 0, k() + 1 } ) );
        _boundary.emplace( n, r );
        return r;
    }

    void require( circuit::ref r ) { _constraints.push_back( r ); }

    void constrain()
    {
        if ( !loop_free() )
        {
            exactly_one( _vm._loop_sel );
            circuit::ref acc = circuit::false_ref;
            _in_loop.assign( static_cast< std::size_t >( k() ) + 1, circuit::false_ref );
            for ( int t = 1; t <= k(); ++t )
                _in_loop[ static_cast< std::size_t >( t ) ] = acc = _circ.lor( acc, sel_loop( t ) );
            if ( bi() )
            {
                exactly_one( _vm._past_sel );
                acc = circuit::false_ref;
                _in_past.assign( static_cast< std::size_t >( k() ) + 1, circuit::false_ref );
                for ( int t = k() - 1; t >= 0; --t )
                    _in_past[ static_cast< std::size_t >( t ) ] = acc = _circ.lor( acc, sel_pool( t ) );
            }
        }

        for ( int id = 0; id < static_cast< int >( _vm._nodes.size() ); ++id )
            define( id );

        for ( int g : _globals )
            assert_everywhere( g );

        require( val( _vm._root, 0, _vm.root_instant() ) );

        for ( const auto& fact : _input.history.facts )
        {
            if ( fact.instant < 0 || fact.instant > k() )
                throw error( "history fact at time " + std::to_string( fact.instant ) + " outside [0, " + std::to_string( k() ) + "]" );
            const auto v = val( *_vm.find( fact.atom ), 0, fact.instant );
            require( fact.polarity ? v : circuit::negate( v ) );
        }
        if ( _input.history.loop )
        {
            const int i = *_input.history.loop;
            if ( loop_free() || i < 1 || i > k() )
                throw error( "history **LOOP** at time " + std::to_string( i ) + " is not a valid loop start" );
            require( sel_loop( i ) );
        }
        if ( _input.history.pool )
        {
            const int p = *_input.history.pool;
            if ( !bi() || p < 0 || p >= k() )
                throw error( "history **POOL** at time " + std::to_string( p ) + " is not a valid past loop start" );
            require( sel_pool( p ) );
        }

        if ( loop_free() )
            all_states_distinct();
    }

    void exactly_one( const std::vector< int >& vars )
    {
        std::vector< circuit::ref > any;
        for ( int v : vars )
            any.push_back( _circ.var( v ) );
        require( _circ.lor( any ) );
        for ( std::size_t i = 0; i < vars.size(); ++i )
            for ( std::size_t j = i + 1; j < vars.size(); ++j )
                require( _circ.lor( circuit::negate( any[ i ] ), circuit::negate( any[ j ] ) ) );
    }

    void define( int id )
    {
        const auto& n = _vm._nodes[ static_cast< std::size_t >( id ) ];
        if ( n.kind == op::atom )
            return;
        const auto kids = n.kids;
        const auto kind = n.kind;
        const int lo = -n.past_copies;
        const int hi = n.future_copies;
        for ( int c = lo; c <= hi; ++c )
            for ( int t = 0; t <= k(); ++t )
            {
                circuit::ref def = circuit::true_ref;
                switch ( kind )
                {
                case op::tt: def = circuit::true_ref; break;
                case op::ff: def = circuit::false_ref; break;
                case op::not_: def = circuit::negate( val( kids[ 0 ], c, t ) ); break;
                case op::and_:
                case op::or_:
                {
                    std::vector< circuit::ref > ks;
                    for ( int kid : kids )
                        ks.push_back( val( kid, c, t ) );
                    def = kind == op::and_ ? _circ.land( ks ) : _circ.lor( ks );
                    break;
                }
                case op::next: def = succ( kids[ 0 ], c, t ); break;
                case op::yesterday: def = pred( kids[ 0 ], c, t ); break;
                case op::until:
                    def = _circ.lor( val( kids[ 1 ], c, t ), _circ.land( val( kids[ 0 ], c, t ), succ( id, c, t ) ) );
                    break;
                case op::since:
                    def = _circ.lor( val( kids[ 1 ], c, t ), _circ.land( val( kids[ 0 ], c, t ), pred( id, c, t ) ) );
                    break;
                default:
                    throw error( "unexpected closure node" );
                }
                require( _circ.iff( val( id, c, t ), def ) );
            }

        if ( loop_free() )
            return;
        if ( kind == op::until )
        {
            // In the outermost future copy the loop is circular: until needs
            // its witness inside the loop.
            std::vector< circuit::ref > witness;
            for ( int t = 1; t <= k(); ++t )
                witness.push_back( _circ.land( _in_loop[ static_cast< std::size_t >( t ) ], val( kids[ 1 ], hi, t ) ) );
            require( _circ.implies( val( id, hi, k() ), _circ.lor( witness ) ) );
        }
        if ( kind == op::since && bi() )
        {
            std::vector< circuit::ref > witness;
            for ( int t = 0; t < k(); ++t )
                witness.push_back( _circ.land( _in_past[ static_cast< std::size_t >( t ) ], val( kids[ 1 ], lo, t ) ) );
            require( _circ.implies( val( id, lo, 0 ), _circ.lor( witness ) ) );
        }
    }

    void assert_everywhere( int id )
    {
        const auto& n = _vm._nodes[ static_cast< std::size_t >( id ) ];
        for ( int c = -n.past_copies; c <= n.future_copies; ++c )
            for ( int t = 0; t <= k(); ++t )
            {
                if ( c == 0 )
                    require( val( id, 0, t ) );
                else if ( c > 0 )
                    require( _circ.implies( _in_loop[ static_cast< std::size_t >( t ) ], val( id, c, t ) ) );
                else
                    require( _circ.implies( _in_past[ static_cast< std::size_t >( t ) ], val( id, c, t ) ) );
            }
    }

    void all_states_distinct()
    {
        for ( int s = 0; s <= k(); ++s )
            for ( int t = s + 1; t <= k(); ++t )
            {
                std::vector< circuit::ref > differs;
                for ( int a : _vm._props )
                    differs.push_back( _circ.lxor( val( a, 0, s ), val( a, 0, t ) ) );
                require( _circ.lor( std::move( differs ) ) );
            }
    }
};

/// Mono-infinite (time domain N) encoding at bound k; root asserted at 1.
inline encoded_problem encode_mono( encode_input input, int k )
{
    return encoder( std::move( input ), { k, engine_kind::mono, false } ).run();
}

/// Bi-infinite (time domain Z) encoding at bound k; root asserted at 0.
inline encoded_problem encode_bi( encode_input input, int k )
{
    return encoder( std::move( input ), { k, engine_kind::bi, false } ).run();
}

inline encoded_problem encode( encode_input input, encode_options opts )
{
    return encoder( std::move( input ), opts ).run();
}

/// Re-encodes a mono problem without loop machinery, requiring the k+1
/// states of the window to be pairwise distinct.
inline encoded_problem add_loop_free( const encoded_problem& problem )
{
    if ( problem.engine() != engine_kind::mono )
        throw error( "loop-free mode requires the mono engine" );
    return encoder( problem.input, { problem.vm.k(), engine_kind::mono, true } ).run();
}

} // namespace plbmc
