#pragma once

#include "cnf.hpp"
#include "error.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <vector>

namespace plbmc
{

/// Conflict-driven clause-learning SAT solver: two watched literals, first-UIP
/// learning with local minimization, VSIDS, phase saving, Luby restarts and
/// activity-based learnt clause deletion.
class cdcl_solver
{
public:
    explicit cdcl_solver( int num_vars ) { grow( num_vars ); }

    /// Adds a clause in DIMACS literals. Must be called at decision level 0.
    void add_clause( std::vector< int > dimacs )
    {
        if ( _unsat )
            return;
        if ( !normalize_clause( dimacs ) )
            return;
        std::vector< lit > c;
        for ( int d : dimacs )
        {
            const int v = std::abs( d ) - 1;
            if ( v >= num_vars() )
                grow( v + 1 );
            const lit l = make_lit( v, d < 0 );
            const auto val = value( l );
            if ( val == l_true )
                return; // satisfied at level 0
            if ( val == l_false )
                continue;
            c.push_back( l );
        }
        if ( c.empty() )
        {
            _unsat = true;
            return;
        }
        if ( c.size() == 1 )
        {
            enqueue( c[ 0 ], no_reason );
            if ( propagate() != no_reason )
                _unsat = true;
            return;
        }
        attach( new_clause( std::move( c ), false ) );
    }

    /// Returns a verified result. `conflict_limit` < 0 means unlimited;
    /// exceeding the limit throws solver_error.
    sat_result solve( long long conflict_limit = -1 )
    {
        sat_result res;
        if ( _unsat )
            return res;
        if ( propagate() != no_reason )
        {
            _unsat = true;
            return res;
        }

        long long conflicts = 0;
        for ( int restart = 0;; ++restart )
        {
            const long long budget = 100 * luby( restart );
            const auto status = search( budget, conflicts, conflict_limit );
            if ( status == l_false )
            {
                _unsat = true;
                return res;
            }
            if ( status == l_true )
            {
                res.answer = verdict::sat;
                std::vector< bool > model( static_cast< std::size_t >( num_vars() ) + 1, false );
                for ( int v = 0; v < num_vars(); ++v )
                    model[ static_cast< std::size_t >( v ) + 1 ] = _assign[ static_cast< std::size_t >( v ) ] == l_true;
                res.model = std::move( model );
                cancel_until( 0 );
                return res;
            }
            cancel_until( 0 );
        }
    }

    [[nodiscard]] int num_vars() const { return static_cast< int >( _assign.size() ); }

private:
    using lit = int; // 2 * var + negated
    using cref = int;
    static constexpr cref no_reason = -1;
    static constexpr std::int8_t l_true = 1;
    static constexpr std::int8_t l_false = 0;
    static constexpr std::int8_t l_undef = -1;

    struct clause
    {
        std::vector< lit > lits;
        bool learnt = false;
        bool deleted = false;
        double activity = 0;
    };

    struct watcher
    {
        cref c;
        lit blocker;
    };

    std::vector< clause > _clauses;
    std::vector< cref > _learnts;
    std::vector< std::vector< watcher > > _watches; // by literal that became false
    std::vector< std::int8_t > _assign;
    std::vector< int > _level;
    std::vector< cref > _reason;
    std::vector< bool > _phase;
    std::vector< double > _activity;
    std::vector< char > _seen;
    std::vector< lit > _trail;
    std::vector< int > _trail_lim;
    std::size_t _qhead = 0;
    double _var_inc = 1;
    double _cla_inc = 1;
    double _max_learnts = 0;
    bool _unsat = false;

    // Binary max-heap of unassigned variables keyed by activity.
    std::vector< int > _heap;
    std::vector< int > _heap_pos;

    static lit make_lit( int v, bool neg ) { return 2 * v + ( neg ? 1 : 0 ); }
    static int var( lit l ) { return l >> 1; }
    static bool sign( lit l ) { return ( l & 1 ) != 0; }
    static lit neg( lit l ) { return l ^ 1; }

    [[nodiscard]] std::int8_t value( lit l ) const
    {
        const auto a = _assign[ static_cast< std::size_t >( var( l ) ) ];
        if ( a == l_undef )
            return l_undef;
        return ( a == l_true ) != sign( l ) ? l_true : l_false;
    }

    [[nodiscard]] int decision_level() const { return static_cast< int >( _trail_lim.size() ); }

    void grow( int n )
    {
        const auto old = _assign.size();
        const auto sz = static_cast< std::size_t >( n );
        _assign.resize( sz, l_undef );
        _level.resize( sz, 0 );
        _reason.resize( sz, no_reason );
        _phase.resize( sz, false );
        _activity.resize( sz, 0 );
        _seen.resize( sz, 0 );
        _heap_pos.resize( sz, -1 );
        _watches.resize( 2 * sz );
        for ( auto v = old; v < sz; ++v )
            heap_insert( static_cast< int >( v ) );
    }

    cref new_clause( std::vector< lit > lits, bool learnt )
    {
        _clauses.push_back( clause{ std::move( lits ), learnt, false, 0 } );
        return static_cast< cref >( _clauses.size() - 1 );
    }

    void attach( cref c )
    {
        const auto& ls = _clauses[ static_cast< std::size_t >( c ) ].lits;
        _watches[ static_cast< std::size_t >( neg( ls[ 0 ] ) ) ].push_back( { c, ls[ 1 ] } );
        _watches[ static_cast< std::size_t >( neg( ls[ 1 ] ) ) ].push_back( { c, ls[ 0 ] } );
    }

    void enqueue( lit l, cref reason )
    {
        const auto v = static_cast< std::size_t >( var( l ) );
        _assign[ v ] = sign( l ) ? l_false : l_true;
        _level[ v ] = decision_level();
        _reason[ v ] = reason;
        _trail.push_back( l );
    }

    cref propagate()
    {
        cref conflict = no_reason;
        while ( _qhead < _trail.size() )
        {
            const lit p = _trail[ _qhead++ ]; // p is true; clauses watching !p
            auto& ws = _watches[ static_cast< std::size_t >( p ) ];
            std::size_t i = 0, j = 0;
            const lit false_lit = neg( p );
            while ( i < ws.size() )
            {
                const watcher w = ws[ i ];
                if ( value( w.blocker ) == l_true )
                {
                    ws[ j++ ] = ws[ i++ ];
                    continue;
                }
                auto& c = _clauses[ static_cast< std::size_t >( w.c ) ];
                if ( c.deleted )
                {
                    ++i;
                    continue;
                }
                auto& ls = c.lits;
                if ( ls[ 0 ] == false_lit )
                    std::swap( ls[ 0 ], ls[ 1 ] );
                ++i;
                const lit first = ls[ 0 ];
                if ( first != w.blocker && value( first ) == l_true )
                {
                    ws[ j++ ] = { w.c, first };
                    continue;
                }
                bool moved = false;
                for ( std::size_t k = 2; k < ls.size(); ++k )
                    if ( value( ls[ k ] ) != l_false )
                    {
                        std::swap( ls[ 1 ], ls[ k ] );
                        _watches[ static_cast< std::size_t >( neg( ls[ 1 ] ) ) ].push_back( { w.c, first } );
                        moved = true;
                        break;
                    }
                if ( moved )
                    continue;
                ws[ j++ ] = { w.c, first };
                if ( value( first ) == l_false )
                {
                    conflict = w.c;
                    _qhead = _trail.size();
                    while ( i < ws.size() )
                        ws[ j++ ] = ws[ i++ ];
                }
                else
                    enqueue( first, w.c );
            }
            ws.resize( j );
            if ( conflict != no_reason )
                break;
        }
        return conflict;
    }

    void bump_var( int v )
    {
        auto& a = _activity[ static_cast< std::size_t >( v ) ];
        a += _var_inc;
        if ( a > 1e100 )
        {
            for ( auto& x : _activity )
                x *= 1e-100;
            _var_inc *= 1e-100;
        }
        if ( _heap_pos[ static_cast< std::size_t >( v ) ] >= 0 )
            heap_up( _heap_pos[ static_cast< std::size_t >( v ) ] );
    }

    void bump_clause( clause& c )
    {
        c.activity += _cla_inc;
        if ( c.activity > 1e20 )
        {
            for ( cref l : _learnts )
                _clauses[ static_cast< std::size_t >( l ) ].activity *= 1e-20;
            _cla_inc *= 1e-20;
        }
    }

    // First-UIP conflict analysis. Returns the learnt clause (asserting
    // literal first) and the backtrack level.
    std::pair< std::vector< lit >, int > analyze( cref conflict )
    {
        std::vector< lit > learnt{ 0 };
        int pending = 0;
        lit p = -1;
        std::size_t index = _trail.size();
        cref reason = conflict;
        do
        {
            auto& c = _clauses[ static_cast< std::size_t >( reason ) ];
            if ( c.learnt )
                bump_clause( c );
            for ( std::size_t k = ( p == -1 ? 0 : 1 ); k < c.lits.size(); ++k )
            {
                const lit q = c.lits[ k ];
                const auto v = static_cast< std::size_t >( var( q ) );
                if ( _seen[ v ] || _level[ v ] == 0 )
                    continue;
                _seen[ v ] = 1;
                bump_var( var( q ) );
                if ( _level[ v ] >= decision_level() )
                    ++pending;
                else
                    learnt.push_back( q );
            }
            while ( !_seen[ static_cast< std::size_t >( var( _trail[ --index ] ) ) ] )
                ;
            p = _trail[ index ];
            reason = _reason[ static_cast< std::size_t >( var( p ) ) ];
            _seen[ static_cast< std::size_t >( var( p ) ) ] = 0;
            --pending;
            // Reason clauses keep their implied literal at position 0.
            if ( pending > 0 )
                assert_reason_front( reason, p );
        } while ( pending > 0 );
        learnt[ 0 ] = neg( p );

        // Local minimization: drop literals implied by the rest.
        std::vector< lit > kept{ learnt[ 0 ] };
        for ( std::size_t k = 1; k < learnt.size(); ++k )
        {
            const auto v = static_cast< std::size_t >( var( learnt[ k ] ) );
            const cref r = _reason[ v ];
            bool redundant = r != no_reason;
            if ( redundant )
            {
                const auto& rl = _clauses[ static_cast< std::size_t >( r ) ].lits;
                for ( std::size_t m = 1; m < rl.size(); ++m )
                {
                    const auto u = static_cast< std::size_t >( var( rl[ m ] ) );
                    if ( !_seen[ u ] && _level[ u ] > 0 )
                    {
                        redundant = false;
                        break;
                    }
                }
            }
            if ( !redundant )
                kept.push_back( learnt[ k ] );
        }
        for ( std::size_t k = 1; k < learnt.size(); ++k )
            _seen[ static_cast< std::size_t >( var( learnt[ k ] ) ) ] = 0;

        int back = 0;
        if ( kept.size() > 1 )
        {
            std::size_t best = 1;
            for ( std::size_t k = 2; k < kept.size(); ++k )
                if ( _level[ static_cast< std::size_t >( var( kept[ k ] ) ) ] > _level[ static_cast< std::size_t >( var( kept[ best ] ) ) ] )
                    best = k;
            std::swap( kept[ 1 ], kept[ best ] );
            back = _level[ static_cast< std::size_t >( var( kept[ 1 ] ) ) ];
        }
        return { std::move( kept ), back };
    }

    void assert_reason_front( cref r, lit p )
    {
        if ( r == no_reason )
            return;
        auto& ls = _clauses[ static_cast< std::size_t >( r ) ].lits;
        if ( ls[ 0 ] != p )
            for ( std::size_t k = 1; k < ls.size(); ++k )
                if ( ls[ k ] == p )
                {
                    std::swap( ls[ 0 ], ls[ k ] );
                    break;
                }
    }

    void cancel_until( int level )
    {
        if ( decision_level() <= level )
            return;
        const auto stop = static_cast< std::size_t >( _trail_lim[ static_cast< std::size_t >( level ) ] );
        for ( auto k = _trail.size(); k > stop; --k )
        {
            const lit l = _trail[ k - 1 ];
            const auto v = static_cast< std::size_t >( var( l ) );
            _phase[ v ] = !sign( l );
            _assign[ v ] = l_undef;
            _reason[ v ] = no_reason;
            if ( _heap_pos[ v ] < 0 )
                heap_insert( var( l ) );
        }
        _trail.resize( stop );
        _trail_lim.resize( static_cast< std::size_t >( level ) );
        _qhead = _trail.size();
    }

    std::optional< lit > pick_branch()
    {
        while ( !_heap.empty() )
        {
            const int v = heap_pop();
            if ( _assign[ static_cast< std::size_t >( v ) ] == l_undef )
                return make_lit( v, !_phase[ static_cast< std::size_t >( v ) ] );
        }
        return std::nullopt;
    }

    void reduce_learnts()
    {
        std::sort( _learnts.begin(), _learnts.end(), [ this ]( cref a, cref b ) {
            return _clauses[ static_cast< std::size_t >( a ) ].activity < _clauses[ static_cast< std::size_t >( b ) ].activity;
        } );
        std::vector< cref > keep;
        const std::size_t half = _learnts.size() / 2;
        for ( std::size_t k = 0; k < _learnts.size(); ++k )
        {
            auto& c = _clauses[ static_cast< std::size_t >( _learnts[ k ] ) ];
            const auto v0 = static_cast< std::size_t >( var( c.lits[ 0 ] ) );
            const bool locked = _reason[ v0 ] == _learnts[ k ] && value( c.lits[ 0 ] ) == l_true;
            if ( k < half && c.lits.size() > 2 && !locked )
            {
                c.deleted = true;
                c.lits.clear();
                c.lits.shrink_to_fit();
            }
            else
                keep.push_back( _learnts[ k ] );
        }
        _learnts = std::move( keep );
        // Purge watchers of deleted clauses.
        for ( auto& ws : _watches )
            ws.erase( std::remove_if( ws.begin(), ws.end(),
                                      [ this ]( const watcher& w ) { return _clauses[ static_cast< std::size_t >( w.c ) ].deleted; } ),
                      ws.end() );
    }

    std::int8_t search( long long budget, long long& conflicts, long long limit )
    {
        if ( _max_learnts == 0 )
            _max_learnts = std::max< double >( 1000.0, static_cast< double >( _clauses.size() ) / 3.0 );
        long long local = 0;
        for ( ;; )
        {
            const cref conflict = propagate();
            if ( conflict != no_reason )
            {
                ++conflicts;
                ++local;
                if ( limit >= 0 && conflicts > limit )
                    throw solver_error( "embedded solver exceeded its conflict limit (" + std::to_string( limit ) + ")" );
                if ( decision_level() == 0 )
                    return l_false;
                auto [ learnt, back ] = analyze( conflict );
                cancel_until( back );
                if ( learnt.size() == 1 )
                    enqueue( learnt[ 0 ], no_reason );
                else
                {
                    const cref c = new_clause( learnt, true );
                    _learnts.push_back( c );
                    attach( c );
                    bump_clause( _clauses[ static_cast< std::size_t >( c ) ] );
                    enqueue( learnt[ 0 ], c );
                }
                _var_inc /= 0.95;
                _cla_inc /= 0.999;
                continue;
            }
            if ( local >= budget )
                return l_undef;
            if ( static_cast< double >( _learnts.size() ) - static_cast< double >( _trail.size() ) >= _max_learnts )
            {
                reduce_learnts();
                _max_learnts *= 1.1;
            }
            const auto next = pick_branch();
            if ( !next )
                return l_true;
            _trail_lim.push_back( static_cast< int >( _trail.size() ) );
            enqueue( *next, no_reason );
        }
    }

    static long long luby( int i )
    {
        // Luby sequence 1 1 2 1 1 2 4 ...
        long long size = 1;
        int seq = 0;
        while ( size < i + 1 )
        {
            ++seq;
            size = 2 * size + 1;
        }
        long long x = i;
        while ( size - 1 != x )
        {
            size = ( size - 1 ) >> 1;
            --seq;
            x = x % size;
        }
        return 1LL << seq;
    }

    // heap

    bool heap_less( int a, int b ) const
    {
        return _activity[ static_cast< std::size_t >( a ) ] > _activity[ static_cast< std::size_t >( b ) ];
    }

    void heap_insert( int v )
    {
        _heap_pos[ static_cast< std::size_t >( v ) ] = static_cast< int >( _heap.size() );
        _heap.push_back( v );
        heap_up( static_cast< int >( _heap.size() ) - 1 );
    }

    void heap_up( int i )
    {
        const int v = _heap[ static_cast< std::size_t >( i ) ];
        while ( i > 0 )
        {
            const int parent = ( i - 1 ) / 2;
            const int pv = _heap[ static_cast< std::size_t >( parent ) ];
            if ( !heap_less( v, pv ) )
                break;
            _heap[ static_cast< std::size_t >( i ) ] = pv;
            _heap_pos[ static_cast< std::size_t >( pv ) ] = i;
            i = parent;
        }
        _heap[ static_cast< std::size_t >( i ) ] = v;
        _heap_pos[ static_cast< std::size_t >( v ) ] = i;
    }

    void heap_down( int i )
    {
        const int n = static_cast< int >( _heap.size() );
        const int v = _heap[ static_cast< std::size_t >( i ) ];
        for ( ;; )
        {
            int child = 2 * i + 1;
            if ( child >= n )
                break;
            if ( child + 1 < n && heap_less( _heap[ static_cast< std::size_t >( child + 1 ) ], _heap[ static_cast< std::size_t >( child ) ] ) )
                ++child;
            const int cv = _heap[ static_cast< std::size_t >( child ) ];
            if ( !heap_less( cv, v ) )
                break;
            _heap[ static_cast< std::size_t >( i ) ] = cv;
            _heap_pos[ static_cast< std::size_t >( cv ) ] = i;
            i = child;
        }
        _heap[ static_cast< std::size_t >( i ) ] = v;
        _heap_pos[ static_cast< std::size_t >( v ) ] = i;
    }

    int heap_pop()
    {
        const int top = _heap.front();
        const int last = _heap.back();
        _heap.pop_back();
        _heap_pos[ static_cast< std::size_t >( top ) ] = -1;
        if ( !_heap.empty() )
        {
            _heap[ 0 ] = last;
            _heap_pos[ static_cast< std::size_t >( last ) ] = 0;
            heap_down( 0 );
        }
        return top;
    }
};

/// Solves `inst` with the embedded solver. SAT models are checked against
/// every clause before being returned.
inline sat_result solve_embedded( const cnf_instance& inst, long long conflict_limit = -1 )
{
    cdcl_solver s( inst.num_vars );
    for ( const auto& c : inst.clauses )
        s.add_clause( c );
    auto res = s.solve( conflict_limit );
    if ( res.is_sat() && !verify_model( inst, *res.model ) )
        throw solver_error( "embedded solver returned a model that violates the CNF" );
    return res;
}

} // namespace plbmc
