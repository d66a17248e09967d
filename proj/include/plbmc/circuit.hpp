#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace plbmc
{

/// A propositional circuit over solver variables: AND gates with negation on
/// the edges. OR is expressed through De Morgan.
///
/// A `ref` is `2 * node + negated`. Node 0 is the constant TRUE, so ref 0 is
/// true and ref 1 is false.
class circuit
{
public:
    using ref = std::uint32_t;

    static constexpr ref true_ref = 0;
    static constexpr ref false_ref = 1;

    enum class kind : std::uint8_t
    {
        constant,
        var,
        gate,
    };

    struct node
    {
        kind k = kind::constant;
        int var = 0;              // kind::var
        std::vector< ref > kids;  // kind::gate, sorted and distinct
    };

    circuit() { _nodes.push_back( node{} ); }

    [[nodiscard]] static ref negate( ref r ) { return r ^ 1U; }
    [[nodiscard]] static bool is_negated( ref r ) { return ( r & 1U ) != 0; }
    [[nodiscard]] static std::uint32_t index( ref r ) { return r >> 1U; }

    [[nodiscard]] const node& at( ref r ) const { return _nodes[ index( r ) ]; }
    [[nodiscard]] std::size_t size() const { return _nodes.size(); }
    [[nodiscard]] const std::vector< node >& nodes() const { return _nodes; }

    /// Positive literal of solver variable `v` (v >= 1).
    ref var( int v )
    {
        assert( v >= 1 );
        if ( static_cast< std::size_t >( v ) >= _var_nodes.size() )
            _var_nodes.resize( static_cast< std::size_t >( v ) + 1, 0 );
        auto& slot = _var_nodes[ static_cast< std::size_t >( v ) ];
        if ( slot == 0 )
        {
            _nodes.push_back( node{ kind::var, v, {} } );
            slot = static_cast< std::uint32_t >( _nodes.size() - 1 );
        }
        return slot << 1U;
    }

    ref constant( bool value ) const { return value ? true_ref : false_ref; }

    ref land( std::vector< ref > kids )
    {
        std::sort( kids.begin(), kids.end() );
        kids.erase( std::unique( kids.begin(), kids.end() ), kids.end() );
        std::vector< ref > keep;
        for ( std::size_t i = 0; i < kids.size(); ++i )
        {
            const ref r = kids[ i ];
            if ( r == false_ref )
                return false_ref;
            if ( r == true_ref )
                continue;
            // x and !x are adjacent after sorting
            if ( i + 1 < kids.size() && kids[ i + 1 ] == negate( r ) )
                return false_ref;
            keep.push_back( r );
        }
        if ( keep.empty() )
            return true_ref;
        if ( keep.size() == 1 )
            return keep[ 0 ];

        auto it = _gates.find( keep );
        if ( it != _gates.end() )
            return it->second << 1U;
        _nodes.push_back( node{ kind::gate, 0, keep } );
        const auto id = static_cast< std::uint32_t >( _nodes.size() - 1 );
        _gates.emplace( std::move( keep ), id );
        return id << 1U;
    }

    ref lor( std::vector< ref > kids )
    {
        for ( auto& k : kids )
            k = negate( k );
        return negate( land( std::move( kids ) ) );
    }

    ref land( ref a, ref b ) { return land( std::vector< ref >{ a, b } ); }
    ref lor( ref a, ref b ) { return lor( std::vector< ref >{ a, b } ); }
    ref implies( ref a, ref b ) { return lor( negate( a ), b ); }
    ref iff( ref a, ref b ) { return land( implies( a, b ), implies( b, a ) ); }
    ref lxor( ref a, ref b ) { return negate( iff( a, b ) ); }
    ref ite( ref c, ref t, ref e ) { return lor( land( c, t ), land( negate( c ), e ) ); }

    /// Evaluates `r` with `value(v)` giving each variable's truth value.
    template < typename Assignment >
    [[nodiscard]] bool eval( ref r, const Assignment& value ) const
    {
        std::vector< std::int8_t > memo( _nodes.size(), -1 );
        return eval_rec( r, value, memo );
    }

private:
    struct vec_hash
    {
        std::size_t operator()( const std::vector< ref >& v ) const
        {
            std::size_t h = v.size();
            for ( auto r : v )
                h ^= r + 0x9e3779b97f4a7c15ULL + ( h << 6 ) + ( h >> 2 );
            return h;
        }
    };

    std::vector< node > _nodes;
    std::vector< std::uint32_t > _var_nodes;
    std::unordered_map< std::vector< ref >, std::uint32_t, vec_hash > _gates;

    template < typename Assignment >
    bool eval_rec( ref r, const Assignment& value, std::vector< std::int8_t >& memo ) const
    {
        const auto i = index( r );
        if ( memo[ i ] < 0 )
        {
            // Explicit stack: gate chains for long Until encodings get deep.
            std::vector< std::pair< std::uint32_t, std::size_t > > stack{ { i, 0 } };
            while ( !stack.empty() )
            {
                auto& [ id, next ] = stack.back();
                const auto& n = _nodes[ id ];
                if ( n.k == kind::constant )
                {
                    memo[ id ] = 1;
                    stack.pop_back();
                    continue;
                }
                if ( n.k == kind::var )
                {
                    memo[ id ] = value( n.var ) ? 1 : 0;
                    stack.pop_back();
                    continue;
                }
                bool pushed = false;
                while ( next < n.kids.size() )
                {
                    const auto kid = index( n.kids[ next ] );
                    if ( memo[ kid ] < 0 )
                    {
                        stack.emplace_back( kid, 0 );
                        pushed = true;
                        break;
                    }
                    ++next;
                }
                if ( pushed )
                    continue;
                bool v = true;
                for ( auto k : n.kids )
                    v = v && ( memo[ index( k ) ] == 1 ) != is_negated( k );
                memo[ id ] = v ? 1 : 0;
                stack.pop_back();
            }
        }
        return ( memo[ i ] == 1 ) != is_negated( r );
    }
};

} // namespace plbmc
