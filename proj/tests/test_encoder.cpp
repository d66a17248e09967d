#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace plbmc;
using plbmc::testing::encoder_verdict;

namespace
{

bool sat( const formula& root, int k, engine_kind e ) { return encoder_verdict( root, k, e ).is_sat(); }

encode_input just_atoms( std::vector< formula > atoms )
{
    encode_input in;
    in.atoms = std::move( atoms );
    return in;
}

} // namespace

TEST( Encoder, CallBackCallRoundTrip )
{
    const auto f = land( { until( prop( "A" ), prop( "B" ) ), since( prop( "C" ), next( prop( "A" ) ) ) } );
    for ( auto e : { engine_kind::mono, engine_kind::bi } )
    {
        encode_input in;
        in.root = f;
        const auto p = encode( in, { 4, e, false } );
        for ( const auto& n : p.vm.closure() )
            for ( int t = 0; t <= 4; ++t )
            {
                const int x = p.vm.call( n.f, t );
                EXPECT_EQ( p.vm.back_call( x ), std::make_pair( n.f, t ) );
                EXPECT_EQ( p.vm.back_call_time( x ), t );
            }
        EXPECT_EQ( p.vm.call( f, 2 ), p.vm.call( normalize( f, e ), 2 ) );
    }
}

TEST( Encoder, CallRejectsOutsideWindow )
{
    encode_input in;
    in.root = prop( "A" );
    const auto p = encode( in, { 3, engine_kind::mono, false } );
    EXPECT_THROW( (void)p.vm.call( prop( "A" ), 4 ), error );
    EXPECT_THROW( (void)p.vm.call( prop( "A" ), -1 ), error );
    EXPECT_THROW( (void)p.vm.call( prop( "Z" ), 0 ), error );
    EXPECT_THROW( (void)p.vm.back_call( p.vm.loop_var( 1 ) ), error );
    EXPECT_THROW( (void)p.vm.describe( p.vm.numvar() + 1 ), error );
}

TEST( Encoder, BoundTooSmall )
{
    encode_input in;
    EXPECT_THROW( encode( in, { 1, engine_kind::mono, false } ), error );
    EXPECT_THROW( encode( in, { 1, engine_kind::bi, false } ), error );
    EXPECT_THROW( encode( in, { 0, engine_kind::mono, true } ), error );
    EXPECT_NO_THROW( encode( in, { 1, engine_kind::mono, true } ) );
    EXPECT_THROW( encode( in, { 3, engine_kind::bi, true } ), error );
}

TEST( Encoder, RejectsSugar )
{
    encode_input in;
    in.root = metric( op::lasts, variant::none, prop( "A" ), 2 );
    EXPECT_THROW( encode( in, { 3, engine_kind::mono, false } ), spec_error );
}

TEST( Encoder, MonoOrigin )
{
    // root sits at instant 1; instant 0 has no predecessor
    EXPECT_TRUE( sat( yesterday( zeta( ff() ) ), 3, engine_kind::mono ) );
    EXPECT_FALSE( sat( yesterday( yesterday( tt() ) ), 3, engine_kind::mono ) );
    EXPECT_TRUE( sat( yesterday( tt() ), 3, engine_kind::mono ) );
    EXPECT_FALSE( sat( since( tt(), ff() ), 3, engine_kind::mono ) );
}

TEST( Encoder, BiHasNoOrigin )
{
    EXPECT_TRUE( sat( yesterday( yesterday( yesterday( tt() ) ) ), 3, engine_kind::bi ) );
    EXPECT_FALSE( sat( zeta( ff() ), 3, engine_kind::bi ) );
    EXPECT_TRUE( sat( yesterday( since( tt(), prop( "A" ) ) ), 2, engine_kind::bi ) );
}

TEST( Encoder, EventualitiesAreFulfilled )
{
    EXPECT_FALSE( sat( land( { until( tt(), prop( "A" ) ), release( ff(), lnot( prop( "A" ) ) ) } ), 4, engine_kind::mono ) );
    EXPECT_TRUE( sat( land( { release( ff(), until( tt(), prop( "A" ) ) ), release( ff(), until( tt(), lnot( prop( "A" ) ) ) ) } ), 2,
                      engine_kind::mono ) );
    EXPECT_FALSE( sat( land( { since( tt(), prop( "A" ) ), trigger( ff(), lnot( prop( "A" ) ) ) } ), 4, engine_kind::bi ) );
}

TEST( Encoder, ExactlyOneSelectorInModels )
{
    plbmc::testing::formula_generator gen( 3, { 3, 3, 2, false, true } );
    int models = 0;
    for ( int i = 0; i < 60; ++i )
    {
        const auto f = gen.next_formula();
        for ( auto e : { engine_kind::mono, engine_kind::bi } )
        {
            encoded_problem p;
            const auto r = encoder_verdict( f, 3, e, &p );
            if ( !r.is_sat() )
                continue;
            ++models;
            int loops = 0;
            for ( int v : p.vm.loop_selectors() )
                loops += r.value( v ) ? 1 : 0;
            EXPECT_EQ( loops, 1 );
            if ( e == engine_kind::bi )
            {
                int pools = 0;
                for ( int v : p.vm.past_selectors() )
                    pools += r.value( v ) ? 1 : 0;
                EXPECT_EQ( pools, 1 );
                EXPECT_EQ( p.vm.past_selectors().size(), 3U );
            }
            EXPECT_EQ( p.vm.loop_selectors().size(), 3U );
            const auto tr = decode( r, p.vm );
            EXPECT_TRUE( eval_lasso( tr, f, p.vm.root_instant() ) ) << f.str();
        }
    }
    EXPECT_GT( models, 20 );
}

TEST( Encoder, LoopFreeDistinctStates )
{
    // one atom: two distinct states exist, three do not
    const auto one = just_atoms( { prop( "A" ) } );
    EXPECT_TRUE( solve_embedded( to_cnf( encode( one, { 1, engine_kind::mono, true } ) ) ).is_sat() );
    EXPECT_FALSE( solve_embedded( to_cnf( encode( one, { 2, engine_kind::mono, true } ) ) ).is_sat() );
    const auto two = just_atoms( { prop( "A" ), prop( "B" ) } );
    EXPECT_TRUE( solve_embedded( to_cnf( encode( two, { 3, engine_kind::mono, true } ) ) ).is_sat() );
    EXPECT_FALSE( solve_embedded( to_cnf( encode( two, { 4, engine_kind::mono, true } ) ) ).is_sat() );
}

TEST( Encoder, LoopFreeHasNoSelectors )
{
    const auto p = encode( just_atoms( { prop( "A" ) } ), { 2, engine_kind::mono, false } );
    const auto q = add_loop_free( p );
    EXPECT_TRUE( q.loop_free() );
    EXPECT_TRUE( q.vm.loop_selectors().empty() );
    EXPECT_EQ( p.vm.loop_selectors().size(), 2U );
}

TEST( Encoder, LoopFreeTransitionsHoldOnWindow )
{
    // p <-> X !p forces alternation; any path of distinct states over {p} has at most 2 states
    encode_input in = just_atoms( { prop( "P" ) } );
    in.globals.push_back( iff( prop( "P" ), next( lnot( prop( "P" ) ) ) ) );
    const auto r = solve_embedded( to_cnf( encode( in, { 1, engine_kind::mono, true } ) ) );
    ASSERT_TRUE( r.is_sat() );
    in.globals.push_back( prop( "P" ) );
    EXPECT_FALSE( solve_embedded( to_cnf( encode( in, { 1, engine_kind::mono, true } ) ) ).is_sat() );
}

TEST( Encoder, HistoryFactsPinValues )
{
    encode_input in = just_atoms( { prop( "A" ) } );
    in.globals.push_back( iff( prop( "A" ), next( prop( "A" ) ) ) );
    in.history.facts.push_back( { 2, prop( "A" ), true } );
    auto p = encode( in, { 3, engine_kind::mono, false } );
    auto r = solve_embedded( to_cnf( p ) );
    ASSERT_TRUE( r.is_sat() );
    const auto tr = decode( r, p.vm );
    for ( int t = 0; t <= 3; ++t )
        EXPECT_TRUE( tr.holds( prop( "A" ), t ) );
    in.history.facts.push_back( { 0, prop( "A" ), false } );
    EXPECT_FALSE( solve_embedded( to_cnf( encode( in, { 3, engine_kind::mono, false } ) ) ).is_sat() );
    in.history.facts = { { 7, prop( "A" ), true } };
    EXPECT_THROW( encode( in, { 3, engine_kind::mono, false } ), error );
}

TEST( Encoder, HistoryLoopMarkerPinsSelector )
{
    encode_input in = just_atoms( { prop( "A" ) } );
    in.history.loop = 2;
    auto p = encode( in, { 3, engine_kind::mono, false } );
    auto r = solve_embedded( to_cnf( p ) );
    ASSERT_TRUE( r.is_sat() );
    EXPECT_EQ( decode( r, p.vm ).loop, 2 );
}

TEST( Encoder, ExhaustiveSmallBounds )
{
    plbmc::testing::formula_generator gen( 21, { 2, 3, 2, false, true } );
    for ( int i = 0; i < 40; ++i )
    {
        const auto f = gen.next_formula();
        for ( auto e : { engine_kind::mono, engine_kind::bi } )
            EXPECT_EQ( sat( f, 2, e ), plbmc::testing::brute_force_sat( f, 2, e ) ) << f.str();
    }
}
