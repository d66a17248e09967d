#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

using namespace plbmc;
namespace fs = std::filesystem;

namespace
{

cnf_instance make( int nv, std::vector< std::vector< int > > clauses )
{
    cnf_instance inst;
    inst.num_vars = nv;
    inst.clauses = std::move( clauses );
    return inst;
}

cnf_instance random_3cnf( std::mt19937_64& rng, int nv, int nc )
{
    std::uniform_int_distribution< int > var( 1, nv );
    std::bernoulli_distribution sign( 0.5 );
    cnf_instance inst;
    inst.num_vars = nv;
    for ( int c = 0; c < nc; ++c )
    {
        std::vector< int > clause;
        while ( clause.size() < 3 )
        {
            const int v = var( rng );
            if ( std::find_if( clause.begin(), clause.end(), [ v ]( int l ) { return std::abs( l ) == v; } ) == clause.end() )
                clause.push_back( sign( rng ) ? v : -v );
        }
        inst.clauses.push_back( clause );
    }
    return inst;
}

bool brute_force( const cnf_instance& inst )
{
    std::vector< bool > m( static_cast< std::size_t >( inst.num_vars ) + 1 );
    for ( std::uint64_t bits = 0; bits < ( std::uint64_t{ 1 } << inst.num_vars ); ++bits )
    {
        for ( int v = 1; v <= inst.num_vars; ++v )
            m[ static_cast< std::size_t >( v ) ] = ( ( bits >> ( v - 1 ) ) & 1U ) != 0;
        if ( verify_model( inst, m ) )
            return true;
    }
    return false;
}

fs::path scratch( const std::string& name )
{
    auto p = fs::temp_directory_path() / ( "plbmc-cnf-" + name + "-" + std::to_string( ::getpid() ) );
    fs::create_directories( p );
    return p;
}

} // namespace

TEST( Dimacs, EmitExact )
{
    EXPECT_EQ( to_dimacs( make( 2, { { 1, -2 }, { 2 } } ) ), "p cnf 2 2\n1 -2 0\n2 0\n" );
}

TEST( Dimacs, CommentsCarryNames )
{
    auto inst = make( 1, { { 1 } } );
    inst.comments.push_back( { "item:S=0", 1, 3 } );
    EXPECT_EQ( to_dimacs( inst ), "p cnf 1 1\nc item:S=0 1 3\n1 0\n" );
}

TEST( Dimacs, RoundTrip )
{
    std::mt19937_64 rng( 5 );
    for ( int i = 0; i < 20; ++i )
    {
        auto inst = random_3cnf( rng, 12, 40 );
        inst.comments.push_back( { "A", 3, 0 } );
        EXPECT_EQ( parse_dimacs( to_dimacs( inst ) ), inst );
    }
}

TEST( Dimacs, ParseAcceptsFreeFormClauses )
{
    const auto inst = parse_dimacs( "c hello world\np cnf 3 2\n1 -2\n 3 0 -1 0\n" );
    EXPECT_EQ( inst.clauses, ( std::vector< std::vector< int > >{ { 1, -2, 3 }, { -1 } } ) );
}

TEST( Dimacs, ParseErrors )
{
    EXPECT_THROW( parse_dimacs( "1 2 0\n" ), error );
    EXPECT_THROW( parse_dimacs( "p cnf 2 1\n1 3 0\n" ), error );
    EXPECT_THROW( parse_dimacs( "p cnf 2 2\n1 0\n" ), error );
    EXPECT_THROW( parse_dimacs( "p cnf 2 1\n1 x 0\n" ), error );
    EXPECT_THROW( parse_dimacs( "p cnf 2 1\n1 2\n" ), error );
    EXPECT_THROW( parse_dimacs( "p dnf 2 1\n1 0\n" ), error );
}

TEST( Tseitin, ConstantRoots )
{
    circuit c;
    EXPECT_FALSE( solve_embedded( circuit_to_cnf( c, circuit::false_ref, 0 ) ).is_sat() );
    EXPECT_TRUE( solve_embedded( circuit_to_cnf( c, circuit::true_ref, 0 ) ).is_sat() );
}

TEST( Tseitin, EquisatisfiableWithCircuit )
{
    std::mt19937_64 rng( 17 );
    for ( int round = 0; round < 200; ++round )
    {
        circuit c;
        std::vector< circuit::ref > pool;
        for ( int v = 1; v <= 5; ++v )
            pool.push_back( c.var( v ) );
        std::uniform_int_distribution< int > op( 0, 3 );
        for ( int g = 0; g < 8; ++g )
        {
            auto pick = [ & ] {
                auto r = pool[ std::uniform_int_distribution< std::size_t >( 0, pool.size() - 1 )( rng ) ];
                return rng() % 2 ? circuit::negate( r ) : r;
            };
            const int o = op( rng );
            pool.push_back( o == 0 ? c.land( pick(), pick() ) : o == 1 ? c.lor( pick(), pick() ) : o == 2 ? c.lxor( pick(), pick() ) : c.ite( pick(), pick(), pick() ) );
        }
        const auto root = pool.back();
        bool expected = false;
        for ( int bits = 0; bits < 32 && !expected; ++bits )
        {
            std::vector< bool > a( 6 );
            for ( int v = 1; v <= 5; ++v )
                a[ static_cast< std::size_t >( v ) ] = ( ( bits >> ( v - 1 ) ) & 1 ) != 0;
            expected = c.eval( root, [ & ]( int v ) { return static_cast< bool >( a[ static_cast< std::size_t >( v ) ] ); } );
        }
        const auto inst = circuit_to_cnf( c, root, 5 );
        const auto r = solve_embedded( inst );
        ASSERT_EQ( r.is_sat(), expected ) << "round " << round;
        if ( r.is_sat() )
        {
            EXPECT_TRUE( c.eval( root, [ & ]( int v ) { return r.value( v ); } ) );
        }
    }
}

TEST( Embedded, TinyInstances )
{
    EXPECT_FALSE( solve_embedded( make( 1, { { 1 }, { -1 } } ) ).is_sat() );
    const auto r = solve_embedded( make( 2, { { 1, 2 }, { -1 } } ) );
    ASSERT_TRUE( r.is_sat() );
    EXPECT_TRUE( r.value( 2 ) );
    EXPECT_FALSE( r.value( 1 ) );
    EXPECT_FALSE( solve_embedded( make( 0, { {} } ) ).is_sat() );
    EXPECT_TRUE( solve_embedded( make( 0, {} ) ).is_sat() );
    EXPECT_TRUE( solve_embedded( make( 3, { { 1, -1 } } ) ).is_sat() );
}

TEST( Embedded, PigeonHoleUnsat )
{
    // 6 pigeons, 5 holes
    const int P = 6, H = 5;
    auto x = [ & ]( int p, int h ) { return p * H + h + 1; };
    cnf_instance inst;
    inst.num_vars = P * H;
    for ( int p = 0; p < P; ++p )
    {
        std::vector< int > c;
        for ( int h = 0; h < H; ++h )
            c.push_back( x( p, h ) );
        inst.clauses.push_back( c );
    }
    for ( int h = 0; h < H; ++h )
        for ( int p = 0; p < P; ++p )
            for ( int q = p + 1; q < P; ++q )
                inst.clauses.push_back( { -x( p, h ), -x( q, h ) } );
    EXPECT_FALSE( solve_embedded( inst ).is_sat() );
}

TEST( Embedded, ConflictLimit )
{
    const int P = 9, H = 8;
    auto x = [ & ]( int p, int h ) { return p * H + h + 1; };
    cnf_instance inst;
    inst.num_vars = P * H;
    for ( int p = 0; p < P; ++p )
    {
        std::vector< int > c;
        for ( int h = 0; h < H; ++h )
            c.push_back( x( p, h ) );
        inst.clauses.push_back( c );
    }
    for ( int h = 0; h < H; ++h )
        for ( int p = 0; p < P; ++p )
            for ( int q = p + 1; q < P; ++q )
                inst.clauses.push_back( { -x( p, h ), -x( q, h ) } );
    EXPECT_THROW( solve_embedded( inst, 10 ), solver_error );
}

TEST( Embedded, AgreesWithBruteForce )
{
    std::mt19937_64 rng( 99 );
    for ( int i = 0; i < 300; ++i )
    {
        const auto inst = random_3cnf( rng, 10, 43 );
        const auto r = solve_embedded( inst );
        ASSERT_EQ( r.is_sat(), brute_force( inst ) ) << to_dimacs( inst );
        if ( r.is_sat() )
        {
            EXPECT_TRUE( verify_model( inst, *r.model ) );
        }
    }
}

TEST( Embedded, AgreesWithPicosatOnRandom3Cnf )
{
    if ( std::string( PLBMC_PICOSAT ).empty() )
    {
        GTEST_SKIP() << "no picosat-compatible solver available";
    }
    const auto dir = scratch( "random" );
    const auto cfg = known_solver( "picosat", PLBMC_PICOSAT );
    std::mt19937_64 rng( 2024 );
    int sat = 0;
    for ( int i = 0; i < 100; ++i )
    {
        const auto inst = random_3cnf( rng, 30, 126 );
        const auto mine = solve_embedded( inst );
        const auto theirs = solve_external( inst, cfg, dir );
        ASSERT_EQ( mine.is_sat(), theirs.is_sat() ) << "instance " << i;
        sat += mine.is_sat() ? 1 : 0;
    }
    // ratio 4.2 sits at the phase transition: both answers must show up
    EXPECT_GT( sat, 10 );
    EXPECT_LT( sat, 90 );
    fs::remove_all( dir );
}

TEST( External, MinisatDialect )
{
    if ( std::string( PLBMC_MINISAT ).empty() )
    {
        GTEST_SKIP() << "no minisat-compatible solver available";
    }
    const auto dir = scratch( "minisat" );
    const auto cfg = known_solver( "minisat", PLBMC_MINISAT );
    const auto r = solve_external( make( 2, { { 1, 2 }, { -1 } } ), cfg, dir );
    ASSERT_TRUE( r.is_sat() );
    EXPECT_TRUE( r.value( 2 ) );
    EXPECT_FALSE( solve_external( make( 1, { { 1 }, { -1 } } ), cfg, dir ).is_sat() );
    EXPECT_TRUE( fs::exists( dir / "output.cnf.txt" ) );
    EXPECT_EQ( detail::slurp( dir / "output.sat.txt" ).substr( 0, 5 ), "UNSAT" );
    fs::remove_all( dir );
}

TEST( External, MissingExecutable )
{
    const auto dir = scratch( "missing" );
    for ( const char* id : { "minisat", "picosat" } )
    {
        EXPECT_THROW( solve_external( make( 1, { { 1 } } ), known_solver( id, "/nonexistent/solver-binary" ), dir ), solver_missing ) << id;
        EXPECT_THROW( solve_external( make( 1, { { 1 } } ), known_solver( id, "no-such-solver-on-path-xyz" ), dir ), solver_missing ) << id;
    }
    fs::remove_all( dir );
}

TEST( External, CrashingSolver )
{
    const auto dir = scratch( "crash" );
    EXPECT_THROW( solve_external( make( 1, { { 1 } } ), known_solver( "picosat", "false" ), dir ), solver_failed );
    EXPECT_THROW( solve_external( make( 1, { { 1 } } ), known_solver( "minisat", "false" ), dir ), solver_failed );
    fs::remove_all( dir );
}

TEST( External, UnknownSolverId )
{
    EXPECT_THROW( known_solver( "glucose" ), error );
}

TEST( External, ParseMinisat )
{
    const auto r = parse_minisat_result( "SAT\n1 -2 3 0\n", 3 );
    ASSERT_TRUE( r.is_sat() );
    EXPECT_EQ( *r.model, ( std::vector< bool >{ false, true, false, true } ) );
    EXPECT_FALSE( parse_minisat_result( "UNSAT\n", 3 ).is_sat() );
    EXPECT_THROW( parse_minisat_result( "", 3 ), solver_output_error );
    EXPECT_THROW( parse_minisat_result( "INDET\n", 3 ), solver_output_error );
    EXPECT_THROW( parse_minisat_result( "SAT\n1 x 0\n", 3 ), solver_output_error );
}

TEST( External, ParsePicosat )
{
    const auto r = parse_picosat_output( "c comment\ns SATISFIABLE\nv -1 2\nv 3 0\n", 3 );
    ASSERT_TRUE( r.is_sat() );
    EXPECT_EQ( *r.model, ( std::vector< bool >{ false, false, true, true } ) );
    EXPECT_FALSE( parse_picosat_output( "s UNSATISFIABLE\n", 3 ).is_sat() );
    EXPECT_THROW( parse_picosat_output( "c nothing\n", 3 ), solver_output_error );
    EXPECT_THROW( parse_picosat_output( "s UNKNOWN\n", 3 ), solver_output_error );
}

TEST( External, BadModelRejected )
{
    const auto dir = scratch( "liar" );
    const auto liar = dir / "liar.sh";
    {
        std::ofstream out( liar );
        out << "#!/bin/sh\necho 's SATISFIABLE'\necho 'v -1 0'\nexit 10\n";
    }
    fs::permissions( liar, fs::perms::owner_all );
    EXPECT_THROW( solve_external( make( 1, { { 1 } } ), known_solver( "picosat", liar.string() ), dir ), solver_output_error );
    fs::remove_all( dir );
}
