#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace plbmc;
namespace fs = std::filesystem;

namespace
{

const std::string specs = PLBMC_SPECS_DIR;

fs::path scratch( const std::string& name )
{
    auto p = fs::temp_directory_path() / ( "plbmc-cli-" + name + "-" + std::to_string( ::getpid() ) );
    fs::remove_all( p );
    fs::create_directories( p );
    return p;
}

std::string read( const fs::path& p )
{
    std::ifstream in( p );
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

run_config config( const std::string& spec, const fs::path& out )
{
    run_config c;
    c.spec_path = specs + "/" + spec;
    c.out_dir = out;
    return c;
}

struct cli_result
{
    int code = -1;
    std::string out;
};

cli_result cli( const std::string& args )
{
    cli_result r;
    FILE* p = ::popen( ( std::string( PLBMC_CLI ) + " " + args + " 2>&1" ).c_str(), "r" );
    if ( !p )
        return r;
    char buf[ 4096 ];
    std::size_t n = 0;
    while ( ( n = std::fread( buf, 1, sizeof buf, p ) ) > 0 )
        r.out.append( buf, n );
    const int status = ::pclose( p );
    r.code = WIFEXITED( status ) ? WEXITSTATUS( status ) : -1;
    return r;
}

} // namespace

TEST( Driver, LampIsSatisfiable )
{
    const auto dir = scratch( "lamp" );
    const auto rep = run( config( "lamp.zot", dir ) );
    EXPECT_EQ( rep.answer, verdict::sat );
    EXPECT_EQ( rep.exit_code, 0 );
    EXPECT_EQ( rep.engine, engine_kind::bi );
    EXPECT_EQ( rep.k, 10 );
    ASSERT_TRUE( rep.trace );
    EXPECT_TRUE( rep.trace->pool.has_value() );
    EXPECT_FALSE( read( dir / "output.cnf.txt" ).empty() );
    EXPECT_EQ( read( dir / "output.sat.txt" ).substr( 0, 4 ), "SAT\n" );
    EXPECT_EQ( read( dir / "output.hist.txt" ), render_history( *rep.trace ) );
    fs::remove_all( dir );
}

TEST( Driver, LampEncodingSizeRegression )
{
    const auto dir = scratch( "lamp-size" );
    const auto rep = run( config( "lamp.zot", dir ) );
    EXPECT_EQ( rep.num_vars, 11469 );
    EXPECT_EQ( rep.num_clauses, 30615U );
    fs::remove_all( dir );
}

TEST( Driver, LampHistoryCompletes )
{
    const auto dir = scratch( "lamp-hcc" );
    auto c = config( "lamp.zot", dir );
    c.mode = run_mode::hcc;
    c.history_path = specs + "/lamp-history.txt";
    const auto rep = run( c );
    ASSERT_EQ( rep.answer, verdict::sat );
    EXPECT_EQ( rep.trace->loop, 1 );
    EXPECT_EQ( rep.trace->pool, 9 );
    EXPECT_TRUE( rep.trace->holds( prop( "L" ), 2 ) );
    EXPECT_FALSE( rep.trace->holds( prop( "L" ), 5 ) );
    fs::remove_all( dir );
}

TEST( Driver, InconsistentHistory )
{
    const auto dir = scratch( "lamp-bad" );
    std::ofstream( dir / "h.txt" ) << "------ time 1 ------\n  ON\n  OFF\n------ end ------\n";
    auto c = config( "lamp.zot", dir );
    c.mode = run_mode::hcc;
    c.history_path = dir / "h.txt";
    const auto rep = run( c );
    EXPECT_EQ( rep.answer, verdict::unsat );
    EXPECT_EQ( rep.exit_code, 1 );
    EXPECT_TRUE( read( dir / "output.hist.txt" ).empty() );
    fs::remove_all( dir );
}

TEST( Driver, Mutex3PropertyHolds )
{
    const auto dir = scratch( "mutex" );
    auto c = config( "mutex3.zot", dir );
    c.mode = run_mode::bmc;
    c.bound = 12;
    const auto rep = run( c );
    EXPECT_EQ( rep.answer, verdict::unsat );
    EXPECT_EQ( rep.engine, engine_kind::mono );
    fs::remove_all( dir );
}

TEST( Driver, UnguardedMutexViolatesExclusion )
{
    const auto dir = scratch( "unguarded" );
    auto c = config( "mutex3-unguarded.zot", dir );
    c.mode = run_mode::bmc;
    c.bound = 8;
    const auto rep = run( c );
    ASSERT_EQ( rep.answer, verdict::sat );
    bool clash = false;
    for ( int t = 0; t <= rep.k; ++t )
    {
        int in_c = 0;
        for ( int p = 1; p <= 3; ++p )
            in_c += rep.trace->holds( array_atom( "STATE", p, "C" ), t ) ? 1 : 0;
        clash = clash || in_c >= 2;
    }
    EXPECT_TRUE( clash );
    fs::remove_all( dir );
}

TEST( Driver, BmcNeedsModelAndProperty )
{
    run_config c;
    c.spec_text = "(init (-P- a))";
    c.out_dir = scratch( "bmc-missing" );
    c.mode = run_mode::bmc;
    EXPECT_THROW( run( c ), error );
    c.spec_text = "(trans (-P- a))";
    EXPECT_THROW( run( c ), error );
    fs::remove_all( c.out_dir );
}

TEST( Driver, MonoInitAnchoredAtOrigin )
{
    run_config c;
    c.out_dir = scratch( "origin" );
    c.spec_text = "(init (-P- a)) (trans (<-> (-P- a) (next (!! (-P- a)))))";
    c.bound = 4;
    const auto rep = run( c );
    ASSERT_EQ( rep.answer, verdict::sat );
    EXPECT_TRUE( rep.trace->holds( prop( "A" ), 0 ) );
    EXPECT_FALSE( rep.trace->holds( prop( "A" ), 1 ) );
    EXPECT_TRUE( rep.trace->holds( prop( "A" ), 4 ) );
    fs::remove_all( c.out_dir );
}

TEST( Driver, HistoryFromSpecSection )
{
    run_config c;
    c.out_dir = scratch( "spec-history" );
    c.spec_text = "(trans (<-> (-P- a) (next (-P- a)))) (history (time 3 (-P- a)))";
    c.mode = run_mode::hcc;
    c.bound = 4;
    const auto rep = run( c );
    ASSERT_EQ( rep.answer, verdict::sat );
    EXPECT_TRUE( rep.trace->holds( prop( "A" ), 0 ) );
    c.spec_text = "(trans (-P- a))";
    EXPECT_THROW( run( c ), error );
    fs::remove_all( c.out_dir );
}

TEST( Driver, UnreadableSpec )
{
    run_config c;
    c.spec_path = "/nonexistent/spec.zot";
    c.out_dir = scratch( "unreadable" );
    EXPECT_THROW( run( c ), error );
    fs::remove_all( c.out_dir );
}

TEST( Driver, FindBound )
{
    const auto dir = scratch( "bound" );
    EXPECT_EQ( find_bound( config( "cycle3.zot", dir ) ).bound, 3 );
    EXPECT_EQ( find_bound( config( "stutter.zot", dir ) ).bound, 1 );
    const auto free = find_bound( config( "free-atom.zot", dir ) );
    EXPECT_EQ( free.bound, 2 );
    EXPECT_EQ( free.steps, ( std::vector< std::pair< int, verdict > >{ { 1, verdict::sat }, { 2, verdict::unsat } } ) );
    fs::remove_all( dir );
}

TEST( Driver, FindBoundGivesUp )
{
    auto c = config( "cycle3.zot", scratch( "giveup" ) );
    c.max_bound = 2;
    EXPECT_THROW( find_bound( c ), error );
    fs::remove_all( c.out_dir );
}

TEST( Driver, ExternalSolverMatchesEmbedded )
{
    if ( std::string( PLBMC_PICOSAT ).empty() )
    {
        GTEST_SKIP() << "no picosat-compatible solver available";
    }
    const auto dir = scratch( "ext" );
    auto c = config( "mutex3-unguarded.zot", dir );
    c.mode = run_mode::bmc;
    c.bound = 6;
    c.solver = "picosat";
    c.solver_executable = PLBMC_PICOSAT;
    const auto ext = run( c );
    c.solver = "embedded";
    const auto emb = run( c );
    EXPECT_EQ( ext.answer, emb.answer );
    fs::remove_all( dir );
}

TEST( Cli, CheckSatExitsZero )
{
    const auto dir = scratch( "exe-sat" );
    const auto r = cli( "check " + specs + "/lamp.zot --out " + dir.string() );
    EXPECT_EQ( r.code, 0 ) << r.out;
    EXPECT_NE( r.out.find( "SAT: the specification has a model" ), std::string::npos );
    EXPECT_NE( r.out.find( "k=10 engine=bi" ), std::string::npos );
    EXPECT_NE( r.out.find( "------ end ------" ), std::string::npos );
    for ( const char* f : { "output.cnf.txt", "output.sat.txt", "output.hist.txt" } )
        EXPECT_GT( fs::file_size( dir / f ), 0U ) << f;
    fs::remove_all( dir );
}

TEST( Cli, CheckUnsatExitsOne )
{
    const auto dir = scratch( "exe-unsat" );
    const auto r = cli( "check " + specs + "/mutex3.zot --mode bmc -k 6 --out " + dir.string() );
    EXPECT_EQ( r.code, 1 ) << r.out;
    EXPECT_NE( r.out.find( "UNSAT: the property holds" ), std::string::npos );
    EXPECT_TRUE( fs::exists( dir / "output.hist.txt" ) );
    EXPECT_EQ( fs::file_size( dir / "output.hist.txt" ), 0U );
    fs::remove_all( dir );
}

TEST( Cli, HistoryCompletion )
{
    const auto dir = scratch( "exe-hcc" );
    const auto r = cli( "check " + specs + "/lamp.zot --mode hcc --history " + specs + "/lamp-history.txt --out " + dir.string() );
    EXPECT_EQ( r.code, 0 ) << r.out;
    EXPECT_NE( r.out.find( "history completed" ), std::string::npos );
    fs::remove_all( dir );
}

TEST( Cli, ErrorsExitTwo )
{
    const auto dir = scratch( "exe-err" );
    std::ofstream( dir / "bad.zot" ) << "(init (-P- a)";
    const auto r = cli( "check " + ( dir / "bad.zot" ).string() + " --out " + dir.string() );
    EXPECT_EQ( r.code, 2 );
    EXPECT_NE( r.out.find( "never closed" ), std::string::npos );
    EXPECT_EQ( cli( "check " + specs + "/lamp.zot --engine tri" ).code, 2 );
    EXPECT_EQ( cli( "check /nonexistent.zot" ).code, 2 );
    EXPECT_EQ( cli( "" ).code, 2 );
    EXPECT_EQ( cli( "check " + specs + "/lamp.zot -k 1 --out " + dir.string() ).code, 2 );
    EXPECT_EQ( cli( "check " + specs + "/lamp.zot --solver picosat --solver-path /nonexistent/picosat --out " + dir.string() ).code, 2 );
    fs::remove_all( dir );
}

TEST( Cli, HelpExitsZero )
{
    EXPECT_EQ( cli( "--help" ).code, 0 );
}

TEST( Cli, FindBound )
{
    const auto dir = scratch( "exe-bound" );
    const auto r = cli( "find-bound " + specs + "/cycle3.zot --out " + dir.string() );
    EXPECT_EQ( r.code, 0 ) << r.out;
    EXPECT_NE( r.out.find( "completeness bound: 3" ), std::string::npos );
    fs::remove_all( dir );
}

TEST( Cli, LoopFreeFlag )
{
    const auto dir = scratch( "exe-lf" );
    const auto r = cli( "check " + specs + "/cycle3.zot --loop-free -k 2 --out " + dir.string() );
    EXPECT_EQ( r.code, 0 ) << r.out;
    EXPECT_EQ( r.out.find( "**LOOP**" ), std::string::npos );
    EXPECT_EQ( cli( "check " + specs + "/cycle3.zot --loop-free -k 3 --out " + dir.string() ).code, 1 );
    fs::remove_all( dir );
}
