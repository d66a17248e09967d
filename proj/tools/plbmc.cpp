#include <plbmc/plbmc.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace
{

void add_common( CLI::App& cmd, plbmc::run_config& cfg, std::string& solver )
{
    cmd.add_option( "spec", cfg.spec_path, "Spec file (.zot)" )->required()->check( CLI::ExistingFile );
    cmd.add_option( "--solver", solver, "SAT backend: embedded, minisat or picosat" )
        ->check( CLI::IsMember( { "embedded", "minisat", "picosat" } ) );
    cmd.add_option( "--solver-path", cfg.solver_executable, "Path of the external solver binary" );
    cmd.add_option( "--out", cfg.out_dir, "Directory for output.cnf.txt, output.sat.txt, output.hist.txt" );
}

void print_warnings( const plbmc::diagnostics& ws )
{
    for ( const auto& w : ws )
        std::cerr << "warning: " << w << '\n';
}

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "Bounded satisfiability and model checking for PLTL with past and TRIO metric operators" };
    app.require_subcommand( 1 );

    plbmc::run_config cfg;
    std::string solver;
    std::string engine;
    std::string mode = "bsc";
    bool loop_free = false;

    auto* check = app.add_subcommand( "check", "Check a spec at a fixed bound" );
    add_common( *check, cfg, solver );
    check->add_option( "--bound,-k", cfg.bound, "Time bound k" )->check( CLI::PositiveNumber );
    check->add_option( "--engine", engine, "mono (time N) or bi (time Z)" )->check( CLI::IsMember( { "mono", "bi" } ) );
    check->add_option( "--mode", mode, "bsc, bmc or hcc" )->check( CLI::IsMember( { "bsc", "bmc", "hcc" } ) );
    check->add_flag( "--loop-free", loop_free, "Completeness check: no loop, all states distinct" );
    check->add_option( "--history", cfg.history_path, "Partial history for hcc mode" )->check( CLI::ExistingFile );

    auto* search = app.add_subcommand( "find-bound", "Find the completeness bound by loop-free search" );
    add_common( *search, cfg, solver );
    search->add_option( "--max-bound", cfg.max_bound, "Give up after this bound" )->check( CLI::PositiveNumber );

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::ParseError& e )
    {
        return app.exit( e ) == 0 ? 0 : 2;
    }

    if ( !solver.empty() )
        cfg.solver = solver;
    if ( !engine.empty() )
        cfg.engine = engine == "bi" ? plbmc::engine_kind::bi : plbmc::engine_kind::mono;
    static const std::map< std::string, plbmc::run_mode > modes{
        { "bsc", plbmc::run_mode::bsc }, { "bmc", plbmc::run_mode::bmc }, { "hcc", plbmc::run_mode::hcc } };
    cfg.mode = loop_free ? plbmc::run_mode::loop_free : modes.at( mode );

    try
    {
        if ( search->parsed() )
        {
            const auto rep = plbmc::find_bound( cfg );
            for ( const auto& [ k, v ] : rep.steps )
                std::cout << "k=" << k << ' ' << ( v == plbmc::verdict::sat ? "SAT" : "UNSAT" ) << '\n';
            std::cout << "completeness bound: " << rep.bound << '\n';
            return 0;
        }
        const auto rep = plbmc::run( cfg );
        print_warnings( rep.warnings );
        std::cout << rep.message << '\n';
        std::cout << "k=" << rep.k << " engine=" << ( rep.engine == plbmc::engine_kind::bi ? "bi" : "mono" )
                  << " vars=" << rep.num_vars << " clauses=" << rep.num_clauses << '\n';
        if ( rep.trace )
            std::cout << plbmc::render_history( *rep.trace, !rep.loop_free );
        return rep.exit_code;
    }
    catch ( const plbmc::error& e )
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch ( const std::exception& e )
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
