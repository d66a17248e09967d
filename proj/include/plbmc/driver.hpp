#pragma once

#include "cnf.hpp"
#include "desugar.hpp"
#include "encoder.hpp"
#include "error.hpp"
#include "external_solver.hpp"
#include "frontend.hpp"
#include "operational.hpp"
#include "sat.hpp"
#include "trace.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace plbmc
{

enum class run_mode
{
    bsc,
    bmc,
    hcc,
    loop_free,
};

inline std::string mode_name( run_mode m )
{
    switch ( m )
    {
    case run_mode::bsc: return "bsc";
    case run_mode::bmc: return "bmc";
    case run_mode::hcc: return "hcc";
    case run_mode::loop_free: return "loop-free";
    }
    return "?";
}

struct run_config
{
    std::filesystem::path spec_path;
    std::optional< std::string > spec_text; // used instead of reading spec_path
    std::optional< int > bound;
    std::optional< engine_kind > engine;
    run_mode mode = run_mode::bsc;
    std::optional< std::string > solver;          // embedded | minisat | picosat
    std::optional< std::string > solver_executable;
    std::optional< std::filesystem::path > history_path;
    std::filesystem::path out_dir = ".";
    int max_bound = 64;
    long long conflict_limit = -1;
};

struct run_report
{
    std::optional< verdict > answer;
    int exit_code = 2;
    int k = 0;
    engine_kind engine = engine_kind::mono;
    bool loop_free = false;
    std::string message;
    std::optional< lasso_trace > trace;
    diagnostics warnings;
    int num_vars = 0;
    std::size_t num_clauses = 0;
};

/// Desugared and validated root plus globals for one run mode.
///
/// The initial condition is anchored at the origin: `(yesterday init)` in the
/// mono engine (root at instant 1), `init` itself in the bi engine.
inline encode_input build_input( const spec_document& spec, run_mode mode, engine_kind engine, diagnostics* diags = nullptr )
{
    const auto core = [ & ]( const formula& f ) {
        auto g = desugar( f, diags );
        check_atoms( g, spec.decls );
        return g;
    };

    encode_input in;
    std::vector< formula > root;
    if ( spec.init )
    {
        const auto init = core( *spec.init );
        root.push_back( engine == engine_kind::mono ? yesterday( init ) : init );
    }
    switch ( mode )
    {
    case run_mode::bsc:
    case run_mode::hcc:
        if ( spec.property )
            root.push_back( core( *spec.property ) );
        if ( root.empty() && spec.transitions.empty() && mode == run_mode::bsc )
            throw error( "nothing to check: the spec has no init, trans or property section" );
        break;
    case run_mode::bmc:
        if ( spec.transitions.empty() )
            throw error( "bmc mode needs a model: the spec has no (trans ...) section" );
        if ( !spec.property )
            throw error( "bmc mode needs a (property ...) section" );
        root.push_back( lnot( core( *spec.property ) ) );
        break;
    case run_mode::loop_free:
        if ( engine != engine_kind::mono )
            throw error( "loop-free mode requires the mono engine" );
        break;
    }
    if ( root.empty() )
        in.root = tt();
    else if ( root.size() == 1 )
        in.root = root[ 0 ];
    else
        in.root = land( std::move( root ) );

    for ( const auto& t : spec.transitions )
        in.globals.push_back( core( t ) );
    for ( auto& c : domain_constraints( spec.decls ) )
        in.globals.push_back( std::move( c ) );
    for ( const auto& a : spec.decls.atoms )
    {
        check_atoms( a, spec.decls );
        in.atoms.push_back( a );
    }
    return in;
}

/// One formula whose truth at the root instant of a lasso says the lasso is
/// a model of `in` (root there, every global at every position).
inline formula oracle_formula( const encode_input& in, engine_kind engine )
{
    std::vector< formula > parts{ in.root };
    for ( const auto& g : in.globals )
    {
        if ( engine == engine_kind::mono )
            parts.push_back( yesterday( g ) ); // root instant is 1; instant 0 precedes it
        else
            parts.push_back( trigger( ff(), g ) );
        parts.push_back( release( ff(), g ) );
    }
    return parts.size() == 1 ? parts[ 0 ] : land( std::move( parts ) );
}

namespace detail
{

inline void write_file( const std::filesystem::path& p, const std::string& text )
{
    std::ofstream out( p, std::ios::binary | std::ios::trunc );
    out << text;
    if ( !out )
        throw error( "cannot write " + p.string() );
}

inline std::string minisat_style( const sat_result& r )
{
    if ( !r.is_sat() )
        return "UNSAT\n";
    std::ostringstream s;
    s << "SAT\n";
    for ( std::size_t v = 1; v < r.model->size(); ++v )
        s << ( ( *r.model )[ v ] ? "" : "-" ) << v << ' ';
    s << "0\n";
    return s.str();
}

inline spec_document load_spec( const run_config& cfg )
{
    if ( cfg.spec_text )
        return parse_spec( std::string_view( *cfg.spec_text ) );
    std::ifstream in( cfg.spec_path, std::ios::binary );
    if ( !in )
        throw error( "cannot read spec file " + cfg.spec_path.string() );
    std::ostringstream s;
    s << in.rdbuf();
    try
    {
        return parse_spec( std::string_view( s.str() ) );
    }
    catch ( const error& e )
    {
        throw error( cfg.spec_path.string() + ":" + e.what() );
    }
}

} // namespace detail

/// Solves `inst`, leaving output.cnf.txt and output.sat.txt in `dir`.
inline sat_result solve_with( const cnf_instance& inst, const run_config& cfg, const std::filesystem::path& dir )
{
    const std::string id = cfg.solver.value_or( "embedded" );
    if ( id == "embedded" )
    {
        detail::write_file( dir / "output.cnf.txt", to_dimacs( inst ) );
        auto r = solve_embedded( inst, cfg.conflict_limit );
        detail::write_file( dir / "output.sat.txt", detail::minisat_style( r ) );
        return r;
    }
    return solve_external( inst, known_solver( id, cfg.solver_executable ), dir );
}

/// One verification job: parse, lower, encode, solve, decode.
inline run_report run( const run_config& cfg )
{
    namespace fs = std::filesystem;
    run_report rep;
    fs::create_directories( cfg.out_dir );
    for ( const char* name : { "output.cnf.txt", "output.sat.txt", "output.hist.txt" } )
        detail::write_file( cfg.out_dir / name, "" );

    const spec_document spec = detail::load_spec( cfg );
    rep.engine = cfg.engine.value_or( spec.options.engine.value_or( engine_kind::mono ) );
    const bool loop_free = cfg.mode == run_mode::loop_free || ( spec.options.loop_free && cfg.mode == run_mode::bsc );
    const run_mode mode = loop_free ? run_mode::loop_free : cfg.mode;
    rep.loop_free = loop_free;
    rep.k = cfg.bound.value_or( spec.options.bound.value_or( 10 ) );
    run_config solver_cfg = cfg;
    if ( !solver_cfg.solver )
        solver_cfg.solver = spec.options.solver;

    encode_input in = build_input( spec, mode, rep.engine, &rep.warnings );
    if ( mode == run_mode::hcc )
    {
        if ( cfg.history_path )
        {
            std::ifstream h( *cfg.history_path, std::ios::binary );
            if ( !h )
                throw error( "cannot read history file " + cfg.history_path->string() );
            std::ostringstream s;
            s << h.rdbuf();
            in.history = parse_history( s.str() );
        }
        else if ( spec.history )
            in.history = *spec.history;
        else
            throw error( "hcc mode needs --history or a (history ...) section" );
        for ( const auto& f : in.history.facts )
            check_atoms( f.atom, spec.decls );
    }

    const encoded_problem problem = encode( in, { rep.k, rep.engine, loop_free } );
    const cnf_instance inst = to_cnf( problem );
    rep.num_vars = inst.num_vars;
    rep.num_clauses = inst.clauses.size();
    const sat_result result = solve_with( inst, solver_cfg, cfg.out_dir );
    rep.answer = result.answer;

    if ( result.is_sat() )
    {
        rep.trace = decode( result, problem.vm );
        detail::write_file( cfg.out_dir / "output.hist.txt", render_history( *rep.trace, !loop_free ) );
        if ( !loop_free && !eval_lasso( *rep.trace, oracle_formula( in, rep.engine ), problem.vm.root_instant() ) )
            throw error( "internal error: the decoded trace does not satisfy the specification" );
    }

    rep.exit_code = result.is_sat() ? 0 : 1;
    switch ( mode )
    {
    case run_mode::bsc:
        rep.message = result.is_sat() ? "SAT: the specification has a model" : "UNSAT: no model within bound " + std::to_string( rep.k );
        break;
    case run_mode::bmc:
        rep.message = result.is_sat() ? "SAT: counterexample found, the property does not hold"
                                      : "UNSAT: the property holds up to bound " + std::to_string( rep.k );
        break;
    case run_mode::hcc:
        rep.message = result.is_sat() ? "SAT: history completed" : "UNSAT: the history is inconsistent with the specification";
        break;
    case run_mode::loop_free:
        rep.message = result.is_sat() ? "SAT: completeness bound not reached"
                                      : "UNSAT: completeness bound reached at " + std::to_string( rep.k );
        break;
    }
    return rep;
}

struct bound_report
{
    int bound = 0;
    std::vector< std::pair< int, verdict > > steps;
};

/// Loop-free search: k = 1, 2, ... until the first UNSAT, which is returned.
inline bound_report find_bound( const run_config& cfg )
{
    if ( cfg.max_bound < 1 )
        throw error( "max bound must be at least 1" );
    bound_report rep;
    for ( int k = 1; k <= cfg.max_bound; ++k )
    {
        run_config step = cfg;
        step.mode = run_mode::loop_free;
        step.bound = k;
        step.engine = engine_kind::mono;
        const auto r = run( step );
        rep.steps.emplace_back( k, *r.answer );
        if ( *r.answer == verdict::unsat )
        {
            rep.bound = k;
            return rep;
        }
    }
    throw error( "completeness bound not reached within max bound " + std::to_string( cfg.max_bound ) );
}

} // namespace plbmc
