#pragma once

#include "cnf.hpp"
#include "error.hpp"

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace plbmc
{

enum class solver_dialect
{
    minisat, // `exe cnf result`; result file: SAT|UNSAT then literals ... 0
    picosat, // `exe cnf`; stdout: `s SATISFIABLE`, `v ...` lines
};

struct solver_config
{
    std::string id = "minisat";
    std::string executable = "minisat";
    solver_dialect dialect = solver_dialect::minisat;
};

/// Config for a known solver id. `executable` overrides the binary looked up
/// on the search path.
inline solver_config known_solver( const std::string& id, std::optional< std::string > executable = std::nullopt )
{
    solver_config c;
    c.id = id;
    if ( id == "minisat" )
        c.dialect = solver_dialect::minisat;
    else if ( id == "picosat" )
        c.dialect = solver_dialect::picosat;
    else
        throw error( "unknown solver '" + id + "' (expected embedded, minisat or picosat)" );
    c.executable = executable.value_or( id );
    return c;
}

/// The solver binary could not be started.
class solver_missing : public solver_error
{
public:
    using solver_error::solver_error;
};

/// The solver ran but its output could not be understood.
class solver_output_error : public solver_error
{
public:
    using solver_error::solver_error;
};

/// The solver exited abnormally without announcing a verdict.
class solver_failed : public solver_error
{
public:
    using solver_error::solver_error;
};

namespace detail
{

inline std::string slurp( const std::filesystem::path& p )
{
    std::ifstream in( p, std::ios::binary );
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Runs argv with stdout and stderr sent to `log`; returns the wait status.
inline int spawn_and_wait( const std::vector< std::string >& argv, const std::filesystem::path& log )
{
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init( &actions );
    posix_spawn_file_actions_addopen( &actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644 );
    posix_spawn_file_actions_adddup2( &actions, STDOUT_FILENO, STDERR_FILENO );

    std::vector< char* > args;
    for ( const auto& a : argv )
        args.push_back( const_cast< char* >( a.c_str() ) );
    args.push_back( nullptr );

    pid_t pid = 0;
    const int rc = posix_spawnp( &pid, args[ 0 ], &actions, nullptr, args.data(), environ );
    posix_spawn_file_actions_destroy( &actions );
    if ( rc != 0 )
        throw solver_missing( "cannot run solver '" + argv[ 0 ] + "': " + std::strerror( rc ) );

    int status = 0;
    while ( waitpid( pid, &status, 0 ) < 0 )
        if ( errno != EINTR )
            throw solver_failed( "waiting for solver '" + argv[ 0 ] + "' failed: " + std::strerror( errno ) );
    // posix_spawnp may report a missing binary through the child's exit 127.
    if ( WIFEXITED( status ) && WEXITSTATUS( status ) == 127 && !std::filesystem::exists( argv[ 0 ] ) &&
         argv[ 0 ].find( '/' ) != std::string::npos )
        throw solver_missing( "cannot run solver '" + argv[ 0 ] + "': not found" );
    return status;
}

inline void read_literals( std::istream& in, int num_vars, std::vector< bool >& model, std::vector< char >& given,
                           const std::string& who )
{
    std::string tok;
    while ( in >> tok )
    {
        long long l = 0;
        try
        {
            std::size_t used = 0;
            l = std::stoll( tok, &used );
            if ( used != tok.size() )
                throw std::invalid_argument( tok );
        }
        catch ( const std::exception& )
        {
            throw solver_output_error( who + ": unexpected token '" + tok + "' in model" );
        }
        if ( l == 0 )
            continue;
        const auto v = static_cast< std::size_t >( l < 0 ? -l : l );
        if ( v > static_cast< std::size_t >( num_vars ) )
            continue; // some solvers print auxiliary variables
        model[ v ] = l > 0;
        given[ v ] = 1;
    }
}

} // namespace detail

/// Parses minisat-dialect result text.
inline sat_result parse_minisat_result( const std::string& text, int num_vars )
{
    std::istringstream in( text );
    std::string first;
    if ( !( in >> first ) )
        throw solver_output_error( "minisat: empty result file" );
    sat_result r;
    if ( first == "UNSAT" )
        return r;
    if ( first != "SAT" )
        throw solver_output_error( "minisat: result starts with '" + first + "', expected SAT or UNSAT" );
    r.answer = verdict::sat;
    std::vector< bool > model( static_cast< std::size_t >( num_vars ) + 1, false );
    std::vector< char > given( model.size(), 0 );
    detail::read_literals( in, num_vars, model, given, "minisat" );
    r.model = std::move( model );
    return r;
}

/// Parses picosat-dialect stdout.
inline sat_result parse_picosat_output( const std::string& text, int num_vars )
{
    std::istringstream in( text );
    std::string line;
    std::optional< verdict > v;
    std::vector< bool > model( static_cast< std::size_t >( num_vars ) + 1, false );
    std::vector< char > given( model.size(), 0 );
    while ( std::getline( in, line ) )
    {
        if ( line.starts_with( "s " ) )
        {
            const std::string status = line.substr( 2 );
            if ( status == "SATISFIABLE" )
                v = verdict::sat;
            else if ( status == "UNSATISFIABLE" )
                v = verdict::unsat;
            else
                throw solver_output_error( "picosat: unknown status '" + status + "'" );
        }
        else if ( line.starts_with( "v " ) || line == "v" )
        {
            std::istringstream ls( line.substr( 1 ) );
            detail::read_literals( ls, num_vars, model, given, "picosat" );
        }
    }
    if ( !v )
        throw solver_output_error( "picosat: no status line in output" );
    sat_result r;
    r.answer = *v;
    if ( r.is_sat() )
        r.model = std::move( model );
    return r;
}

/// Solves through an external binary. Writes `output.cnf.txt` and
/// `output.sat.txt` into `workdir`; a SAT model is verified before returning.
inline sat_result solve_external( const cnf_instance& inst, const solver_config& cfg,
                                  const std::filesystem::path& workdir = "." )
{
    namespace fs = std::filesystem;
    fs::create_directories( workdir );
    const auto cnf_path = workdir / "output.cnf.txt";
    const auto sat_path = workdir / "output.sat.txt";
    {
        std::ofstream out( cnf_path );
        if ( !out )
            throw error( "cannot write " + cnf_path.string() );
        emit_dimacs( inst, out );
    }

    sat_result r;
    if ( cfg.dialect == solver_dialect::minisat )
    {
        const auto log_path = workdir / "output.sat.log";
        fs::remove( sat_path );
        const int status = detail::spawn_and_wait( { cfg.executable, cnf_path.string(), sat_path.string() }, log_path );
        const bool has_result = fs::exists( sat_path ) && fs::file_size( sat_path ) > 0;
        if ( !has_result )
        {
            const std::string log = detail::slurp( log_path );
            if ( WIFEXITED( status ) && WEXITSTATUS( status ) == 127 )
                throw solver_missing( "cannot run solver '" + cfg.executable + "': " + log );
            throw solver_failed( cfg.id + " exited with status " + std::to_string( WIFEXITED( status ) ? WEXITSTATUS( status ) : -1 ) +
                                 " and wrote no result" );
        }
        fs::remove( log_path );
        r = parse_minisat_result( detail::slurp( sat_path ), inst.num_vars );
    }
    else
    {
        const int status = detail::spawn_and_wait( { cfg.executable, cnf_path.string() }, sat_path );
        const std::string text = detail::slurp( sat_path );
        if ( WIFEXITED( status ) && WEXITSTATUS( status ) == 127 && text.find( "s " ) == std::string::npos )
            throw solver_missing( "cannot run solver '" + cfg.executable + "'" );
        try
        {
            r = parse_picosat_output( text, inst.num_vars );
        }
        catch ( const solver_output_error& )
        {
            // picosat exits 10/20; anything else without a verdict is a crash
            if ( !WIFEXITED( status ) || ( WEXITSTATUS( status ) != 0 && WEXITSTATUS( status ) != 10 && WEXITSTATUS( status ) != 20 ) )
                throw solver_failed( cfg.id + " exited abnormally without a verdict" );
            throw;
        }
    }
    if ( r.is_sat() && !verify_model( inst, *r.model ) )
        throw solver_output_error( cfg.id + " returned a model that violates the CNF" );
    return r;
}

} // namespace plbmc
