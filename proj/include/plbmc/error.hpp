#pragma once

#include <stdexcept>
#include <string>

namespace plbmc
{

/// Position in a spec file, 1-based; line 0 means "unknown".
struct source_loc
{
    int line = 0;
    int column = 0;

    [[nodiscard]] std::string str() const
    {
        if ( line == 0 )
            return "<unknown>";
        return std::to_string( line ) + ":" + std::to_string( column );
    }
};

class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed s-expression text (unbalanced parentheses, stray quote, ...).
class syntax_error : public error
{
public:
    syntax_error( const std::string& what, source_loc loc )
        : error( loc.str() + ": syntax error: " + what ), _loc( loc )
    {
    }

    [[nodiscard]] source_loc where() const { return _loc; }

private:
    source_loc _loc;
};

/// A well-formed s-expression that does not denote a valid spec or formula.
class spec_error : public error
{
public:
    spec_error( const std::string& what, source_loc loc )
        : error( loc.str() + ": " + what ), _loc( loc )
    {
    }

    [[nodiscard]] source_loc where() const { return _loc; }

private:
    source_loc _loc;
};

/// Failure talking to a SAT backend; never to be confused with UNSAT.
class solver_error : public error
{
public:
    using error::error;
};

} // namespace plbmc
