#pragma once

#include "error.hpp"

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plbmc
{

/// An s-expression: either an atom (symbol or integer) or a list.
///
/// Symbols are canonicalized to upper case when read, so `until_ie`, `UNTIL_IE`
/// and `Until_Ie` are the same symbol.
class sexpr
{
public:
    sexpr() = default;

    static sexpr symbol( std::string text, source_loc loc = {} )
    {
        sexpr s;
        s._atom = true;
        s._text = std::move( text );
        s._loc = loc;
        return s;
    }

    static sexpr integer( std::int64_t value, source_loc loc = {} )
    {
        sexpr s;
        s._atom = true;
        s._is_int = true;
        s._value = value;
        s._text = std::to_string( value );
        s._loc = loc;
        return s;
    }

    static sexpr list( std::vector< sexpr > children = {}, source_loc loc = {} )
    {
        sexpr s;
        s._children = std::move( children );
        s._loc = loc;
        return s;
    }

    [[nodiscard]] bool is_atom() const { return _atom; }
    [[nodiscard]] bool is_list() const { return !_atom; }
    [[nodiscard]] bool is_symbol() const { return _atom && !_is_int; }
    [[nodiscard]] bool is_integer() const { return _atom && _is_int; }

    [[nodiscard]] bool is_symbol( std::string_view name ) const
    {
        return is_symbol() && _text == name;
    }

    [[nodiscard]] const std::string& text() const { return _text; }
    [[nodiscard]] std::int64_t value() const { return _value; }
    [[nodiscard]] const std::vector< sexpr >& children() const { return _children; }
    [[nodiscard]] std::size_t size() const { return _children.size(); }
    [[nodiscard]] const sexpr& operator[]( std::size_t i ) const { return _children[ i ]; }
    [[nodiscard]] source_loc loc() const { return _loc; }

    /// Head symbol of a nonempty list whose first element is a symbol.
    [[nodiscard]] std::optional< std::string > head() const
    {
        if ( is_list() && !_children.empty() && _children.front().is_symbol() )
            return _children.front().text();
        return std::nullopt;
    }

    [[nodiscard]] std::string str() const
    {
        if ( _atom )
            return _text;
        std::string out = "(";
        for ( std::size_t i = 0; i < _children.size(); ++i )
        {
            if ( i > 0 )
                out += ' ';
            out += _children[ i ].str();
        }
        out += ')';
        return out;
    }

    // Structural equality; source locations are ignored.
    friend bool operator==( const sexpr& a, const sexpr& b )
    {
        if ( a._atom != b._atom )
            return false;
        if ( a._atom )
            return a._is_int == b._is_int && a._text == b._text;
        return a._children == b._children;
    }

private:
    bool _atom = false;
    bool _is_int = false;
    std::int64_t _value = 0;
    std::string _text;
    std::vector< sexpr > _children;
    source_loc _loc;
};

namespace detail
{

class sexpr_reader
{
public:
    explicit sexpr_reader( std::string_view text ) : _text( text ) {}

    std::vector< sexpr > read_all()
    {
        std::vector< sexpr > forms;
        skip_blank();
        while ( !at_end() )
        {
            forms.push_back( read_one() );
            skip_blank();
        }
        return forms;
    }

private:
    std::string_view _text;
    std::size_t _pos = 0;
    int _line = 1;
    int _col = 1;

    [[nodiscard]] bool at_end() const { return _pos >= _text.size(); }
    [[nodiscard]] char peek() const { return _text[ _pos ]; }
    [[nodiscard]] source_loc here() const { return { _line, _col }; }

    void advance()
    {
        if ( _text[ _pos ] == '\n' )
        {
            ++_line;
            _col = 1;
        }
        else
            ++_col;
        ++_pos;
    }

    void skip_blank()
    {
        while ( !at_end() )
        {
            const char c = peek();
            if ( c == ';' )
            {
                while ( !at_end() && peek() != '\n' )
                    advance();
            }
            else if ( std::isspace( static_cast< unsigned char >( c ) ) )
                advance();
            else
                break;
        }
    }

    static bool is_delimiter( char c )
    {
        return std::isspace( static_cast< unsigned char >( c ) ) || c == '(' || c == ')' ||
               c == ';' || c == '\'';
    }

    sexpr read_one()
    {
        const auto loc = here();
        const char c = peek();
        if ( c == '(' )
        {
            advance();
            std::vector< sexpr > children;
            for ( ;; )
            {
                skip_blank();
                if ( at_end() )
                    throw syntax_error( "unbalanced parentheses: '(' never closed", loc );
                if ( peek() == ')' )
                {
                    advance();
                    return sexpr::list( std::move( children ), loc );
                }
                children.push_back( read_one() );
            }
        }
        if ( c == ')' )
            throw syntax_error( "unbalanced parentheses: unexpected ')'", loc );
        if ( c == '\'' )
        {
            // A quoted datum is the datum itself: there is no evaluation step.
            advance();
            skip_blank();
            if ( at_end() || peek() == ')' )
                throw syntax_error( "quote without a datum", loc );
            return read_one();
        }
        return read_atom( loc );
    }

    sexpr read_atom( source_loc loc )
    {
        std::string token;
        while ( !at_end() && !is_delimiter( peek() ) )
        {
            token += peek();
            advance();
        }
        if ( auto number = parse_integer( token ) )
            return sexpr::integer( *number, loc );
        for ( auto& ch : token )
            ch = static_cast< char >( std::toupper( static_cast< unsigned char >( ch ) ) );
        return sexpr::symbol( std::move( token ), loc );
    }

    static std::optional< std::int64_t > parse_integer( const std::string& token )
    {
        std::size_t i = 0;
        if ( !token.empty() && ( token[ 0 ] == '-' || token[ 0 ] == '+' ) )
            i = 1;
        if ( i >= token.size() )
            return std::nullopt;
        for ( std::size_t j = i; j < token.size(); ++j )
            if ( !std::isdigit( static_cast< unsigned char >( token[ j ] ) ) )
                return std::nullopt;
        try
        {
            return std::stoll( token );
        }
        catch ( const std::out_of_range& )
        {
            return std::nullopt;
        }
    }
};

} // namespace detail

/// Reads every top-level form of `text`. `;` starts a line comment and `'x`
/// reads as `x`.
inline std::vector< sexpr > read_sexprs( std::string_view text )
{
    return detail::sexpr_reader( text ).read_all();
}

} // namespace plbmc
