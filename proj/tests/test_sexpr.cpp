#include <plbmc/sexpr.hpp>

#include <gtest/gtest.h>

using namespace plbmc;

TEST( Sexpr, ReadsNestedLists )
{
    const auto forms = read_sexprs( "(until_ie (-P- a) (next (-P- b)))" );
    ASSERT_EQ( forms.size(), 1U );
    EXPECT_EQ( forms[ 0 ].str(), "(UNTIL_IE (-P- A) (NEXT (-P- B)))" );
    EXPECT_EQ( forms[ 0 ].head(), "UNTIL_IE" );
    EXPECT_EQ( forms[ 0 ].size(), 3U );
}

TEST( Sexpr, SymbolsFoldToUpperCase )
{
    const auto a = read_sexprs( "Until_Ie until_ie UNTIL_IE" );
    ASSERT_EQ( a.size(), 3U );
    EXPECT_EQ( a[ 0 ], a[ 1 ] );
    EXPECT_EQ( a[ 1 ], a[ 2 ] );
}

TEST( Sexpr, IntegersAreIntegers )
{
    const auto a = read_sexprs( "(futr x 42) -3" );
    EXPECT_TRUE( a[ 0 ][ 2 ].is_integer() );
    EXPECT_EQ( a[ 0 ][ 2 ].value(), 42 );
    EXPECT_TRUE( a[ 1 ].is_integer() );
    EXPECT_EQ( a[ 1 ].value(), -3 );
    EXPECT_TRUE( read_sexprs( "-P-" )[ 0 ].is_symbol() );
}

TEST( Sexpr, QuoteIsStripped )
{
    EXPECT_EQ( read_sexprs( "'N" )[ 0 ], sexpr::symbol( "N" ) );
    EXPECT_EQ( read_sexprs( "'(1 2)" )[ 0 ].str(), "(1 2)" );
    EXPECT_EQ( read_sexprs( "(state= p 'C)" )[ 0 ].str(), "(STATE= P C)" );
}

TEST( Sexpr, CommentsAndBlanksSkipped )
{
    const auto a = read_sexprs( "; header\n(a ; inline\n  b)\n\n; trailer" );
    ASSERT_EQ( a.size(), 1U );
    EXPECT_EQ( a[ 0 ].str(), "(A B)" );
}

TEST( Sexpr, EmptyInputHasNoForms )
{
    EXPECT_TRUE( read_sexprs( "" ).empty() );
    EXPECT_TRUE( read_sexprs( "  ; only a comment\n" ).empty() );
    EXPECT_EQ( read_sexprs( "()" )[ 0 ].size(), 0U );
}

TEST( Sexpr, UnclosedParenReportsPosition )
{
    try
    {
        read_sexprs( "(a\n  (b c)\n  (d" );
        FAIL() << "expected syntax_error";
    }
    catch ( const syntax_error& e )
    {
        EXPECT_EQ( e.where().line, 3 );
        EXPECT_EQ( e.where().column, 3 );
        EXPECT_NE( std::string( e.what() ).find( "never closed" ), std::string::npos );
    }
}

TEST( Sexpr, StrayCloseParen )
{
    try
    {
        read_sexprs( "(a b))" );
        FAIL() << "expected syntax_error";
    }
    catch ( const syntax_error& e )
    {
        EXPECT_EQ( e.where().line, 1 );
        EXPECT_EQ( e.where().column, 6 );
    }
}

TEST( Sexpr, DanglingQuote )
{
    EXPECT_THROW( read_sexprs( "(a ')" ), syntax_error );
    EXPECT_THROW( read_sexprs( "'" ), syntax_error );
}

TEST( Sexpr, LocationsRecorded )
{
    const auto a = read_sexprs( "\n  (x\n     y)" );
    EXPECT_EQ( a[ 0 ].loc().line, 2 );
    EXPECT_EQ( a[ 0 ].loc().column, 3 );
    EXPECT_EQ( a[ 0 ][ 1 ].loc().line, 3 );
    EXPECT_EQ( a[ 0 ][ 1 ].loc().column, 6 );
}

TEST( Sexpr, PrintThenReadRoundTrips )
{
    const std::string text = "(&& (-P- P) (!! (-P- Q 1 ONE)) (FUTR (-P- R) 3) ())";
    const auto a = read_sexprs( text );
    EXPECT_EQ( a[ 0 ].str(), text );
    EXPECT_EQ( read_sexprs( a[ 0 ].str() )[ 0 ], a[ 0 ] );
}

TEST( Sexpr, BuiltValuesCompareStructurally )
{
    const auto built = sexpr::list( { sexpr::symbol( "NEXT" ), sexpr::list( { sexpr::symbol( "-P-" ), sexpr::symbol( "A" ) } ) } );
    EXPECT_EQ( built, read_sexprs( "(next (-P- a))" )[ 0 ] );
    EXPECT_FALSE( sexpr::integer( 1 ) == sexpr::symbol( "1" ) );
}
