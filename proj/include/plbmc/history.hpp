#pragma once

#include "formula.hpp"

#include <optional>
#include <vector>

namespace plbmc
{

/// One HCC constraint: `atom` has the given truth value at `instant`.
struct history_fact
{
    int instant = 0;
    formula atom;
    bool polarity = true;

    friend bool operator==( const history_fact&, const history_fact& ) = default;
};

/// A partial (or total) history. Atoms that are not mentioned stay
/// unconstrained; loop markers, when present, pin the loop selectors.
struct partial_history
{
    std::vector< history_fact > facts;
    std::optional< int > loop;
    std::optional< int > pool;

    [[nodiscard]] bool empty() const { return facts.empty() && !loop && !pool; }

    /// First instant+atom that is asserted with both polarities, if any.
    [[nodiscard]] std::optional< history_fact > contradiction() const
    {
        for ( std::size_t i = 0; i < facts.size(); ++i )
            for ( std::size_t j = i + 1; j < facts.size(); ++j )
                if ( facts[ i ].instant == facts[ j ].instant && facts[ i ].atom == facts[ j ].atom &&
                     facts[ i ].polarity != facts[ j ].polarity )
                    return facts[ i ];
        return std::nullopt;
    }
};

} // namespace plbmc
