#pragma once

#include "agrkit/formula.hpp"

#include <string_view>

namespace agrkit
{

enum class Dialect
{
    ttl,
    ltl
};

struct ParsedProperty
{
    Dialect dialect = Dialect::ttl;
    FormulaPtr ttl; // set for ttl
    LtlPtr ltl;     // set for ltl
};

/// Parses `ttl: <formula>` or `ltl: <formula>`. Throws ParseError whose
/// column is the 1-based offset into `text`.
[[nodiscard]] ParsedProperty parse_property( std::string_view text );

/// Parses the temporal core without the dialect prefix.
[[nodiscard]] FormulaPtr parse_ttl( std::string_view text );

/// Parses the indexed LTL surface without the dialect prefix.
[[nodiscard]] LtlPtr parse_ltl( std::string_view text );

[[nodiscard]] StatePropPtr parse_state_prop( std::string_view text );

} // namespace agrkit
