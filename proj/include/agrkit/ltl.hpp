#pragma once

#include "agrkit/formula.hpp"

namespace agrkit
{

/// Translates the indexed LTL surface into the temporal core. The current
/// time is a universally quantified variable `t0` over the whole trace; each
/// modal operator becomes a holds atom or a bounded time quantifier relative to it.
[[nodiscard]] FormulaPtr compile_ltl( const LtlFormula& f );

} // namespace agrkit
