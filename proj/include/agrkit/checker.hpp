#pragma once

#include "agrkit/formula.hpp"
#include "agrkit/property_parser.hpp"

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace agrkit
{

/// Finite-trace truth value. The order is the truth order, so Kleene
/// conjunction is `min` and disjunction is `max`.
enum class Truth
{
    fails,
    inconclusive,
    holds
};

[[nodiscard]] const char* to_string( Truth t );
[[nodiscard]] constexpr Truth kleene_not( Truth a ) { return static_cast<Truth>( 2 - static_cast<int>( a ) ); }
[[nodiscard]] constexpr Truth kleene_and( Truth a, Truth b ) { return a < b ? a : b; }
[[nodiscard]] constexpr Truth kleene_or( Truth a, Truth b ) { return a < b ? b : a; }
[[nodiscard]] constexpr Truth kleene_implies( Truth a, Truth b ) { return kleene_or( kleene_not( a ), b ); }

/// A quantifier decision on the path to the verdict, e.g. `t = 15` or `t = 0..20 (all)`.
struct Binding
{
    std::string var;
    std::string value;

    bool operator==( const Binding& ) const = default;
};

struct Verdict
{
    Truth truth = Truth::holds;
    std::string trace; // trace that decided the verdict, if any
    std::vector<Binding> witness;
    std::string explanation;
};

[[nodiscard]] std::string witness_text( const Verdict& v );

enum class ExecPolicy
{
    serial,
    parallel
};

/// `parallel` unless AGRKIT_NO_PARALLEL=1 is set.
[[nodiscard]] ExecPolicy default_policy();

struct CheckOptions
{
    const OrgStructure* org = nullptr; // needed for group and organisation parts
    ExecPolicy policy = default_policy();
    bool explain = true; // compute witness and explanation
};

/// Three-valued check. A formula without trace variables is checked on every
/// supplied trace and the verdicts are conjoined; a formula with trace
/// quantifiers ranges them over the supplied set.
[[nodiscard]] Verdict check_property( const Formula& f, std::span<const Trace* const> traces, const CheckOptions& opts = {} );
[[nodiscard]] Verdict check_property( const Formula& f, const Trace& trace, const CheckOptions& opts = {} );
[[nodiscard]] Verdict check_property( const ParsedProperty& p, std::span<const Trace* const> traces, const CheckOptions& opts = {} );

/// The core formula of a parsed property, compiling LTL when needed.
[[nodiscard]] FormulaPtr core_of( const ParsedProperty& p );

using Scope = std::map<AtomicPart, std::set<std::string>>;

/// Atomic parts touched by the formula with the predicates used at each.
[[nodiscard]] Scope scope_of( const Formula& f, const OrgStructure* org = nullptr );

/// True when the formula quantifies over traces.
[[nodiscard]] bool is_multi_trace( const Formula& f );

} // namespace agrkit
