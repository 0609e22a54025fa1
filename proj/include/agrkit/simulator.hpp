#pragma once

#include "agrkit/checker.hpp"
#include "agrkit/dynamics.hpp"
#include "agrkit/trace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace agrkit
{

using PartAtom = std::pair<AtomicPart, Atom>;

/// If the antecedent holds at t, the consequent atoms hold during
/// [t+d, t+d+h-1] for some delay d in [e, f].
struct LeadsToRule
{
    Identifier property; // the property the rule was extracted from
    Filing filing = Filing::role;
    Identifier element;
    std::vector<PartAtom> positive; // antecedent literals
    std::vector<PartAtom> negative;
    std::vector<PartAtom> consequent;
    long e = 0;
    long f = 0;
    long h = 1;
};

struct Residue
{
    Identifier property;
    std::string reason;
};

struct Extraction
{
    std::vector<LeadsToRule> rules;
    std::vector<Residue> residue;
};

/// Splits role, transfer and interaction properties of leads-to shape into
/// rules; everything else is residue, to be checked after simulation.
[[nodiscard]] Extraction extract_executable( const AGRDyn& dyn );

/// Pattern match of one property; the reason is set when it is not executable.
[[nodiscard]] std::optional<LeadsToRule> match_leads_to( const AGRDyn& dyn, const DynProperty& p, std::string* reason = nullptr );

namespace rules
{
inline constexpr const char* rule_direction = "rule-direction";
inline constexpr const char* rule_undeclared_part = "rule-undeclared-part";
inline constexpr const char* rule_delay = "rule-delay";
} // namespace rules

/// Direction (role in->out, transfer out->in, interaction in->out), delay and part checks.
[[nodiscard]] std::vector<Violation> check_rules( const AGRDyn& dyn, const std::vector<LeadsToRule>& rules );

struct StimuliSchedule
{
    std::string id = "stimuli";
    std::vector<TimedAtom> items;
};

/// Header `stimuli <id>`, then `<t> <part> <atom>` lines. Throws ParseError.
[[nodiscard]] StimuliSchedule read_stimuli( std::string_view text, const TraceSchema& schema = {} );
[[nodiscard]] std::string write_stimuli( const StimuliSchedule& s );
[[nodiscard]] StimuliSchedule load_stimuli( const std::string& path, const TraceSchema& schema = {} );

struct SimulationOptions
{
    int horizon = 50;
    std::optional<std::uint64_t> seed; // unseeded runs use the minimal delay
    ExecPolicy policy = default_policy();
    std::string trace_id = "sim";
};

/// Time-stepped execution. Stimuli past the horizon and firings scheduled
/// past it are dropped. Throws PreconditionError for a negative horizon or
/// rules that break check_rules.
[[nodiscard]] Trace simulate( const AGRDyn& dyn, const std::vector<LeadsToRule>& rules, const StimuliSchedule& stimuli,
                              const SimulationOptions& opts );

} // namespace agrkit
