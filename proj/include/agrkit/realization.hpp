#pragma once

#include "agrkit/checker.hpp"
#include "agrkit/dynamics.hpp"

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace agrkit
{

struct Realization
{
    std::vector<Identifier> agents;
    std::set<std::pair<Identifier, Identifier>> fulfils; // (agent, role)

    [[nodiscard]] bool has_agent( const Identifier& a ) const;
    [[nodiscard]] std::set<Identifier> roles_of( const Identifier& agent ) const;
    [[nodiscard]] std::set<Identifier> agents_of( const Identifier& role ) const;
};

struct AgentProperty
{
    Identifier id;
    bool communication = false;
    Identifier agent; // agent properties
    Identifier from;  // communication properties
    Identifier to;
    std::string text;
    ParsedProperty parsed;
    FormulaPtr core; // with agent parts replaced by the role parts they alias
    std::string unbound; // set, with core null, when an agent part aliases no fulfilled role
    int line = 0;
};

struct RealizationDyn
{
    std::map<Identifier, Ontology> input_ontologies;  // per agent
    std::map<Identifier, Ontology> output_ontologies; // per agent
    std::vector<AgentProperty> properties;

    [[nodiscard]] std::vector<const AgentProperty*> agent_properties( const Identifier& agent ) const;
    [[nodiscard]] std::vector<const AgentProperty*> comm_properties( const Identifier& from, const Identifier& to ) const;
};

/// An agent interface part and the role parts it stands for.
struct Alias
{
    std::string agent_part; // e.g. input(agentA1)
    std::vector<AtomicPart> role_parts;
};

struct RealizationModel
{
    Realization real;
    RealizationDyn rdyn;
    std::vector<Alias> aliases; // in order of first use
};

/// Parses the realization DSL against a model. Agent parts input(a) and
/// output(a) are aliased to the parts of the fulfilled roles whose ontology
/// declares the predicates used. Throws ParseError. An unbound alias
/// only marks the property; check_realization then throws TypeError.
[[nodiscard]] RealizationModel parse_realization( std::string_view text, const AGRDyn& dyn );
[[nodiscard]] RealizationModel load_realization( const std::string& path, const AGRDyn& dyn );

namespace rules
{
inline constexpr const char* ontology_inclusion = "ontology-inclusion";
inline constexpr const char* intergroup_single_agent = "intergroup-single-agent";
inline constexpr const char* unfulfilled_role = "unfulfilled-role";
inline constexpr const char* shared_role = "shared-role";
inline constexpr const char* self_communication = "self-communication";
inline constexpr const char* undeclared_agent = "undeclared-agent";
} // namespace rules

struct RealizationOptions
{
    bool overlap = false; // ontology inclusion failures become warnings unless nothing overlaps
};

[[nodiscard]] std::vector<Violation> validate_realization( const AGRDyn& dyn, const Realization& real, const RealizationDyn& rdyn,
                                                           const RealizationOptions& opts = {} );

struct EntailmentVerdict
{
    std::string schema; // agent-role, agent-interaction or communication-transfer
    std::string subject; // agent or agent pair
    Identifier consequent;
    std::vector<Identifier> antecedents;
    bool refuted = false;
    std::string trace;
    std::string witness;
};

/// One verdict per consequent: refuted when some trace makes every
/// antecedent hold and the consequent fail.
[[nodiscard]] std::vector<EntailmentVerdict> check_entailment_on_traces( const std::vector<std::pair<Identifier, FormulaPtr>>& antecedents,
                                                                         const std::vector<std::pair<Identifier, FormulaPtr>>& consequents,
                                                                         const std::vector<const Trace*>& traces, const CheckOptions& opts = {} );

/// The three relationship schemata: agent properties against the properties
/// of each fulfilled role and of each interaction whose roles the agent
/// fulfils, and communication properties against transfer properties.
[[nodiscard]] std::vector<EntailmentVerdict> check_realization( const AGRDyn& dyn, const RealizationModel& rm, const std::vector<const Trace*>& traces,
                                                                const CheckOptions& opts = {} );

} // namespace agrkit
