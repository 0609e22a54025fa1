#pragma once

#include "agrkit/dynamics.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace agrkit
{

enum class RelationLevel
{
    group,       // role/transfer properties of a group imply a group property
    organisation // group, transfer and intergroup properties imply an organisation property
};

/// con(antecedents) => consequent, stored by property id.
struct InterlevelRelation
{
    Identifier id;
    RelationLevel level = RelationLevel::group;
    Identifier group; // for group-level relations
    Identifier consequent;
    std::vector<Identifier> antecedents;
    int line = 0;
};

struct InterlevelAssignment
{
    std::vector<InterlevelRelation> relations;

    [[nodiscard]] std::vector<const InterlevelRelation*> for_group( const Identifier& g ) const;
    [[nodiscard]] std::vector<const InterlevelRelation*> for_organisation() const;
    [[nodiscard]] std::vector<const InterlevelRelation*> with_consequent( const Identifier& id ) const;
};

/// Every group property is implied by all role and transfer properties of its
/// group; every organisation property by all group, transfer and intergroup
/// interaction properties.
[[nodiscard]] InterlevelAssignment standard_assignment( const AGRDyn& dyn );

namespace rules
{
inline constexpr const char* relation_filing = "relation-filing";
inline constexpr const char* relation_antecedent = "relation-antecedent";
inline constexpr const char* relation_cycle = "relation-cycle";
inline constexpr const char* unused_antecedent = "unused-antecedent";
} // namespace rules

/// Filing and antecedent-set checks, the acyclicity of the induced AND-tree,
/// and the unused-antecedent lint (warnings).
[[nodiscard]] std::vector<Violation> validate_assignment( const InterlevelAssignment& a, const AGRDyn& dyn );

struct Coverage
{
    bool ok = true;
    std::vector<Identifier> missing; // sorted
};

/// Every group property used as an organisation-level antecedent is the
/// consequent of some relation of its group.
[[nodiscard]] Coverage check_connected( const InterlevelAssignment& a, const AGRDyn& dyn );

/// Every declared group and organisation property is the consequent of some relation.
[[nodiscard]] Coverage check_complete( const InterlevelAssignment& a, const AGRDyn& dyn );

/// Verdict cache for properties over a fixed trace set.
class PropertyOracle
{
public:
    PropertyOracle( const AGRDyn& dyn, std::vector<const Trace*> traces, CheckOptions opts = {} );

    [[nodiscard]] const Verdict& verdict( const Identifier& id );
    [[nodiscard]] const std::vector<const Trace*>& traces() const { return _traces; }
    [[nodiscard]] const AGRDyn& dyn() const { return _dyn; }

private:
    const AGRDyn& _dyn;
    std::vector<const Trace*> _traces;
    CheckOptions _opts;
    std::map<Identifier, Verdict> _cache;
};

struct RelationVerdict
{
    Identifier relation;
    bool falsified = false;
    std::string trace; // falsifying trace
    std::string witness;
};

/// A relation is falsified when some trace makes every antecedent hold and
/// the consequent fail. Inconclusive verdicts never falsify. Results follow
/// the order of `a.relations`.
[[nodiscard]] std::vector<RelationVerdict> falsify_on_traces( const InterlevelAssignment& a, const AGRDyn& dyn,
                                                              const std::vector<const Trace*>& traces, const CheckOptions& opts = {} );

struct PropositionReport
{
    bool applicable = false;
    std::string reason;              // why not applicable
    bool part_a = false;             // all group properties in the assignment hold
    bool part_b = false;             // complete assignment: all group and organisation properties hold
    bool complete = false;           // whether part (b) was asserted
    std::vector<Identifier> failing; // consequents that did not hold although the premises did
};

[[nodiscard]] PropositionReport verify_proposition( const AGRDyn& dyn, const InterlevelAssignment& a, const Trace& trace,
                                                    const CheckOptions& opts = {} );

struct AndTreeNode
{
    Identifier id;
    PropertyType type = PropertyType::organisation;
    std::vector<Identifier> children; // antecedents of every relation with this consequent
};

struct AndTree
{
    std::vector<Identifier> roots;           // consequents that are nobody's antecedent
    std::map<Identifier, AndTreeNode> nodes; // every id in the assignment
};

/// Throws CycleError when relations imply each other in a cycle.
[[nodiscard]] AndTree build_and_tree( const InterlevelAssignment& a, const AGRDyn& dyn );

/// Indented tree, one node per line; shared subtrees are printed once and referenced afterwards.
[[nodiscard]] std::string render_tree( const AndTree& tree );

/// `edge <consequent> <antecedent>` lines in deterministic order.
[[nodiscard]] std::string render_adjacency( const AndTree& tree );

struct Diagnosis
{
    Identifier failing;
    std::vector<Identifier> culprits;                     // failing leaves and falsified relations, sorted
    std::vector<Identifier> falsified;                    // nodes whose antecedents all hold
    std::vector<Identifier> inconclusive;                 // nodes with no failing but some inconclusive antecedent
    std::vector<std::pair<Identifier, Identifier>> path; // edges followed, in visit order
};

/// Descends the AND-tree from a failing property into every failing
/// antecedent. Throws UnknownIdentifier when `failing` is not in the tree and
/// PreconditionError when it does not fail on the traces.
[[nodiscard]] Diagnosis diagnose( const InterlevelAssignment& a, PropertyOracle& oracle, const Identifier& failing );

} // namespace agrkit
