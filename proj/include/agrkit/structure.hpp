#pragma once

#include "agrkit/violation.hpp"

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace agrkit
{

using Identifier = std::string;

/// Identifier syntax: non-empty run of letters, digits, '_' and '.'.
[[nodiscard]] bool is_identifier( const std::string& text );

/// Pair of (role, element) as used by every structural relation.
using RoleLink = std::pair<Identifier, Identifier>;

/// An AGR organisation structure.
///
/// Element lists keep declaration order and may contain duplicates; the
/// validator reports those. Relations are stored as (role, element) pairs.
struct OrgStructure
{
    Identifier name;
    std::vector<Identifier> groups;
    std::vector<Identifier> roles;
    std::vector<Identifier> transfers;
    std::vector<Identifier> interactions;

    std::set<RoleLink> role_in;                       // (role, group)
    std::vector<RoleLink> source_of_transfer;         // (role, transfer)
    std::vector<RoleLink> destination_of_transfer;    // (role, transfer)
    std::vector<RoleLink> source_of_interaction;      // (role, interaction)
    std::vector<RoleLink> destination_of_interaction; // (role, interaction)

    [[nodiscard]] bool has_group( const Identifier& g ) const;
    [[nodiscard]] bool has_role( const Identifier& r ) const;
    [[nodiscard]] bool has_transfer( const Identifier& t ) const;
    [[nodiscard]] bool has_interaction( const Identifier& i ) const;

    [[nodiscard]] std::set<Identifier> groups_of( const Identifier& role ) const;
    [[nodiscard]] std::set<Identifier> roles_of( const Identifier& group ) const;

    /// Sole source/destination role; empty when the endpoint is missing or ambiguous.
    [[nodiscard]] std::optional<Identifier> transfer_source( const Identifier& t ) const;
    [[nodiscard]] std::optional<Identifier> transfer_destination( const Identifier& t ) const;
    [[nodiscard]] std::optional<Identifier> interaction_source( const Identifier& i ) const;
    [[nodiscard]] std::optional<Identifier> interaction_destination( const Identifier& i ) const;

    [[nodiscard]] bool share_group( const Identifier& r1, const Identifier& r2 ) const;
};

enum class ElementKind
{
    group,
    transfer,
    interaction
};

/// Roles involved in a group, transfer or interaction. Throws UnknownIdentifier.
[[nodiscard]] std::set<Identifier> involved_roles( const OrgStructure& org, ElementKind kind, const Identifier& element );

/// Same as above, looking the identifier up among groups, transfers and interactions in that order.
[[nodiscard]] std::set<Identifier> involved_roles( const OrgStructure& org, const Identifier& element );

/// Rule ids reported by validate_structure.
namespace rules
{
inline constexpr const char* duplicate_identifier = "duplicate-identifier";
inline constexpr const char* bad_identifier = "bad-identifier";
inline constexpr const char* undeclared_role = "undeclared-role";
inline constexpr const char* undeclared_group = "undeclared-group";
inline constexpr const char* role_without_group = "role-without-group";
inline constexpr const char* transfer_endpoints = "transfer-endpoints";
inline constexpr const char* transfer_same_group = "transfer-same-group";
inline constexpr const char* interaction_endpoints = "interaction-endpoints";
inline constexpr const char* interaction_distinct_groups = "interaction-distinct-groups";
inline constexpr const char* undeclared_element = "undeclared-element";
inline constexpr const char* roletype_conflict = "roletype-conflict";
inline constexpr const char* undeclared_task = "undeclared-task";
inline constexpr const char* superior_cycle = "superior-cycle";
} // namespace rules

[[nodiscard]] std::vector<Violation> validate_structure( const OrgStructure& org );

enum class RoleType
{
    line,
    staff,
    functional_authority
};

[[nodiscard]] const char* to_string( RoleType type );
[[nodiscard]] std::optional<RoleType> role_type_from_string( const std::string& text );

struct Delegation
{
    Identifier from;
    Identifier task;
    Identifier to;

    auto operator<=>( const Delegation& ) const = default;
};

/// Formal-structure annotations: role types, superiors, task delegation and authority.
struct AuthorityAnnotations
{
    std::vector<Identifier> tasks;
    std::vector<std::pair<Identifier, RoleType>> role_of_type;
    std::set<RoleLink> superior_of; // (superior, subordinate)
    std::set<Delegation> delegates_task_to;
    std::set<RoleLink> authorised_for;  // (role, task)
    std::set<RoleLink> responsible_for; // (role, task)

    [[nodiscard]] std::optional<RoleType> type_of( const Identifier& role ) const;

    bool operator==( const AuthorityAnnotations& ) const = default;
};

[[nodiscard]] std::vector<Violation> validate_authority( const OrgStructure& org, const AuthorityAnnotations& ann );

/// Roles on a superior_of cycle (including self-loops), sorted; empty when acyclic.
[[nodiscard]] std::vector<Identifier> superior_cycle( const AuthorityAnnotations& ann );

/// Least fixpoint of the line-authority rule: a line superior that is authorised
/// and responsible for a task it delegates to a line subordinate passes both on.
/// Throws CycleError when superior_of is cyclic.
[[nodiscard]] AuthorityAnnotations line_authority_closure( const OrgStructure& org, const AuthorityAnnotations& ann );

} // namespace agrkit
