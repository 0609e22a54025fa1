#pragma once

#include "agrkit/checker.hpp"
#include "agrkit/property_parser.hpp"
#include "agrkit/structure.hpp"
#include "agrkit/trace.hpp"

#include <map>
#include <string>
#include <vector>

namespace agrkit
{

/// Where a dynamic property is filed in the model.
enum class Filing
{
    role,
    transfer,
    group,
    interaction,
    organisation
};

[[nodiscard]] const char* to_string( Filing f );

enum class PropertyType
{
    role,
    transfer,
    group,
    intragroup,
    intergroup,
    organisation
};

[[nodiscard]] const char* to_string( PropertyType t );

struct DynProperty
{
    Identifier id;
    Filing filing = Filing::organisation;
    Identifier element;      // empty for organisation properties
    bool intragroup = false; // group property tagged as an intragroup role interaction
    std::string text;        // source text after `:=`
    ParsedProperty parsed;
    FormulaPtr core; // parsed property in the temporal core
    int line = 0;
};

/// Ontologies and dynamic properties attached to an organisation structure.
struct AGRDyn
{
    OrgStructure org;
    std::map<Identifier, Ontology> input_ontologies;  // per role
    std::map<Identifier, Ontology> output_ontologies; // per role
    std::vector<DynProperty> properties;              // declaration order

    [[nodiscard]] const DynProperty* find( const Identifier& id ) const;
    /// Throws UnknownIdentifier.
    [[nodiscard]] const DynProperty& at( const Identifier& id ) const;
    [[nodiscard]] std::vector<const DynProperty*> filed_under( Filing filing, const Identifier& element = {} ) const;
    [[nodiscard]] std::vector<const DynProperty*> filed_as( Filing filing ) const;

    /// Union of input and output ontologies of a role.
    [[nodiscard]] Ontology ontology_of( const Identifier& role ) const;
    [[nodiscard]] const Ontology* part_ontology( const AtomicPart& part ) const;

    [[nodiscard]] TraceSchema schema() const { return { &org, &input_ontologies, &output_ontologies }; }
};

namespace rules
{
inline constexpr const char* c1_role = "C1";
inline constexpr const char* c2_transfer = "C2";
inline constexpr const char* c3_group = "C3";
inline constexpr const char* c4_interaction = "C4";
inline constexpr const char* c5_organisation = "C5";
inline constexpr const char* intragroup_shape = "intragroup-shape";
inline constexpr const char* role_one_sided = "role-one-sided";
inline constexpr const char* missing_ontology = "missing-ontology";
} // namespace rules

/// Atomic parts a property filed this way may touch. Empty when the element
/// is undeclared or its endpoints are not unique.
[[nodiscard]] std::vector<AtomicPart> permitted_parts( const AGRDyn& dyn, Filing filing, const Identifier& element );

/// Scope discipline C1..C5 plus the intragroup shape rule. Warnings for
/// one-sided role properties and roles without ontologies.
[[nodiscard]] std::vector<Violation> validate_dynamics( const AGRDyn& dyn );

/// Classifies a property by the parts it touches and checks the result
/// against its filing. Throws UnknownIdentifier for an unknown id and
/// TypeError when shape and filing disagree.
[[nodiscard]] PropertyType property_type_of( const AGRDyn& dyn, const Identifier& id );

/// Checks atom arities and argument kinds against the ontologies of the
/// parts they are used at. Throws TypeError.
void type_check( const AGRDyn& dyn, const Formula& f );

} // namespace agrkit
