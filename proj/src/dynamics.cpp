#include "agrkit/dynamics.hpp"

#include "agrkit/error.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace agrkit
{

const char* to_string( Filing f )
{
    switch ( f )
    {
    case Filing::role: return "role";
    case Filing::transfer: return "transfer";
    case Filing::group: return "group";
    case Filing::interaction: return "interaction";
    case Filing::organisation: return "organisation";
    }
    return "?";
}

const char* to_string( PropertyType t )
{
    switch ( t )
    {
    case PropertyType::role: return "role";
    case PropertyType::transfer: return "transfer";
    case PropertyType::group: return "group";
    case PropertyType::intragroup: return "intragroup";
    case PropertyType::intergroup: return "intergroup";
    case PropertyType::organisation: return "organisation";
    }
    return "?";
}

const DynProperty* AGRDyn::find( const Identifier& id ) const
{
    for ( const auto& p : properties )
        if ( p.id == id )
            return &p;
    return nullptr;
}

const DynProperty& AGRDyn::at( const Identifier& id ) const
{
    if ( const auto* p = find( id ) )
        return *p;
    throw UnknownIdentifier( "property", id );
}

std::vector<const DynProperty*> AGRDyn::filed_under( Filing filing, const Identifier& element ) const
{
    std::vector<const DynProperty*> out;
    for ( const auto& p : properties )
        if ( p.filing == filing && p.element == element )
            out.push_back( &p );
    return out;
}

std::vector<const DynProperty*> AGRDyn::filed_as( Filing filing ) const
{
    std::vector<const DynProperty*> out;
    for ( const auto& p : properties )
        if ( p.filing == filing )
            out.push_back( &p );
    return out;
}

Ontology AGRDyn::ontology_of( const Identifier& role ) const
{
    Ontology out;
    if ( auto it = input_ontologies.find( role ); it != input_ontologies.end() )
        out.merge( it->second );
    if ( auto it = output_ontologies.find( role ); it != output_ontologies.end() )
        out.merge( it->second );
    return out;
}

const Ontology* AGRDyn::part_ontology( const AtomicPart& part ) const
{
    static const Ontology empty;
    const auto& mine = part.direction == Direction::input ? input_ontologies : output_ontologies;
    const auto& other = part.direction == Direction::input ? output_ontologies : input_ontologies;
    if ( auto it = mine.find( part.role ); it != mine.end() )
        return &it->second;
    // a role with only one declared side has an empty ontology on the other
    return other.count( part.role ) ? &empty : nullptr;
}

namespace
{

bool element_declared( const OrgStructure& org, Filing filing, const Identifier& element )
{
    switch ( filing )
    {
    case Filing::role: return org.has_role( element );
    case Filing::transfer: return org.has_transfer( element );
    case Filing::group: return org.has_group( element );
    case Filing::interaction: return org.has_interaction( element );
    case Filing::organisation: return true;
    }
    return false;
}

const char* rule_of( Filing filing )
{
    switch ( filing )
    {
    case Filing::role: return rules::c1_role;
    case Filing::transfer: return rules::c2_transfer;
    case Filing::group: return rules::c3_group;
    case Filing::interaction: return rules::c4_interaction;
    case Filing::organisation: return rules::c5_organisation;
    }
    return "?";
}

void both_sides( const Identifier& r, std::vector<AtomicPart>& out )
{
    out.push_back( { Direction::input, r } );
    out.push_back( { Direction::output, r } );
}

// Output parts of exactly two distinct roles, both in `group`.
bool intragroup_shaped( const OrgStructure& org, const Scope& scope, const Identifier& group )
{
    std::set<Identifier> roles;
    for ( const auto& [part, preds] : scope )
    {
        if ( part.direction != Direction::output )
            return false;
        roles.insert( part.role );
    }
    if ( roles.size() != 2 )
        return false;
    return std::all_of( roles.begin(), roles.end(), [&]( const Identifier& r ) { return org.role_in.count( { r, group } ) > 0; } );
}

void predicates_of( const StateProp& s, std::set<std::string>& out )
{
    if ( s.op == StateProp::Op::atom )
        out.insert( s.atom.predicate );
    if ( s.lhs )
        predicates_of( *s.lhs, out );
    if ( s.rhs )
        predicates_of( *s.rhs, out );
}

// Reports each (part, predicate) use that no ontology of the part declares.
// Aggregate parts accept a predicate declared by any of their atomic parts;
// parts without any ontology are left to the missing-ontology warning.
template<class Report> void check_predicates( const AGRDyn& dyn, const Formula& f, Report&& report )
{
    std::set<std::pair<PartRef, std::string>> seen;
    std::function<void( const Formula& )> walk = [&]( const Formula& g ) {
        if ( g.op == Formula::Op::holds )
        {
            std::set<std::string> preds;
            predicates_of( *g.state, preds );
            std::vector<const Ontology*> ontos;
            for ( const auto& part : expand_part( g.part, &dyn.org ) )
                if ( const auto* o = dyn.part_ontology( part ) )
                    ontos.push_back( o );
            if ( ontos.empty() )
                return;
            for ( const auto& pred : preds )
                if ( std::none_of( ontos.begin(), ontos.end(), [&]( const Ontology* o ) { return o->declares( pred ); } ) &&
                     seen.insert( { g.part, pred } ).second )
                    report( g.part, pred );
            return;
        }
        if ( g.lhs )
            walk( *g.lhs );
        if ( g.rhs )
            walk( *g.rhs );
    };
    walk( f );
}

std::string describe( const DynProperty& p )
{
    std::string where = p.filing == Filing::organisation ? "the organisation" : std::string( to_string( p.filing ) ) + " '" + p.element + "'";
    return "property '" + p.id + "' of " + where;
}

} // namespace

std::vector<AtomicPart> permitted_parts( const AGRDyn& dyn, Filing filing, const Identifier& element )
{
    const auto& org = dyn.org;
    std::vector<AtomicPart> out;
    if ( !element_declared( org, filing, element ) )
        return out;
    switch ( filing )
    {
    case Filing::role: both_sides( element, out ); break;
    case Filing::transfer:
    {
        auto src = org.transfer_source( element );
        auto dst = org.transfer_destination( element );
        if ( src && dst )
        {
            out.push_back( { Direction::output, *src } );
            out.push_back( { Direction::input, *dst } );
        }
        break;
    }
    case Filing::group:
        for ( const auto& r : org.roles_of( element ) )
            both_sides( r, out );
        break;
    case Filing::interaction:
    {
        auto src = org.interaction_source( element );
        auto dst = org.interaction_destination( element );
        if ( src && dst )
        {
            out.push_back( { Direction::input, *src } );
            out.push_back( { Direction::output, *dst } );
        }
        break;
    }
    case Filing::organisation:
        for ( const auto& r : std::set<Identifier>( org.roles.begin(), org.roles.end() ) )
            both_sides( r, out );
        break;
    }
    std::sort( out.begin(), out.end() );
    out.erase( std::unique( out.begin(), out.end() ), out.end() );
    return out;
}

std::vector<Violation> validate_dynamics( const AGRDyn& dyn )
{
    std::vector<Violation> out;
    const auto& org = dyn.org;

    for ( const auto& [role, onto] : dyn.input_ontologies )
        if ( !org.has_role( role ) )
            out.push_back( { rules::undeclared_element, { role }, "ontology declared for undeclared role '" + role + "'" } );
    for ( const auto& [role, onto] : dyn.output_ontologies )
        if ( !org.has_role( role ) && !dyn.input_ontologies.count( role ) )
            out.push_back( { rules::undeclared_element, { role }, "ontology declared for undeclared role '" + role + "'" } );

    std::set<Identifier> without_ontology;
    for ( const auto& p : dyn.properties )
    {
        if ( !element_declared( org, p.filing, p.element ) )
        {
            out.push_back( { rules::undeclared_element, { p.id, p.element }, describe( p ) + " is filed under an undeclared element" } );
            continue;
        }
        Scope scope;
        try
        {
            scope = scope_of( *p.core, &org );
        }
        catch ( const UnknownIdentifier& e )
        {
            out.push_back( { rules::undeclared_element, { p.id, e.name() }, describe( p ) + ": " + e.what() } );
            continue;
        }

        const char* rule = rule_of( p.filing );
        auto allowed = permitted_parts( dyn, p.filing, p.element );
        for ( const auto& [part, preds] : scope )
        {
            if ( !std::binary_search( allowed.begin(), allowed.end(), part ) )
            {
                out.push_back( { rule, { p.id, to_string( part ) }, describe( p ) + " refers to " + to_string( part ) + ", which is outside its scope" } );
                continue;
            }
            if ( !dyn.part_ontology( part ) )
                without_ontology.insert( part.role );
        }
        check_predicates( dyn, *p.core, [&]( const PartRef& part, const std::string& pred ) {
            out.push_back( { rule,
                             { p.id, to_string( part ), pred },
                             describe( p ) + " uses predicate '" + pred + "' at " + to_string( part ) + ", which is not in its ontology" } );
        } );

        if ( p.intragroup && !intragroup_shaped( org, scope, p.element ) )
            out.push_back( { rules::intragroup_shape, { p.id }, describe( p ) + " is tagged intragroup but does not relate the outputs of two roles of the group" } );

        if ( p.filing == Filing::role )
        {
            bool in = scope.count( { Direction::input, p.element } ) > 0;
            bool outp = scope.count( { Direction::output, p.element } ) > 0;
            if ( !in || !outp )
                out.push_back( { rules::role_one_sided,
                                 { p.id },
                                 describe( p ) + " mentions only the " + ( in ? "input" : "output" ) + " of the role",
                                 Severity::warning } );
        }
    }
    for ( const auto& r : without_ontology )
        out.push_back( { rules::missing_ontology, { r }, "role '" + r + "' has properties but no ontology; predicates are not checked", Severity::warning } );
    return out;
}

PropertyType property_type_of( const AGRDyn& dyn, const Identifier& id )
{
    const auto& p = dyn.at( id );
    auto scope = scope_of( *p.core, &dyn.org );
    auto allowed = permitted_parts( dyn, p.filing, p.element );
    for ( const auto& [part, preds] : scope )
        if ( !std::binary_search( allowed.begin(), allowed.end(), part ) )
            throw TypeError( describe( p ) + " refers to " + to_string( part ) + ", which does not fit its filing" );
    switch ( p.filing )
    {
    case Filing::role: return PropertyType::role;
    case Filing::transfer: return PropertyType::transfer;
    case Filing::interaction: return PropertyType::intergroup;
    case Filing::organisation: return PropertyType::organisation;
    case Filing::group:
        if ( p.intragroup || intragroup_shaped( dyn.org, scope, p.element ) )
            return PropertyType::intragroup;
        return PropertyType::group;
    }
    return PropertyType::organisation;
}

namespace
{

void check_atoms( const AGRDyn& dyn, const StateProp& s, const std::vector<AtomicPart>& parts )
{
    if ( s.op == StateProp::Op::atom )
    {
        for ( const auto& part : parts )
        {
            const auto* onto = dyn.part_ontology( part );
            const auto* sig = onto ? onto->find( s.atom.predicate ) : nullptr;
            if ( !sig )
                continue;
            const auto& args = s.atom.args;
            if ( sig->arity() != args.size() )
                throw TypeError( "predicate '" + s.atom.predicate + "' has arity " + std::to_string( sig->arity() ) + " in the ontology of " +
                                 to_string( part ) + " but is used with " + std::to_string( args.size() ) + " argument(s)" );
            for ( std::size_t i = 0; i < args.size(); ++i )
            {
                bool numeric = args[i].kind != AtomArg::Kind::symbol;
                if ( ( sig->kinds[i] == ArgKind::symbol && numeric ) || ( sig->kinds[i] == ArgKind::number && !numeric ) )
                    throw TypeError( "argument " + std::to_string( i + 1 ) + " of '" + s.atom.predicate + "' must be a " +
                                     ( sig->kinds[i] == ArgKind::number ? "number" : "symbol" ) );
            }
        }
    }
    if ( s.lhs )
        check_atoms( dyn, *s.lhs, parts );
    if ( s.rhs )
        check_atoms( dyn, *s.rhs, parts );
}

} // namespace

void type_check( const AGRDyn& dyn, const Formula& f )
{
    if ( f.op == Formula::Op::holds )
    {
        std::vector<AtomicPart> parts;
        try
        {
            parts = expand_part( f.part, &dyn.org );
        }
        catch ( const UnknownIdentifier& )
        {
            return; // reported by validate_dynamics
        }
        check_atoms( dyn, *f.state, parts );
        return;
    }
    if ( f.lhs )
        type_check( dyn, *f.lhs );
    if ( f.rhs )
        type_check( dyn, *f.rhs );
}

} // namespace agrkit
