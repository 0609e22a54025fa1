#include "agrkit/structure.hpp"

#include "agrkit/error.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>

namespace agrkit
{

bool is_identifier( const std::string& text )
{
    if ( text.empty() )
        return false;
    return std::all_of( text.begin(), text.end(), []( unsigned char c ) { return std::isalnum( c ) || c == '_' || c == '.'; } );
}

namespace
{

bool contains( const std::vector<Identifier>& v, const Identifier& x )
{
    return std::find( v.begin(), v.end(), x ) != v.end();
}

std::vector<Identifier> roles_linked( const std::vector<RoleLink>& links, const Identifier& element )
{
    std::vector<Identifier> out;
    for ( const auto& [role, e] : links )
        if ( e == element && !contains( out, role ) )
            out.push_back( role );
    return out;
}

std::optional<Identifier> sole( const std::vector<RoleLink>& links, const Identifier& element )
{
    auto roles = roles_linked( links, element );
    if ( roles.size() != 1 )
        return std::nullopt;
    return roles.front();
}

void report_duplicates( const std::vector<Identifier>& ids, const char* kind, std::vector<Violation>& out )
{
    std::map<Identifier, int> seen;
    for ( const auto& id : ids )
        if ( ++seen[id] == 2 )
            out.push_back( { rules::duplicate_identifier, { id }, std::string( kind ) + " '" + id + "' declared more than once" } );
}

void report_bad_identifiers( const std::vector<Identifier>& ids, const char* kind, std::vector<Violation>& out )
{
    for ( const auto& id : ids )
        if ( !is_identifier( id ) )
            out.push_back( { rules::bad_identifier, { id }, std::string( kind ) + " name '" + id + "' is not a valid identifier" } );
}

} // namespace

bool OrgStructure::has_group( const Identifier& g ) const { return contains( groups, g ); }
bool OrgStructure::has_role( const Identifier& r ) const { return contains( roles, r ); }
bool OrgStructure::has_transfer( const Identifier& t ) const { return contains( transfers, t ); }
bool OrgStructure::has_interaction( const Identifier& i ) const { return contains( interactions, i ); }

std::set<Identifier> OrgStructure::groups_of( const Identifier& role ) const
{
    std::set<Identifier> out;
    for ( const auto& [r, g] : role_in )
        if ( r == role )
            out.insert( g );
    return out;
}

std::set<Identifier> OrgStructure::roles_of( const Identifier& group ) const
{
    std::set<Identifier> out;
    for ( const auto& [r, g] : role_in )
        if ( g == group )
            out.insert( r );
    return out;
}

std::optional<Identifier> OrgStructure::transfer_source( const Identifier& t ) const { return sole( source_of_transfer, t ); }
std::optional<Identifier> OrgStructure::transfer_destination( const Identifier& t ) const { return sole( destination_of_transfer, t ); }
std::optional<Identifier> OrgStructure::interaction_source( const Identifier& i ) const { return sole( source_of_interaction, i ); }
std::optional<Identifier> OrgStructure::interaction_destination( const Identifier& i ) const { return sole( destination_of_interaction, i ); }

bool OrgStructure::share_group( const Identifier& r1, const Identifier& r2 ) const
{
    auto g1 = groups_of( r1 );
    for ( const auto& g : groups_of( r2 ) )
        if ( g1.count( g ) )
            return true;
    return false;
}

std::set<Identifier> involved_roles( const OrgStructure& org, ElementKind kind, const Identifier& element )
{
    std::set<Identifier> out;
    switch ( kind )
    {
    case ElementKind::group:
        if ( !org.has_group( element ) )
            throw UnknownIdentifier( "group", element );
        return org.roles_of( element );
    case ElementKind::transfer:
        if ( !org.has_transfer( element ) )
            throw UnknownIdentifier( "transfer", element );
        for ( const auto& r : roles_linked( org.source_of_transfer, element ) )
            out.insert( r );
        for ( const auto& r : roles_linked( org.destination_of_transfer, element ) )
            out.insert( r );
        return out;
    case ElementKind::interaction:
        if ( !org.has_interaction( element ) )
            throw UnknownIdentifier( "interaction", element );
        for ( const auto& r : roles_linked( org.source_of_interaction, element ) )
            out.insert( r );
        for ( const auto& r : roles_linked( org.destination_of_interaction, element ) )
            out.insert( r );
        return out;
    }
    return out;
}

std::set<Identifier> involved_roles( const OrgStructure& org, const Identifier& element )
{
    if ( org.has_group( element ) )
        return involved_roles( org, ElementKind::group, element );
    if ( org.has_transfer( element ) )
        return involved_roles( org, ElementKind::transfer, element );
    if ( org.has_interaction( element ) )
        return involved_roles( org, ElementKind::interaction, element );
    throw UnknownIdentifier( "element", element );
}

namespace
{

// Shared endpoint checks for transfers and interactions. Returns the pair when
// both endpoints are unique and declared.
std::optional<std::pair<Identifier, Identifier>> check_endpoints( const OrgStructure& org, const Identifier& element, const char* kind,
                                                                  const std::vector<RoleLink>& sources, const std::vector<RoleLink>& destinations,
                                                                  const char* endpoint_rule, std::vector<Violation>& out )
{
    auto src = roles_linked( sources, element );
    auto dst = roles_linked( destinations, element );
    bool undeclared = false;
    for ( const auto* side : { &src, &dst } )
        for ( const auto& r : *side )
            if ( !org.has_role( r ) )
            {
                out.push_back( { rules::undeclared_role, { r, element }, std::string( kind ) + " '" + element + "' references undeclared role '" + r + "'" } );
                undeclared = true;
            }
    if ( src.size() != 1 || dst.size() != 1 )
    {
        out.push_back( { endpoint_rule, { element },
                         std::string( kind ) + " '" + element + "' needs exactly one source and one destination (has " + std::to_string( src.size() ) +
                             " and " + std::to_string( dst.size() ) + ")" } );
        return std::nullopt;
    }
    if ( undeclared )
        return std::nullopt;
    return std::make_pair( src.front(), dst.front() );
}

} // namespace

std::vector<Violation> validate_structure( const OrgStructure& org )
{
    std::vector<Violation> out;

    report_bad_identifiers( org.groups, "group", out );
    report_bad_identifiers( org.roles, "role", out );
    report_bad_identifiers( org.transfers, "transfer", out );
    report_bad_identifiers( org.interactions, "interaction", out );
    report_duplicates( org.groups, "group", out );
    report_duplicates( org.roles, "role", out );
    report_duplicates( org.transfers, "transfer", out );
    report_duplicates( org.interactions, "interaction", out );

    for ( const auto& [r, g] : org.role_in )
    {
        if ( !org.has_role( r ) )
            out.push_back( { rules::undeclared_role, { r, g }, "group '" + g + "' lists undeclared role '" + r + "'" } );
        if ( !org.has_group( g ) )
            out.push_back( { rules::undeclared_group, { r, g }, "role '" + r + "' placed in undeclared group '" + g + "'" } );
    }

    std::set<Identifier> reported;
    for ( const auto& r : org.roles )
        if ( org.groups_of( r ).empty() && reported.insert( r ).second )
            out.push_back( { rules::role_without_group, { r }, "role '" + r + "' is not in any group" } );

    auto check_links = [&]( const std::vector<RoleLink>& links, bool ( OrgStructure::*declared )( const Identifier& ) const, const char* kind ) {
        for ( const auto& [r, e] : links )
            if ( !( org.*declared )( e ) )
                out.push_back( { rules::undeclared_element, { r, e }, std::string( "undeclared " ) + kind + " '" + e + "'" } );
    };
    check_links( org.source_of_transfer, &OrgStructure::has_transfer, "transfer" );
    check_links( org.destination_of_transfer, &OrgStructure::has_transfer, "transfer" );
    check_links( org.source_of_interaction, &OrgStructure::has_interaction, "interaction" );
    check_links( org.destination_of_interaction, &OrgStructure::has_interaction, "interaction" );

    std::set<Identifier> seen_transfers;
    for ( const auto& t : org.transfers )
    {
        if ( !seen_transfers.insert( t ).second )
            continue;
        auto ends = check_endpoints( org, t, "transfer", org.source_of_transfer, org.destination_of_transfer, rules::transfer_endpoints, out );
        if ( !ends )
            continue;
        const auto& [src, dst] = *ends;
        if ( org.groups_of( src ).empty() || org.groups_of( dst ).empty() )
            continue; // already reported as role-without-group
        if ( !org.share_group( src, dst ) )
            out.push_back( { rules::transfer_same_group, { t, src, dst },
                             "transfer '" + t + "' connects '" + src + "' and '" + dst + "', which share no group" } );
    }

    std::set<Identifier> seen_interactions;
    for ( const auto& i : org.interactions )
    {
        if ( !seen_interactions.insert( i ).second )
            continue;
        auto ends = check_endpoints( org, i, "interaction", org.source_of_interaction, org.destination_of_interaction, rules::interaction_endpoints, out );
        if ( !ends )
            continue;
        const auto& [src, dst] = *ends;
        if ( org.share_group( src, dst ) )
            out.push_back( { rules::interaction_distinct_groups, { i, src, dst },
                             "interaction '" + i + "' connects '" + src + "' and '" + dst + "', which share a group" } );
    }
    return out;
}

const char* to_string( RoleType type )
{
    switch ( type )
    {
    case RoleType::line: return "line";
    case RoleType::staff: return "staff";
    case RoleType::functional_authority: return "functional_authority";
    }
    return "?";
}

std::optional<RoleType> role_type_from_string( const std::string& text )
{
    if ( text == "line" )
        return RoleType::line;
    if ( text == "staff" )
        return RoleType::staff;
    if ( text == "functional_authority" )
        return RoleType::functional_authority;
    return std::nullopt;
}

std::optional<RoleType> AuthorityAnnotations::type_of( const Identifier& role ) const
{
    for ( const auto& [r, type] : role_of_type )
        if ( r == role )
            return type;
    return std::nullopt;
}

std::vector<Identifier> superior_cycle( const AuthorityAnnotations& ann )
{
    std::map<Identifier, std::vector<Identifier>> next;
    for ( const auto& [a, b] : ann.superior_of )
        next[a].push_back( b );

    std::vector<Identifier> on_cycle;
    for ( const auto& [start, _] : next )
    {
        // start lies on a cycle iff it is reachable from one of its successors
        std::set<Identifier> seen;
        std::deque<Identifier> todo( next[start].begin(), next[start].end() );
        bool found = false;
        while ( !todo.empty() && !found )
        {
            auto r = todo.front();
            todo.pop_front();
            if ( r == start )
                found = true;
            else if ( seen.insert( r ).second && next.count( r ) )
                todo.insert( todo.end(), next[r].begin(), next[r].end() );
        }
        if ( found )
            on_cycle.push_back( start );
    }
    return on_cycle;
}

std::vector<Violation> validate_authority( const OrgStructure& org, const AuthorityAnnotations& ann )
{
    std::vector<Violation> out;
    report_duplicates( ann.tasks, "task", out );

    auto need_role = [&]( const Identifier& r, const std::string& where ) {
        if ( !org.has_role( r ) )
            out.push_back( { rules::undeclared_role, { r }, where + " references undeclared role '" + r + "'" } );
    };
    auto need_task = [&]( const Identifier& t, const std::string& where ) {
        if ( std::find( ann.tasks.begin(), ann.tasks.end(), t ) == ann.tasks.end() )
            out.push_back( { rules::undeclared_task, { t }, where + " references undeclared task '" + t + "'" } );
    };

    std::map<Identifier, RoleType> types;
    for ( const auto& [r, type] : ann.role_of_type )
    {
        need_role( r, "roletype" );
        auto [it, fresh] = types.emplace( r, type );
        if ( !fresh && it->second != type )
            out.push_back( { rules::roletype_conflict, { r },
                             "role '" + r + "' declared both " + to_string( it->second ) + " and " + to_string( type ) } );
    }
    for ( const auto& [a, b] : ann.superior_of )
    {
        need_role( a, "superior" );
        need_role( b, "superior" );
    }
    for ( const auto& d : ann.delegates_task_to )
    {
        need_role( d.from, "delegates" );
        need_role( d.to, "delegates" );
        need_task( d.task, "delegates" );
    }
    for ( const auto& [r, t] : ann.authorised_for )
    {
        need_role( r, "authorised" );
        need_task( t, "authorised" );
    }
    for ( const auto& [r, t] : ann.responsible_for )
    {
        need_role( r, "responsible" );
        need_task( t, "responsible" );
    }

    auto cycle = superior_cycle( ann );
    if ( !cycle.empty() )
    {
        std::string names;
        for ( const auto& r : cycle )
            names += ( names.empty() ? "" : ", " ) + r;
        out.push_back( { rules::superior_cycle, cycle, "superior_of is cyclic through " + names } );
    }
    return out;
}

AuthorityAnnotations line_authority_closure( const OrgStructure& org, const AuthorityAnnotations& ann )
{
    (void)org;
    auto cycle = superior_cycle( ann );
    if ( !cycle.empty() )
        throw CycleError( "superior_of is cyclic through '" + cycle.front() + "'" );

    auto is_line = [&]( const Identifier& r ) { return ann.type_of( r ) == RoleType::line; };

    std::map<RoleLink, std::vector<Identifier>> delegated; // (from, task) -> subordinates
    for ( const auto& d : ann.delegates_task_to )
        if ( is_line( d.from ) && is_line( d.to ) && ann.superior_of.count( { d.from, d.to } ) )
            delegated[{ d.from, d.task }].push_back( d.to );

    AuthorityAnnotations out = ann;
    std::deque<RoleLink> work;
    for ( const auto& link : out.authorised_for )
        if ( out.responsible_for.count( link ) )
            work.push_back( link );

    while ( !work.empty() )
    {
        auto link = work.front();
        work.pop_front();
        auto it = delegated.find( link );
        if ( it == delegated.end() )
            continue;
        for ( const auto& sub : it->second )
        {
            RoleLink target{ sub, link.second };
            bool had_both = out.authorised_for.count( target ) && out.responsible_for.count( target );
            out.authorised_for.insert( target );
            out.responsible_for.insert( target );
            if ( !had_both )
                work.push_back( target );
        }
    }
    return out;
}

} // namespace agrkit
