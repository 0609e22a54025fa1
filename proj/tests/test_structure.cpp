#include "agrkit/error.hpp"
#include "agrkit/model.hpp"
#include "agrkit/structure.hpp"
#include "common.hpp"
#include "text_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace agrkit;

namespace
{

OrgStructure two_groups()
{
    OrgStructure o;
    o.name = "o";
    o.groups = { "g1", "g2" };
    o.roles = { "a", "b", "c" };
    o.role_in = { { "a", "g1" }, { "b", "g1" }, { "c", "g2" } };
    o.transfers = { "t" };
    o.source_of_transfer = { { "a", "t" } };
    o.destination_of_transfer = { { "b", "t" } };
    o.interactions = { "i" };
    o.source_of_interaction = { { "a", "i" } };
    o.destination_of_interaction = { { "c", "i" } };
    return o;
}

std::vector<std::string> rule_ids( const std::vector<Violation>& vs )
{
    std::vector<std::string> out;
    for ( const auto& v : vs )
        out.push_back( v.rule );
    return out;
}

} // namespace

TEST_CASE( "a well-formed structure has no violations" )
{
    CHECK( validate_structure( two_groups() ).empty() );
    CHECK( validate_structure( testing_support::factory().org() ).empty() );
}

TEST_CASE( "each structural rule fires on its own" )
{
    SUBCASE( "transfer between groups" )
    {
        auto o = two_groups();
        o.destination_of_transfer = { { "c", "t" } };
        CHECK( rule_ids( validate_structure( o ) ) == std::vector<std::string>{ rules::transfer_same_group } );
    }
    SUBCASE( "interaction inside a group" )
    {
        auto o = two_groups();
        o.destination_of_interaction = { { "b", "i" } };
        CHECK( rule_ids( validate_structure( o ) ) == std::vector<std::string>{ rules::interaction_distinct_groups } );
    }
    SUBCASE( "two sources" )
    {
        auto o = two_groups();
        o.source_of_transfer.push_back( { "b", "t" } );
        CHECK( rule_ids( validate_structure( o ) ) == std::vector<std::string>{ rules::transfer_endpoints } );
    }
    SUBCASE( "interaction without destination" )
    {
        auto o = two_groups();
        o.destination_of_interaction.clear();
        CHECK( rule_ids( validate_structure( o ) ) == std::vector<std::string>{ rules::interaction_endpoints } );
    }
    SUBCASE( "role outside every group" )
    {
        auto o = two_groups();
        o.roles.push_back( "d" );
        CHECK( rule_ids( validate_structure( o ) ) == std::vector<std::string>{ rules::role_without_group } );
    }
    SUBCASE( "undeclared group" )
    {
        auto o = two_groups();
        o.role_in.insert( { "c", "g9" } );
        CHECK( rule_ids( validate_structure( o ) ) == std::vector<std::string>{ rules::undeclared_group } );
    }
    SUBCASE( "undeclared element" )
    {
        auto o = two_groups();
        o.source_of_transfer.push_back( { "a", "t9" } );
        auto ids = rule_ids( validate_structure( o ) );
        CHECK( std::count( ids.begin(), ids.end(), rules::undeclared_element ) == 1 );
    }
    SUBCASE( "identifier declared twice within its kind" )
    {
        auto o = two_groups();
        o.transfers.push_back( "t" );
        CHECK( rule_ids( validate_structure( o ) ) == std::vector<std::string>{ rules::duplicate_identifier } );
        // uniqueness is per kind
        auto p = two_groups();
        p.transfers.push_back( "g1" );
        p.source_of_transfer.push_back( { "a", "g1" } );
        p.destination_of_transfer.push_back( { "b", "g1" } );
        CHECK( validate_structure( p ).empty() );
    }
    SUBCASE( "bad identifier" )
    {
        auto o = two_groups();
        o.roles.push_back( "bad name" );
        o.role_in.insert( { "bad name", "g1" } );
        CHECK( rule_ids( validate_structure( o ) ) == std::vector<std::string>{ rules::bad_identifier } );
    }
}

TEST_CASE( "involved roles" )
{
    auto o = two_groups();
    CHECK( involved_roles( o, ElementKind::group, "g1" ) == std::set<Identifier>{ "a", "b" } );
    CHECK( involved_roles( o, ElementKind::transfer, "t" ) == std::set<Identifier>{ "a", "b" } );
    CHECK( involved_roles( o, ElementKind::interaction, "i" ) == std::set<Identifier>{ "a", "c" } );
    CHECK( involved_roles( o, "i" ) == std::set<Identifier>{ "a", "c" } );
    CHECK_THROWS_AS( (void)involved_roles( o, ElementKind::group, "zz" ), UnknownIdentifier );
    CHECK( o.transfer_source( "t" ) == std::optional<Identifier>( "a" ) );
    CHECK( o.share_group( "a", "b" ) );
    CHECK_FALSE( o.share_group( "a", "c" ) );
}

TEST_CASE( "the scripted mutations each produce exactly the expected rule" )
{
    auto base = detail::read_file( testing_support::corpus( "factory.agr" ) );
    auto lines = detail::split_lines( detail::read_file( testing_support::corpus( "mutations.tsv" ) ) );
    int cases = 0;
    for ( auto line : lines )
    {
        if ( line.empty() || line.front() == '#' )
            continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        for ( std::size_t tab; ( tab = line.find( '\t', start ) ) != std::string::npos; start = tab + 1 )
            cols.emplace_back( line.substr( start, tab - start ) );
        cols.emplace_back( line.substr( start ) );
        REQUIRE( cols.size() == 3 );
        CAPTURE( cols[0] );
        auto m = parse_model( base + "\n" + cols[2] + "\n" );
        CHECK( rule_ids( validate_model( m ) ) == std::vector<std::string>{ cols[1] } );
        ++cases;
    }
    CHECK( cases == 8 );
}

TEST_CASE( "authority annotations" )
{
    auto o = two_groups();
    AuthorityAnnotations ann;
    ann.tasks = { "plan" };
    ann.role_of_type = { { "a", RoleType::line }, { "b", RoleType::line } };
    ann.superior_of = { { "a", "b" } };
    ann.delegates_task_to = { { "a", "plan", "b" } };
    ann.authorised_for = { { "a", "plan" } };
    ann.responsible_for = { { "a", "plan" } };
    CHECK( validate_authority( o, ann ).empty() );

    auto closed = line_authority_closure( o, ann );
    CHECK( closed.authorised_for.count( { "b", "plan" } ) );
    CHECK( closed.responsible_for.count( { "b", "plan" } ) );

    SUBCASE( "a staff subordinate receives nothing" )
    {
        ann.role_of_type[1].second = RoleType::staff;
        auto c = line_authority_closure( o, ann );
        CHECK_FALSE( c.authorised_for.count( { "b", "plan" } ) );
    }
    SUBCASE( "authority without responsibility does not pass on" )
    {
        ann.responsible_for.clear();
        CHECK( line_authority_closure( o, ann ) == ann );
    }
    SUBCASE( "cycles" )
    {
        ann.superior_of.insert( { "b", "a" } );
        CHECK( superior_cycle( ann ) == std::vector<Identifier>{ "a", "b" } );
        CHECK_THROWS_AS( (void)line_authority_closure( o, ann ), CycleError );
        CHECK( rule_ids( validate_authority( o, ann ) ) == std::vector<std::string>{ rules::superior_cycle } );
    }
    SUBCASE( "self loop" )
    {
        ann.superior_of.insert( { "c", "c" } );
        CHECK( superior_cycle( ann ) == std::vector<Identifier>{ "c" } );
    }
    SUBCASE( "undeclared references" )
    {
        ann.authorised_for.insert( { "zz", "plan" } );
        ann.responsible_for.insert( { "a", "cook" } );
        auto ids = rule_ids( validate_authority( o, ann ) );
        std::sort( ids.begin(), ids.end() );
        CHECK( ids == std::vector<std::string>{ rules::undeclared_role, rules::undeclared_task } );
    }
}

namespace
{

// Reference: apply the line rule to every quadruple until nothing changes.
AuthorityAnnotations naive_closure( const AuthorityAnnotations& ann )
{
    auto out = ann;
    bool changed = true;
    while ( changed )
    {
        changed = false;
        for ( const auto& d : ann.delegates_task_to )
        {
            bool applies = ann.type_of( d.from ) == RoleType::line && ann.type_of( d.to ) == RoleType::line && ann.superior_of.count( { d.from, d.to } ) &&
                           out.authorised_for.count( { d.from, d.task } ) && out.responsible_for.count( { d.from, d.task } );
            if ( applies && !( out.authorised_for.count( { d.to, d.task } ) && out.responsible_for.count( { d.to, d.task } ) ) )
            {
                out.authorised_for.insert( { d.to, d.task } );
                out.responsible_for.insert( { d.to, d.task } );
                changed = true;
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE( "line closure agrees with the naive fixpoint on random acyclic hierarchies" )
{
    std::mt19937_64 rng( 77 );
    OrgStructure o;
    for ( int i = 0; i < 8; ++i )
        o.roles.push_back( "r" + std::to_string( i ) );
    for ( int round = 0; round < 300; ++round )
    {
        AuthorityAnnotations ann;
        ann.tasks = { "t0", "t1", "t2" };
        std::uniform_int_distribution<int> role( 0, 7 ), task( 0, 2 ), type( 0, 3 );
        for ( int i = 0; i < 8; ++i )
            ann.role_of_type.emplace_back( o.roles[i], type( rng ) == 0 ? RoleType::staff : RoleType::line );
        for ( int k = 0; k < 12; ++k )
        {
            int a = role( rng ), b = role( rng );
            if ( a < b ) // edges point down the index order, so no cycles
            {
                ann.superior_of.insert( { o.roles[a], o.roles[b] } );
                ann.delegates_task_to.insert( { o.roles[a], ann.tasks[task( rng )], o.roles[b] } );
            }
        }
        for ( int k = 0; k < 5; ++k )
        {
            auto link = RoleLink{ o.roles[role( rng )], ann.tasks[task( rng )] };
            ann.authorised_for.insert( link );
            if ( k % 2 == 0 )
                ann.responsible_for.insert( link );
        }
        CHECK( line_authority_closure( o, ann ) == naive_closure( ann ) );
    }
}
