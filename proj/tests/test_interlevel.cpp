#include "agrkit/error.hpp"
#include "agrkit/interlevel.hpp"
#include "agrkit/model.hpp"
#include "common.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace agrkit;
using testing_support::atom;
using testing_support::in;
using testing_support::out;

namespace
{

std::set<Identifier> as_set( const std::vector<Identifier>& v ) { return { v.begin(), v.end() }; }

std::set<Identifier> ids_where( const AGRDyn& dyn, const std::function<bool( const DynProperty& )>& pred )
{
    std::set<Identifier> out;
    for ( const auto& p : dyn.properties )
        if ( pred( p ) )
            out.insert( p.id );
    return out;
}

// Reference coverage computations by plain set difference.
std::vector<Identifier> missing_for_connected( const InterlevelAssignment& a, const AGRDyn& dyn )
{
    std::set<Identifier> used, concluded;
    for ( const auto& r : a.relations )
    {
        if ( r.level == RelationLevel::organisation )
            for ( const auto& id : r.antecedents )
                if ( const auto* p = dyn.find( id ); p && p->filing == Filing::group )
                    used.insert( id );
        if ( r.level == RelationLevel::group )
            concluded.insert( r.consequent );
    }
    std::vector<Identifier> out;
    std::set_difference( used.begin(), used.end(), concluded.begin(), concluded.end(), std::back_inserter( out ) );
    return out;
}

std::vector<Identifier> missing_for_complete( const InterlevelAssignment& a, const AGRDyn& dyn )
{
    auto declared = ids_where( dyn, []( const DynProperty& p ) { return p.filing == Filing::group || p.filing == Filing::organisation; } );
    std::set<Identifier> concluded;
    for ( const auto& r : a.relations )
        concluded.insert( r.consequent );
    std::vector<Identifier> out;
    std::set_difference( declared.begin(), declared.end(), concluded.begin(), concluded.end(), std::back_inserter( out ) );
    return out;
}

CheckOptions serial_with( const OrgStructure& org )
{
    CheckOptions o;
    o.org = &org;
    o.policy = ExecPolicy::serial;
    return o;
}

} // namespace

TEST_CASE( "the standard assignment conjoins every eligible property" )
{
    const auto& m = testing_support::factory();
    const auto& dyn = m.dyn;
    const auto& org = m.org();
    auto a = standard_assignment( dyn );
    CHECK( validate_assignment( a, dyn ).empty() );

    int group_relations = 0;
    for ( const auto& r : a.relations )
    {
        CAPTURE( r.consequent );
        std::set<Identifier> want;
        if ( r.level == RelationLevel::group )
        {
            ++group_relations;
            auto roles = org.roles_of( r.group );
            std::set<Identifier> in_group( roles.begin(), roles.end() );
            want = ids_where( dyn, [&]( const DynProperty& p ) {
                if ( p.filing == Filing::role )
                    return in_group.count( p.element ) > 0;
                if ( p.filing == Filing::transfer )
                    return in_group.count( *org.transfer_source( p.element ) ) > 0 && in_group.count( *org.transfer_destination( p.element ) ) > 0;
                return false;
            } );
        }
        else
            want = ids_where( dyn, []( const DynProperty& p ) {
                return p.filing == Filing::group || p.filing == Filing::transfer || p.filing == Filing::interaction;
            } );
        CHECK( as_set( r.antecedents ) == want );
    }
    CHECK( group_relations == 5 );
    CHECK( a.for_organisation().size() == 1 );
    CHECK( check_connected( a, dyn ).ok );
    CHECK( check_complete( a, dyn ).ok );
}

TEST_CASE( "connectedness and completeness agree with set difference on random sub-assignments" )
{
    const auto& m = testing_support::factory();
    std::mt19937_64 rng( 5150 );
    for ( int round = 0; round < 300; ++round )
    {
        InterlevelAssignment a;
        auto source = round % 2 ? m.relations : standard_assignment( m.dyn );
        for ( const auto& r : source.relations )
            if ( std::bernoulli_distribution( 0.6 )( rng ) )
                a.relations.push_back( r );
        auto conn = check_connected( a, m.dyn );
        auto comp = check_complete( a, m.dyn );
        auto want_conn = missing_for_connected( a, m.dyn );
        auto want_comp = missing_for_complete( a, m.dyn );
        CHECK( conn.missing == want_conn );
        CHECK( conn.ok == want_conn.empty() );
        CHECK( comp.missing == want_comp );
        CHECK( comp.ok == want_comp.empty() );
    }
}

TEST_CASE( "assignment validation" )
{
    const auto& m = testing_support::factory();
    CHECK( validate_assignment( m.relations, m.dyn ).empty() );
    auto bad = parse_assignment( R"(
relation X1 for group divA : DP_B <= DP_depA1
relation X2 for group divA : DP_A <= DP_depB1, ZZ
relation X3 for organisation : DP_A <= DP_B
relation X4 for organisation : DP_F <= DP_depA1
)" );
    std::multiset<std::string> rules_seen;
    for ( const auto& v : validate_assignment( bad, m.dyn ) )
        if ( v.severity == Severity::error )
            rules_seen.insert( v.rule );
    CHECK( rules_seen.count( rules::relation_filing ) == 2 );
    CHECK( rules_seen.count( rules::relation_antecedent ) == 3 );

    auto cyc = parse_assignment( R"(
relation Y1 for group divA : DP_A <= IaRI_A
relation Y2 for group divA : IaRI_A <= DP_A
)" );
    CHECK_THROWS_AS( (void)build_and_tree( cyc, m.dyn ), CycleError );
    bool cycle = false;
    for ( const auto& v : validate_assignment( cyc, m.dyn ) )
        cycle = cycle || v.rule == rules::relation_cycle;
    CHECK( cycle );
}

TEST_CASE( "the AND-tree of the factory relations" )
{
    const auto& m = testing_support::factory();
    auto tree = build_and_tree( m.relations, m.dyn );
    CHECK( tree.roots == std::vector<Identifier>{ "DP_F" } );
    CHECK( as_set( tree.nodes.at( "DP_A" ).children ) == std::set<Identifier>{ "IaRI_A", "TRD_A21", "DP_depA1" } );
    CHECK( tree.nodes.at( "IaRI_A" ).type == PropertyType::intragroup );
    CHECK( tree.nodes.at( "TRD_A21" ).children.empty() );
    auto adj = render_adjacency( tree );
    CHECK( adj.find( "edge DP_F DP_A\n" ) != std::string::npos );
    CHECK( adj.find( "edge DP_A TRD_A21\n" ) != std::string::npos );
    CHECK( std::count( adj.begin(), adj.end(), '\n' ) == 2 + 2 + 3 + 3 + 2 + 7 );
    auto text = render_tree( tree );
    CHECK( text.rfind( "DP_F", 0 ) == 0 );
    CHECK( text.find( "  DP_A" ) != std::string::npos );
    CHECK( text.find( "    TRD_A21" ) != std::string::npos );
}

TEST_CASE( "falsification and the proposition on simulated traces" )
{
    const auto& m = testing_support::factory();
    auto o = serial_with( m.org() );
    auto tr = testing_support::simulate_factory( 7 );
    std::vector<const Trace*> traces = { &tr };
    for ( const auto& v : falsify_on_traces( m.relations, m.dyn, traces, o ) )
        CHECK_FALSE( v.falsified );
    auto rep = verify_proposition( m.dyn, standard_assignment( m.dyn ), tr, o );
    CHECK( rep.applicable );
    CHECK( rep.part_a );
    CHECK( rep.complete );
    CHECK( rep.part_b );
    CHECK( rep.failing.empty() );

    // a relation whose premise holds vacuously while its conclusion fails
    auto cut = testing_support::simulate_factory( 7, 50, { "tA21" } );
    std::vector<const Trace*> cut_traces = { &cut };
    auto wrong = parse_assignment( "relation W for organisation : DP_F <= IrRI_BC\n" );
    auto verdicts = falsify_on_traces( wrong, m.dyn, cut_traces, o );
    REQUIRE( verdicts.size() == 1 );
    CHECK( verdicts[0].falsified );
    CHECK( verdicts[0].trace == "sim" );

    auto not_applicable = verify_proposition( m.dyn, standard_assignment( m.dyn ), cut, o );
    CHECK_FALSE( not_applicable.applicable );
    CHECK_FALSE( not_applicable.reason.empty() );
}

TEST_CASE( "diagnosis descends to the removed transfer" )
{
    const auto& m = testing_support::factory();
    auto cut = testing_support::simulate_factory( 7, 50, { "tA21" } );
    PropertyOracle oracle( m.dyn, { &cut }, serial_with( m.org() ) );
    CHECK( oracle.verdict( "DP_F" ).truth == Truth::fails );
    auto d = diagnose( m.relations, oracle, "DP_F" );
    CHECK( d.failing == "DP_F" );
    CHECK( d.culprits == std::vector<Identifier>{ "TRD_A21" } );
    CHECK( d.falsified.empty() );
    REQUIRE( !d.path.empty() );
    CHECK( d.path.front() == std::pair<Identifier, Identifier>{ "DP_F", "DP_A" } );
    CHECK( d.path.back() == std::pair<Identifier, Identifier>{ "DP_A", "TRD_A21" } );
    CHECK_THROWS_AS( (void)diagnose( m.relations, oracle, "ZZ" ), UnknownIdentifier );
    CHECK_THROWS_AS( (void)diagnose( m.relations, oracle, "DP_B" ), PreconditionError );

    // with the standard assignment the same leaf is found
    PropertyOracle again( m.dyn, { &cut }, serial_with( m.org() ) );
    CHECK( diagnose( standard_assignment( m.dyn ), again, "DP_F" ).culprits == std::vector<Identifier>{ "TRD_A21" } );
}

TEST_CASE( "a falsified relation is its own culprit" )
{
    const auto& m = testing_support::factory();
    auto cut = testing_support::simulate_factory( 7, 50, { "tA21" } );
    PropertyOracle oracle( m.dyn, { &cut }, serial_with( m.org() ) );
    auto wrong = parse_assignment( "relation W for organisation : DP_F <= IrRI_BC\n" );
    auto d = diagnose( wrong, oracle, "DP_F" );
    CHECK( d.falsified == std::vector<Identifier>{ "DP_F" } );
    CHECK( d.culprits == std::vector<Identifier>{ "DP_F" } );
}
