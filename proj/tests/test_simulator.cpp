#include "agrkit/error.hpp"
#include "agrkit/model.hpp"
#include "agrkit/simulator.hpp"
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

const LeadsToRule* rule_for( const Extraction& ex, const std::string& id )
{
    for ( const auto& r : ex.rules )
        if ( r.property == id )
            return &r;
    return nullptr;
}

// A ring of four roles in one group, with a transfer from each role to the next.
const Model& ring()
{
    static const Model m = parse_model( R"(
organisation ring
group g { roles r0, r1, r2, r3 }
transfer t0 from r0 to r1
transfer t1 from r1 to r2
transfer t2 from r2 to r3
transfer t3 from r3 to r0
)" );
    return m;
}

std::vector<LeadsToRule> random_rules( std::mt19937_64& rng, int count, int max_delay )
{
    static const std::vector<Atom> atoms = { atom( "p" ), atom( "q" ), atom( "r" ) };
    auto pick = [&]( int lo, int hi ) { return std::uniform_int_distribution<int>( lo, hi )( rng ); };
    std::vector<LeadsToRule> rules;
    for ( int i = 0; i < count; ++i )
    {
        LeadsToRule r;
        int k = pick( 0, 3 );
        std::string role = "r" + std::to_string( k );
        if ( pick( 0, 1 ) )
        {
            r.filing = Filing::role;
            r.element = role;
        }
        else
        {
            r.filing = Filing::transfer;
            r.element = "t" + std::to_string( k );
        }
        AtomicPart from = r.filing == Filing::role ? in( role ) : out( role );
        AtomicPart to = r.filing == Filing::role ? out( role ) : in( "r" + std::to_string( ( k + 1 ) % 4 ) );
        r.property = "R" + std::to_string( i );
        r.positive.push_back( { from, atoms[pick( 0, 2 )] } );
        if ( pick( 0, 3 ) == 0 )
            r.negative.push_back( { from, atoms[pick( 0, 2 )] } );
        r.consequent.push_back( { to, atoms[pick( 0, 2 )] } );
        if ( pick( 0, 2 ) == 0 )
            r.consequent.push_back( { to, atoms[pick( 0, 2 )] } );
        r.e = pick( 0, max_delay );
        r.f = r.e + pick( 0, 2 );
        r.h = pick( 1, 3 );
        rules.push_back( r );
    }
    return rules;
}

StimuliSchedule random_stimuli( std::mt19937_64& rng, int horizon )
{
    static const std::vector<Atom> atoms = { atom( "p" ), atom( "q" ), atom( "r" ) };
    StimuliSchedule s;
    int n = std::uniform_int_distribution<int>( 1, 6 )( rng );
    for ( int i = 0; i < n; ++i )
    {
        int role = std::uniform_int_distribution<int>( 0, 3 )( rng );
        auto part = std::uniform_int_distribution<int>( 0, 1 )( rng ) ? in( "r" + std::to_string( role ) ) : out( "r" + std::to_string( role ) );
        s.items.push_back( { std::uniform_int_distribution<int>( 0, horizon + 2 )( rng ), part,
                             atoms[std::uniform_int_distribution<std::size_t>( 0, 2 )( rng )] } );
    }
    return s;
}

bool antecedent( const LeadsToRule& r, const Trace& tr, int t )
{
    for ( const auto& [part, a] : r.positive )
        if ( !tr.at( t, part ).contains( a ) )
            return false;
    for ( const auto& [part, a] : r.negative )
        if ( tr.at( t, part ).contains( a ) )
            return false;
    return true;
}

bool consequent_over( const LeadsToRule& r, const Trace& tr, long from, long to )
{
    for ( long u = std::max( 0L, from ); u <= std::min<long>( to, tr.horizon() ); ++u )
        for ( const auto& [part, a] : r.consequent )
            if ( !tr.at( static_cast<int>( u ), part ).contains( a ) )
                return false;
    return true;
}

// Every firing left its consequent in some admissible window; with `exact`
// the window must start at the minimal delay.
bool obligations_met( const std::vector<LeadsToRule>& rules, const Trace& tr, bool exact )
{
    for ( const auto& r : rules )
        for ( int t = 0; t <= tr.horizon(); ++t )
        {
            if ( !antecedent( r, tr, t ) )
                continue;
            bool ok = false;
            for ( long d = r.e; d <= ( exact ? r.e : r.f ) && !ok; ++d )
                ok = consequent_over( r, tr, t + d, t + d + r.h - 1 );
            if ( !ok )
                return false;
        }
    return true;
}

// Every atom in the trace is a stimulus or lies in the reach of some firing.
bool atoms_explained( const std::vector<LeadsToRule>& rules, const StimuliSchedule& s, const Trace& tr )
{
    for ( const auto& [part, column] : tr.columns() )
        for ( int t = 0; t <= tr.horizon(); ++t )
            for ( const auto& a : column[t] )
            {
                bool ok = std::any_of( s.items.begin(), s.items.end(), [&]( const TimedAtom& x ) { return x.time == t && x.part == part && x.atom == a; } );
                for ( const auto& r : rules )
                {
                    if ( ok )
                        break;
                    if ( std::none_of( r.consequent.begin(), r.consequent.end(), [&]( const PartAtom& c ) { return c.first == part && c.second == a; } ) )
                        continue;
                    for ( long t0 = std::max<long>( 0, t - r.f - r.h + 1 ); t0 <= t - r.e && !ok; ++t0 )
                        ok = antecedent( r, tr, static_cast<int>( t0 ) );
                }
                if ( !ok )
                    return false;
            }
    return true;
}

SimulationOptions opts( int horizon, std::optional<std::uint64_t> seed = {}, ExecPolicy p = ExecPolicy::serial )
{
    SimulationOptions o;
    o.horizon = horizon;
    o.seed = seed;
    o.policy = p;
    return o;
}

} // namespace

TEST_CASE( "extraction splits the factory into rules and residue" )
{
    const auto& m = testing_support::factory();
    auto ex = extract_executable( m.dyn );
    CHECK( ex.rules.size() == 14 );
    std::vector<std::string> residue;
    for ( const auto& r : ex.residue )
        residue.push_back( r.property );
    std::sort( residue.begin(), residue.end() );
    CHECK( residue == std::vector<std::string>{ "DP_A", "DP_B", "DP_C", "DP_F", "IaRI_A", "IaRI_B" } );

    const auto* b2 = rule_for( ex, "DP_depB2" );
    REQUIRE( b2 );
    CHECK( ( b2->e == 1 && b2->f == 2 && b2->h == 2 ) );
    CHECK( b2->consequent == std::vector<PartAtom>{ { out( "depB2" ), atom( "assembly_status" ) } } );
    const auto* b1 = rule_for( ex, "DP_depB1" );
    REQUIRE( b1 );
    CHECK( ( b1->e == 1 && b1->f == 1 && b1->h == 1 ) );
    const auto* t = rule_for( ex, "TRD_B12" );
    REQUIRE( t );
    CHECK( ( t->e == 0 && t->f == 1 && t->filing == Filing::transfer ) );
    CHECK( check_rules( m.dyn, ex.rules ).empty() );
}

TEST_CASE( "shapes that are not leads-to are refused with a reason" )
{
    auto m = parse_model( R"(
organisation o
group g { roles a, b }
transfer tab from a to b
property OK role a := ttl: forall t . holds(t, input(a), p & !q) => exists t2 in [t+1, t+3] . forall u in [t2, t2+1] . holds(u, output(a), r & s)
property AT role a := ttl: forall t . holds(t, input(a), p) => holds(t+2, output(a), r)
property NEG role a := ttl: forall t . holds(t, input(a), p) => holds(t+1, output(a), !r)
property EX role a := ttl: exists t . holds(t, input(a), p)
property BACK role a := ltl: C[input(a)](p) => P<=1[output(a)](r)
property DIS role a := ttl: forall t . holds(t, input(a), p | q) => holds(t+1, output(a), r)
property DIR role a := ttl: forall t . holds(t, output(a), p) => holds(t+1, output(a), r)
property NOPOS role a := ttl: forall t . holds(t, input(a), !p) => holds(t+1, output(a), r)
)" );
    std::string why;
    auto ok = match_leads_to( m.dyn, m.dyn.at( "OK" ), &why );
    REQUIRE( ok );
    CHECK( ( ok->e == 1 && ok->f == 3 && ok->h == 2 ) );
    CHECK( ok->positive.size() == 1 );
    CHECK( ok->negative.size() == 1 );
    CHECK( ok->consequent.size() == 2 );
    auto at = match_leads_to( m.dyn, m.dyn.at( "AT" ) );
    REQUIRE( at );
    CHECK( ( at->e == 2 && at->f == 2 ) );
    for ( const char* id : { "NEG", "EX", "BACK", "DIS", "DIR", "NOPOS" } )
    {
        CAPTURE( id );
        why.clear();
        CHECK_FALSE( match_leads_to( m.dyn, m.dyn.at( id ), &why ) );
        CHECK_FALSE( why.empty() );
    }
}

TEST_CASE( "rule checks" )
{
    const auto& dyn = ring().dyn;
    LeadsToRule r;
    r.property = "X";
    r.filing = Filing::role;
    r.element = "r0";
    r.positive = { { in( "r0" ), atom( "p" ) } };
    r.consequent = { { out( "r0" ), atom( "q" ) } };
    CHECK( check_rules( dyn, { r } ).empty() );

    auto backwards = r;
    backwards.consequent = { { in( "r1" ), atom( "q" ) } };
    CHECK( check_rules( dyn, { backwards } ).front().rule == rules::rule_direction );
    auto delay = r;
    delay.e = 3;
    delay.f = 2;
    CHECK( check_rules( dyn, { delay } ).front().rule == rules::rule_delay );
    auto ghost = r;
    ghost.positive = { { in( "zz" ), atom( "p" ) } };
    CHECK( check_rules( dyn, { ghost } ).front().rule == rules::rule_undeclared_part );
    CHECK_THROWS_AS( (void)simulate( dyn, { delay }, {}, opts( 5 ) ), PreconditionError );
    CHECK_THROWS_AS( (void)simulate( dyn, { r }, {}, opts( -1 ) ), PreconditionError );
}

TEST_CASE( "stimuli files" )
{
    auto s = read_stimuli( "stimuli demo\n# c\n0 input(a) p\n3 output(b) lvl(1/2)\n" );
    CHECK( s.id == "demo" );
    REQUIRE( s.items.size() == 2 );
    CHECK( s.items[1].time == 3 );
    CHECK( read_stimuli( write_stimuli( s ) ).items.size() == 2 );
    CHECK( write_stimuli( read_stimuli( write_stimuli( s ) ) ) == write_stimuli( s ) );
    CHECK_THROWS_AS( (void)read_stimuli( "0 input(a) p\n" ), ParseError );
    CHECK_THROWS_AS( (void)read_stimuli( "stimuli x\n0 inside(a) p\n" ), ParseError );
    CHECK_THROWS_AS( (void)read_stimuli( "stimuli x\n0 input(ghost) progress_info\n", testing_support::factory().dyn.schema() ), ParseError );
}

TEST_CASE( "horizon edge cases" )
{
    const auto& dyn = ring().dyn;
    LeadsToRule now;
    now.property = "N";
    now.filing = Filing::role;
    now.element = "r0";
    now.positive = { { in( "r0" ), atom( "p" ) } };
    now.consequent = { { out( "r0" ), atom( "q" ) } };
    LeadsToRule pass = now;
    pass.property = "T";
    pass.filing = Filing::transfer;
    pass.element = "t0";
    pass.positive = { { out( "r0" ), atom( "q" ) } };
    pass.consequent = { { in( "r1" ), atom( "q" ) } };

    StimuliSchedule s;
    s.items = { { 0, in( "r0" ), atom( "p" ) }, { 1, in( "r0" ), atom( "p" ) }, { 9, in( "r2" ), atom( "p" ) } };
    auto zero = simulate( dyn, { now, pass }, s, opts( 0 ) );
    CHECK( zero.horizon() == 0 );
    // zero-delay rules chain within the frame
    CHECK( zero.at( 0, in( "r1" ) ).contains( atom( "q" ) ) );
    CHECK( zero.atom_count() == 3 );

    auto later = now;
    later.e = later.f = 4;
    auto tr = simulate( dyn, { later }, s, opts( 4 ) );
    CHECK( tr.at( 4, out( "r0" ) ).contains( atom( "q" ) ) );
    CHECK( tr.atom_count() == 3 ); // the firing at 1 lands past the horizon, and the stimulus at 9 is dropped
}

TEST_CASE( "firings meet their obligations and explain every atom" )
{
    std::mt19937_64 rng( 31337 );
    const auto& dyn = ring().dyn;
    for ( int round = 0; round < 300; ++round )
    {
        auto rules = random_rules( rng, std::uniform_int_distribution<int>( 1, 8 )( rng ), 3 );
        int h = std::uniform_int_distribution<int>( 0, 25 )( rng );
        auto s = random_stimuli( rng, h );
        CAPTURE( round );
        auto minimal = simulate( dyn, rules, s, opts( h ) );
        CHECK( obligations_met( rules, minimal, true ) );
        CHECK( atoms_explained( rules, s, minimal ) );
        auto seeded = simulate( dyn, rules, s, opts( h, round ) );
        CHECK( obligations_met( rules, seeded, false ) );
        CHECK( atoms_explained( rules, s, seeded ) );
    }
}

TEST_CASE( "seeded delays spread over the window" )
{
    const auto& dyn = ring().dyn;
    LeadsToRule r;
    r.property = "W";
    r.filing = Filing::role;
    r.element = "r0";
    r.positive = { { in( "r0" ), atom( "p" ) } };
    r.consequent = { { out( "r0" ), atom( "q" ) } };
    r.e = 2;
    r.f = 5;
    StimuliSchedule s;
    s.items = { { 0, in( "r0" ), atom( "p" ) } };
    std::set<int> delays;
    for ( std::uint64_t seed = 0; seed < 200; ++seed )
    {
        auto tr = simulate( dyn, { r }, s, opts( 10, seed ) );
        for ( int t = 0; t <= 10; ++t )
            if ( tr.at( t, out( "r0" ) ).contains( atom( "q" ) ) )
                delays.insert( t );
    }
    CHECK( delays == std::set<int>{ 2, 3, 4, 5 } );
}

TEST_CASE( "determinism and policy independence" )
{
    std::mt19937_64 rng( 8 );
    const auto& dyn = ring().dyn;
    for ( int round = 0; round < 20; ++round )
    {
        auto rules = random_rules( rng, 48, 2 ); // enough rules for the parallel path
        auto s = random_stimuli( rng, 80 );
        auto a = simulate( dyn, rules, s, opts( 80, 99, ExecPolicy::serial ) );
        auto b = simulate( dyn, rules, s, opts( 80, 99, ExecPolicy::parallel ) );
        auto c = simulate( dyn, rules, s, opts( 80, 99, ExecPolicy::serial ) );
        CHECK( write_trace( a ) == write_trace( b ) );
        CHECK( write_trace( a ) == write_trace( c ) );
    }
    CHECK( write_trace( testing_support::simulate_factory( 7 ) ) == write_trace( testing_support::simulate_factory( 7 ) ) );
}

TEST_CASE( "the factory run satisfies every property, and loses DP_F without tA21" )
{
    const auto& m = testing_support::factory();
    CheckOptions o;
    o.org = &m.org();
    auto tr = testing_support::simulate_factory( 7 );
    CHECK( tr.horizon() == 50 );
    for ( const auto& p : m.dyn.properties )
    {
        CAPTURE( p.id );
        CHECK( check_property( *p.core, tr, o ).truth == Truth::holds );
    }
    CHECK( tr.at( 0, in( "depA1" ) ).contains( atom( "progress_info" ) ) );

    auto cut = testing_support::simulate_factory( 7, 50, { "tA21" } );
    CHECK( check_property( *m.dyn.at( "DP_F" ).core, cut, o ).truth == Truth::fails );
    CHECK( check_property( *m.dyn.at( "TRD_A21" ).core, cut, o ).truth == Truth::fails );
}
