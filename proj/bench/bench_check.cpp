// Serial vs parallel timings for the two OpenMP kernels: the outermost
// quantifier in check_property and per-step rule evaluation in simulate.

#include "agrkit/checker.hpp"
#include "agrkit/model.hpp"
#include "agrkit/property_parser.hpp"
#include "agrkit/simulator.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

using namespace agrkit;

namespace
{

constexpr int ring_size = 16;

const Model& ring()
{
    static const Model m = [] {
        std::ostringstream s;
        s << "organisation ring\ngroup g { roles ";
        for ( int i = 0; i < ring_size; ++i )
            s << ( i ? ", " : "" ) << 'r' << i;
        s << " }\n";
        for ( int i = 0; i < ring_size; ++i )
            s << "transfer t" << i << " from r" << i << " to r" << ( i + 1 ) % ring_size << "\n";
        return parse_model( s.str() );
    }();
    return m;
}

Atom atom( const std::string& p ) { return { p, {} }; }

// Eight rules per role: four role rules and four transfer rules.
std::vector<LeadsToRule> ring_rules()
{
    std::vector<LeadsToRule> rules;
    const char* atoms[] = { "p", "q", "r", "s" };
    for ( int i = 0; i < ring_size; ++i )
    {
        std::string role = "r" + std::to_string( i ), next = "r" + std::to_string( ( i + 1 ) % ring_size );
        for ( int k = 0; k < 4; ++k )
        {
            LeadsToRule r;
            r.property = "R" + role + atoms[k];
            r.filing = Filing::role;
            r.element = role;
            r.positive = { { { Direction::input, role }, atom( atoms[k] ) } };
            r.consequent = { { { Direction::output, role }, atom( atoms[( k + 1 ) % 4] ) } };
            r.e = 1;
            r.f = 2;
            rules.push_back( r );

            LeadsToRule t;
            t.property = "T" + role + atoms[k];
            t.filing = Filing::transfer;
            t.element = "t" + std::to_string( i );
            t.positive = { { { Direction::output, role }, atom( atoms[k] ) } };
            t.consequent = { { { Direction::input, next }, atom( atoms[k] ) } };
            t.e = 0;
            t.f = 1;
            rules.push_back( t );
        }
    }
    return rules;
}

StimuliSchedule ring_stimuli( int horizon )
{
    StimuliSchedule s;
    for ( int t = 0; t <= horizon; t += 25 )
        s.items.push_back( { t, { Direction::input, "r" + std::to_string( t / 25 % ring_size ) }, atom( "p" ) } );
    return s;
}

Trace ring_trace( int horizon )
{
    SimulationOptions o;
    o.horizon = horizon;
    o.seed = 1;
    o.policy = ExecPolicy::serial;
    return simulate( ring().dyn, ring_rules(), ring_stimuli( horizon ), o );
}

void simulate_ring( benchmark::State& state, ExecPolicy policy )
{
    auto rules = ring_rules();
    SimulationOptions o;
    o.horizon = static_cast<int>( state.range( 0 ) );
    o.seed = 1;
    o.policy = policy;
    auto stimuli = ring_stimuli( o.horizon );
    for ( auto _ : state )
        benchmark::DoNotOptimize( simulate( ring().dyn, rules, stimuli, o ) );
    state.counters["rules"] = static_cast<double>( rules.size() );
}

// Each r0 output reaches r1 within three steps, checked over a sliding
// 20-step window: a bounded inner search under an unbounded outer quantifier.
// It never fails on the ring trace, so no early exit shortens the scan.
const char* response =
    "forall t . forall t1 in [t, t+20] . holds(t1, output(r0), q) => exists t2 in [t1, t1+3] . holds(t2, input(r1), q)";

void check_ring( benchmark::State& state, ExecPolicy policy )
{
    auto tr = ring_trace( static_cast<int>( state.range( 0 ) ) );
    auto f = parse_ttl( response );
    CheckOptions o;
    o.org = &ring().org();
    o.policy = policy;
    for ( auto _ : state )
        benchmark::DoNotOptimize( check_property( *f, tr, o ) );
    state.counters["atoms"] = static_cast<double>( tr.atom_count() );
    state.counters["truth"] = static_cast<double>( check_property( *f, tr, o ).truth );
}

} // namespace

BENCHMARK_CAPTURE( simulate_ring, serial, ExecPolicy::serial )->Arg( 1000 )->Arg( 10000 )->Unit( benchmark::kMillisecond );
BENCHMARK_CAPTURE( simulate_ring, parallel, ExecPolicy::parallel )->Arg( 1000 )->Arg( 10000 )->Unit( benchmark::kMillisecond );
BENCHMARK_CAPTURE( check_ring, serial, ExecPolicy::serial )->Arg( 1000 )->Arg( 10000 )->Unit( benchmark::kMillisecond );
BENCHMARK_CAPTURE( check_ring, parallel, ExecPolicy::parallel )->Arg( 1000 )->Arg( 10000 )->Unit( benchmark::kMillisecond );

BENCHMARK_MAIN();
