#pragma once

#include "agrkit/model.hpp"
#include "agrkit/simulator.hpp"
#include "agrkit/trace.hpp"

#include <random>
#include <string>
#include <vector>

namespace testing_support
{

inline std::string corpus( const std::string& name ) { return std::string( AGRKIT_CORPUS_DIR ) + "/" + name; }

inline const agrkit::Model& factory()
{
    static const agrkit::Model m = agrkit::load_model( corpus( "factory.agr" ) );
    return m;
}

inline agrkit::Trace simulate_factory( std::uint64_t seed, int horizon = 50, const std::vector<std::string>& exclude = {},
                                       agrkit::ExecPolicy policy = agrkit::default_policy() )
{
    const auto& m = factory();
    auto ex = agrkit::extract_executable( m.dyn );
    std::erase_if( ex.rules, [&]( const agrkit::LeadsToRule& r ) {
        for ( const auto& x : exclude )
            if ( r.property == x || r.element == x )
                return true;
        return false;
    } );
    auto stimuli = agrkit::load_stimuli( corpus( "factory.stimuli" ), m.dyn.schema() );
    agrkit::SimulationOptions o;
    o.horizon = horizon;
    o.seed = seed;
    o.policy = policy;
    return agrkit::simulate( m.dyn, ex.rules, stimuli, o );
}

struct Vocabulary
{
    std::vector<agrkit::AtomicPart> parts;
    std::vector<agrkit::Atom> atoms;
};

/// Each (time, part, atom) is present with probability `density`.
inline agrkit::Trace random_trace( std::mt19937_64& rng, const Vocabulary& v, int horizon, double density, const std::string& id = "rnd" )
{
    agrkit::Trace tr( id, horizon );
    std::bernoulli_distribution coin( density );
    for ( int t = 0; t <= horizon; ++t )
        for ( const auto& p : v.parts )
            for ( const auto& a : v.atoms )
                if ( coin( rng ) )
                    tr.insert( t, p, a );
    return tr;
}

inline agrkit::Atom atom( std::string pred, std::vector<agrkit::Value> args = {} ) { return { std::move( pred ), std::move( args ) }; }

inline agrkit::AtomicPart in( const std::string& r ) { return { agrkit::Direction::input, r }; }
inline agrkit::AtomicPart out( const std::string& r ) { return { agrkit::Direction::output, r }; }

} // namespace testing_support
