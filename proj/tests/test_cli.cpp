#include "agrkit/checker.hpp"
#include "agrkit/cli.hpp"
#include "common.hpp"
#include "text_util.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace agrkit;
namespace fs = std::filesystem;

namespace
{

struct Run
{
    int code = -1;
    std::string out;
    std::string err;
};

Run run( std::vector<std::string> args )
{
    args.insert( args.begin(), "agrkit" );
    std::vector<const char*> argv;
    for ( const auto& a : args )
        argv.push_back( a.c_str() );
    std::ostringstream out, err;
    Run r;
    r.code = run_cli( static_cast<int>( argv.size() ), argv.data(), out, err );
    r.out = out.str();
    r.err = err.str();
    return r;
}

const fs::path& scratch()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ( "agrkit_cli_test_" + std::to_string( ::getpid() ) );
        fs::create_directories( d );
        return d;
    }();
    return dir;
}

std::string write( const std::string& name, const std::string& text )
{
    auto p = scratch() / name;
    std::ofstream( p ) << text;
    return p.string();
}

std::string model() { return testing_support::corpus( "factory.agr" ); }
std::string stimuli() { return testing_support::corpus( "factory.stimuli" ); }

std::string simulated( const std::string& name, std::vector<std::string> extra = {} )
{
    auto path = ( scratch() / name ).string();
    std::vector<std::string> args = { "simulate", model(), "--stimuli", stimuli(), "--horizon", "50", "--seed", "7", "-o", path };
    args.insert( args.end(), extra.begin(), extra.end() );
    auto r = run( args );
    REQUIRE( r.code == 0 );
    return path;
}

std::string summary_digest( const std::string& records )
{
    for ( const auto& line : detail::split_lines( records ) )
        if ( !line.empty() )
        {
            auto j = nlohmann::json::parse( line );
            if ( j["type"] == "summary" )
                return j["report_sha256"];
        }
    return {};
}

bool contains( const std::string& hay, const std::string& needle ) { return hay.find( needle ) != std::string::npos; }

} // namespace

TEST_CASE( "validate" )
{
    CHECK( run( { "validate", model() } ).code == exit_code::ok );
    auto base = detail::read_file( model() );
    auto broken = write( "cross.agr", base + "\ntransfer tX from depA1 to depB1\n" );
    auto r = run( { "validate", broken } );
    CHECK( r.code == exit_code::violation );
    CHECK( contains( r.out, "transfer-same-group" ) );

    auto real = testing_support::corpus( "factory.real" );
    CHECK( run( { "validate", model(), real } ).code == exit_code::ok );
}

TEST_CASE( "input errors exit with 2 and a located message" )
{
    auto missing = run( { "validate", ( scratch() / "nope.agr" ).string() } );
    CHECK( missing.code == exit_code::error );
    CHECK( contains( missing.err, "agrkit: " ) );

    auto bad = write( "bad.agr", "organisation o\ngroup g { roles a }\nproperty P role a := ttl: forall t . holds(t, input(a), p) & @\n" );
    auto r = run( { "validate", bad } );
    CHECK( r.code == exit_code::error );
    CHECK( contains( r.err, bad + ":3:" ) );

    CHECK( run( {} ).code == exit_code::error );
    CHECK( run( { "frobnicate" } ).code == exit_code::error );
    CHECK( run( { "check", model(), simulated( "e.trace" ) } ).code == exit_code::error ); // neither --prop nor --all
    CHECK( run( { "check", model(), simulated( "e2.trace" ), "--prop", "NOPE" } ).code == exit_code::error );
    CHECK( run( { "simulate", model(), "--stimuli", stimuli(), "--horizon", "-3" } ).code == exit_code::error );
    CHECK( run( { "simulate", model(), "--stimuli", stimuli(), "--horizon", "5", "--exclude", "ghost" } ).code == exit_code::error );
    CHECK( run( { "--help" } ).code == exit_code::ok );
}

TEST_CASE( "simulate writes the same trace as the library" )
{
    auto path = simulated( "sim.trace" );
    CHECK( detail::read_file( path ) == write_trace( testing_support::simulate_factory( 7 ) ) );

    auto to_stdout = run( { "simulate", model(), "--stimuli", stimuli(), "--horizon", "50", "--seed", "7" } );
    CHECK( to_stdout.code == 0 );
    CHECK( to_stdout.out == detail::read_file( path ) );
    CHECK( contains( to_stdout.err, "DP_depA1 [1,1] h=1" ) );
}

TEST_CASE( "check exit codes" )
{
    auto good = simulated( "good.trace" );
    auto cut = simulated( "cut.trace", { "--exclude", "tA21" } );
    CHECK( run( { "check", model(), good, "--all" } ).code == exit_code::ok );
    auto r = run( { "check", model(), cut, "--prop", "DP_F", "--prop", "DP_B" } );
    CHECK( r.code == exit_code::violation );
    CHECK( contains( r.out, "fails" ) );
    CHECK( contains( r.out, "DP_F" ) );
    CHECK( run( { "check", model(), good, cut, "--prop", "DP_F" } ).code == exit_code::violation );

    // a pending obligation at the end of a short trace
    auto pending = write( "pending.trace", "trace p horizon 0\n0 input(depA1) progress_info\n" );
    auto p = run( { "check", model(), pending, "--prop", "DP_depA1" } );
    CHECK( p.code == exit_code::inconclusive );
    CHECK( contains( p.out, "inconclusive" ) );
}

TEST_CASE( "records are JSON lines and the digest ignores timings" )
{
    auto good = simulated( "rec.trace" );
    auto a = run( { "check", model(), good, "--all", "--format=records" } );
    auto b = run( { "check", model(), good, "--all", "--format=records" } );
    REQUIRE( a.code == 0 );
    std::set<std::string> types;
    int verdicts = 0;
    for ( const auto& line : detail::split_lines( a.out ) )
    {
        if ( line.empty() )
            continue;
        auto j = nlohmann::json::parse( line );
        types.insert( j.at( "type" ).get<std::string>() );
        if ( j["type"] == "verdict" )
        {
            ++verdicts;
            CHECK( j["truth"] == "holds" );
        }
    }
    CHECK( verdicts == static_cast<int>( testing_support::factory().dyn.properties.size() ) );
    CHECK( types.count( "command" ) );
    CHECK( types.count( "digest" ) );
    CHECK( types.count( "timing" ) );
    CHECK( types.count( "summary" ) );
    CHECK( !summary_digest( a.out ).empty() );
    CHECK( summary_digest( a.out ) == summary_digest( b.out ) );

    auto text = run( { "check", model(), good, "--all" } );
    CHECK( contains( text.out, "# exit 0, report sha256 " ) );
}

TEST_CASE( "interlevel" )
{
    auto good = simulated( "il.trace" );
    auto cut = simulated( "il_cut.trace", { "--exclude", "tA21" } );
    auto r = run( { "interlevel", model(), "--traces", good } );
    CHECK( r.code == exit_code::ok );
    CHECK( contains( r.out, "edge DP_F DP_A" ) );
    auto std_run = run( { "interlevel", model(), "--standard", "--traces", good } );
    CHECK( std_run.code == exit_code::ok );

    auto d = run( { "interlevel", model(), "--traces", cut, "--diagnose", "DP_F" } );
    CHECK( d.code == exit_code::ok );
    CHECK( contains( d.out, "diagnosis DP_F: TRD_A21" ) );
    // a failing leaf falsifies no relation; the proposition is just not applicable
    auto plain = run( { "interlevel", model(), "--traces", cut } );
    CHECK( plain.code == exit_code::ok );
    CHECK( contains( plain.out, "not applicable" ) );
    CHECK( run( { "interlevel", model(), "--traces", cut, "--diagnose", "ZZ" } ).code == exit_code::error );

    auto relations = write( "bad.rel", "relation W for organisation : DP_F <= IrRI_BC\n" );
    CHECK( run( { "interlevel", model(), "--assignment", relations, "--traces", cut } ).code == exit_code::violation );
}

TEST_CASE( "realize" )
{
    auto good = simulated( "re.trace" );
    auto real = testing_support::corpus( "factory.real" );
    CHECK( run( { "realize", model(), real, "--traces", good } ).code == exit_code::ok );
    auto text = detail::read_file( real );
    auto at = text.find( "fulfils agentB2 depB2" );
    REQUIRE( at != std::string::npos );
    text.replace( at, 21, "fulfils agentB2 depB2, divBrep" );
    auto moved = write( "moved.real", text );
    auto r = run( { "realize", model(), moved } );
    CHECK( r.code == exit_code::violation );
    CHECK( contains( r.out, "intergroup-single-agent" ) );
}

TEST_CASE( "the serial switch changes nothing observable" )
{
    auto good = simulated( "ser.trace" );
    auto par = run( { "check", model(), good, "--all", "--format=records" } );
    ::setenv( "AGRKIT_NO_PARALLEL", "1", 1 );
    CHECK( default_policy() == ExecPolicy::serial );
    auto ser = run( { "check", model(), good, "--all", "--format=records" } );
    ::unsetenv( "AGRKIT_NO_PARALLEL" );
    CHECK( default_policy() == ExecPolicy::parallel );
    CHECK( summary_digest( par.out ) == summary_digest( ser.out ) );
}
