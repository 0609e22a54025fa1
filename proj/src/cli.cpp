#include "agrkit/cli.hpp"

#include "agrkit/error.hpp"
#include "agrkit/interlevel.hpp"
#include "agrkit/model.hpp"
#include "agrkit/realization.hpp"
#include "agrkit/report.hpp"
#include "agrkit/simulator.hpp"
#include "text_util.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <optional>

namespace agrkit
{

namespace
{

using nlohmann::json;

struct Options
{
    std::string format = "text";

    std::string model;
    std::string realization;
    bool overlap = false;

    std::string stimuli;
    int horizon = 50;
    std::optional<std::uint64_t> seed;
    std::string output;
    std::vector<std::string> exclude;
    std::string trace_id = "sim";

    std::vector<std::string> traces;
    std::vector<std::string> props;
    bool all = false;

    bool standard = false;
    std::string assignment;
    std::string diagnose;
};

// `file:line:column: message`, the usual compiler-style location.
[[noreturn]] void in_file( const std::string& path, const ParseError& e )
{
    std::string where = path;
    if ( e.line() > 0 )
        where += ":" + std::to_string( e.line() );
    if ( e.column() > 0 )
        where += ":" + std::to_string( e.column() );
    throw Error( where + ": " + e.detail() );
}

const char* severity_text( Severity s ) { return s == Severity::error ? "error" : "warning"; }

std::string join( const std::vector<std::string>& v, const char* sep = ", " )
{
    std::string out;
    for ( const auto& s : v )
        out += ( out.empty() ? "" : sep ) + s;
    return out;
}

void report_violations( RunReport& rep, const std::vector<Violation>& vs )
{
    for ( const auto& v : vs )
        rep.record( "violation",
                    { { "rule", v.rule }, { "severity", severity_text( v.severity ) }, { "identifiers", v.identifiers }, { "message", v.message } },
                    std::string( severity_text( v.severity ) ) + " [" + v.rule + "] " + v.message );
}

void report_verdict( RunReport& rep, const std::string& id, const Verdict& v )
{
    std::string line = std::string( to_string( v.truth ) ) + "  " + id;
    auto w = witness_text( v );
    if ( !v.trace.empty() )
        line += "  trace=" + v.trace;
    if ( !w.empty() )
        line += "  witness: " + w;
    if ( !v.explanation.empty() && v.truth != Truth::holds )
        line += "  (" + v.explanation + ")";
    json witness = json::array();
    for ( const auto& b : v.witness )
        witness.push_back( { { "var", b.var }, { "value", b.value } } );
    rep.record( "verdict",
                { { "property", id }, { "truth", to_string( v.truth ) }, { "trace", v.trace }, { "witness", witness }, { "explanation", v.explanation } },
                line );
}

Model read_model( RunReport& rep, const std::string& path )
{
    auto text = detail::read_file( path );
    rep.digest( path, text );
    try
    {
        return parse_model( text );
    }
    catch ( const ParseError& e )
    {
        in_file( path, e );
    }
}

std::vector<Trace> read_traces( RunReport& rep, const std::vector<std::string>& paths, const AGRDyn& dyn )
{
    std::vector<Trace> out;
    for ( const auto& p : paths )
    {
        auto text = detail::read_file( p );
        rep.digest( p, text );
        try
        {
            out.push_back( read_trace( text, dyn.schema() ) );
        }
        catch ( const ParseError& e )
        {
            in_file( p, e );
        }
    }
    return out;
}

std::vector<const Trace*> pointers( const std::vector<Trace>& traces )
{
    std::vector<const Trace*> out;
    for ( const auto& t : traces )
        out.push_back( &t );
    return out;
}

int cmd_validate( const Options& o, RunReport& rep )
{
    Model m;
    {
        auto timer = rep.time( "parse" );
        m = read_model( rep, o.model );
    }
    std::vector<Violation> vs;
    {
        auto timer = rep.time( "validate" );
        vs = validate_model( m );
        if ( !o.realization.empty() )
        {
            auto text = detail::read_file( o.realization );
            rep.digest( o.realization, text );
            RealizationModel rm;
            try
            {
                rm = parse_realization( text, m.dyn );
            }
            catch ( const ParseError& e )
            {
                in_file( o.realization, e );
            }
            auto more = validate_realization( m.dyn, rm.real, rm.rdyn, { o.overlap } );
            vs.insert( vs.end(), more.begin(), more.end() );
        }
    }
    report_violations( rep, vs );
    auto errors = error_count( vs );
    rep.record( "result", { { "errors", errors }, { "warnings", vs.size() - errors } },
                std::to_string( errors ) + " error(s), " + std::to_string( vs.size() - errors ) + " warning(s)" );
    return errors ? exit_code::violation : exit_code::ok;
}

int cmd_simulate( const Options& o, RunReport& rep, std::ostream& out )
{
    auto m = read_model( rep, o.model );
    auto vs = validate_model( m );
    if ( error_count( vs ) )
    {
        report_violations( rep, vs );
        return exit_code::violation;
    }
    StimuliSchedule stimuli;
    if ( !o.stimuli.empty() )
    {
        auto text = detail::read_file( o.stimuli );
        rep.digest( o.stimuli, text );
        try
        {
            stimuli = read_stimuli( text, m.dyn.schema() );
        }
        catch ( const ParseError& e )
        {
            in_file( o.stimuli, e );
        }
    }

    auto ex = extract_executable( m.dyn );
    for ( const auto& x : o.exclude )
    {
        bool known = m.dyn.find( x ) || m.org().has_transfer( x ) || m.org().has_interaction( x ) || m.org().has_role( x );
        if ( !known )
            throw UnknownIdentifier( "property or element", x );
        std::erase_if( ex.rules, [&]( const LeadsToRule& r ) { return r.property == x || r.element == x; } );
    }
    for ( const auto& r : ex.rules )
        rep.record( "rule",
                    { { "property", r.property }, { "e", r.e }, { "f", r.f }, { "h", r.h } },
                    "rule     " + r.property + " [" + std::to_string( r.e ) + "," + std::to_string( r.f ) + "] h=" + std::to_string( r.h ) );
    for ( const auto& r : ex.residue )
        rep.record( "residue", { { "property", r.property }, { "reason", r.reason } }, "residue  " + r.property + ": " + r.reason );

    SimulationOptions so;
    so.horizon = o.horizon;
    so.seed = o.seed;
    so.trace_id = o.trace_id;
    Trace trace;
    {
        auto timer = rep.time( "simulate" );
        trace = simulate( m.dyn, ex.rules, stimuli, so );
    }
    auto text = write_trace( trace );
    if ( o.output.empty() )
        out << text;
    else
        detail::write_file( o.output, text );
    rep.record( "trace",
                { { "id", trace.id() }, { "horizon", trace.horizon() }, { "atoms", trace.atom_count() }, { "sha256", sha256_hex( text ) } },
                "trace " + trace.id() + ": " + std::to_string( trace.horizon() + 1 ) + " frames, " + std::to_string( trace.atom_count() ) +
                    " atoms, sha256 " + sha256_hex( text ) );
    return exit_code::ok;
}

int cmd_check( const Options& o, RunReport& rep )
{
    auto m = read_model( rep, o.model );
    auto traces = read_traces( rep, o.traces, m.dyn );
    auto ptrs = pointers( traces );
    std::vector<const DynProperty*> props;
    if ( o.all )
        for ( const auto& p : m.dyn.properties )
            props.push_back( &p );
    for ( const auto& id : o.props )
        props.push_back( &m.dyn.at( id ) );

    CheckOptions co;
    co.org = &m.dyn.org;
    bool any_fail = false, any_unknown = false;
    auto timer = rep.time( "check" );
    for ( const auto* p : props )
    {
        auto v = check_property( *p->core, ptrs, co );
        any_fail |= v.truth == Truth::fails;
        any_unknown |= v.truth == Truth::inconclusive;
        report_verdict( rep, p->id, v );
    }
    return any_fail ? exit_code::violation : any_unknown ? exit_code::inconclusive : exit_code::ok;
}

int cmd_interlevel( const Options& o, RunReport& rep )
{
    auto m = read_model( rep, o.model );
    InterlevelAssignment a;
    std::string source;
    if ( o.standard )
    {
        a = standard_assignment( m.dyn );
        source = "standard";
    }
    else if ( !o.assignment.empty() )
    {
        auto text = detail::read_file( o.assignment );
        rep.digest( o.assignment, text );
        try
        {
            a = parse_assignment( text );
        }
        catch ( const ParseError& e )
        {
            in_file( o.assignment, e );
        }
        source = o.assignment;
    }
    else
    {
        a = m.relations;
        source = "model";
    }
    rep.record( "assignment", { { "source", source }, { "relations", a.relations.size() } },
                "assignment " + source + ": " + std::to_string( a.relations.size() ) + " relation(s)" );

    auto vs = validate_assignment( a, m.dyn );
    report_violations( rep, vs );
    bool failed = error_count( vs ) > 0;

    auto conn = check_connected( a, m.dyn );
    auto comp = check_complete( a, m.dyn );
    rep.record( "connected", { { "ok", conn.ok }, { "missing", conn.missing } },
                std::string( "connected " ) + ( conn.ok ? "yes" : "no (missing " + join( conn.missing ) + ")" ) );
    rep.record( "complete", { { "ok", comp.ok }, { "missing", comp.missing } },
                std::string( "complete  " ) + ( comp.ok ? "yes" : "no (missing " + join( comp.missing ) + ")" ) );
    failed |= !conn.ok;

    if ( !failed )
    {
        auto tree = build_and_tree( a, m.dyn );
        rep.text( "and-tree:" );
        for ( const auto& line : detail::split_lines( render_tree( tree ) ) )
            rep.text( "  " + line );
        for ( const auto& line : detail::split_lines( render_adjacency( tree ) ) )
        {
            auto words = detail::split_ws( line );
            rep.record( "edge", { { "from", std::string( words[1] ) }, { "to", std::string( words[2] ) } }, line );
        }
    }

    auto traces = read_traces( rep, o.traces, m.dyn );
    auto ptrs = pointers( traces );
    CheckOptions co;
    co.org = &m.dyn.org;
    if ( !traces.empty() )
    {
        auto timer = rep.time( "falsify" );
        for ( const auto& v : falsify_on_traces( a, m.dyn, ptrs, co ) )
        {
            failed |= v.falsified;
            rep.record( "relation", { { "relation", v.relation }, { "falsified", v.falsified }, { "trace", v.trace }, { "witness", v.witness } },
                        v.falsified ? "falsified      " + v.relation + " on " + v.trace + ( v.witness.empty() ? "" : " (" + v.witness + ")" )
                                    : "not falsified  " + v.relation );
        }
        if ( conn.ok )
            for ( const auto& t : traces )
            {
                auto p = verify_proposition( m.dyn, a, t, co );
                std::string line = "proposition on " + t.id() + ": ";
                if ( !p.applicable )
                    line += "not applicable (" + p.reason + ")";
                else
                {
                    line += std::string( "(a) " ) + ( p.part_a ? "confirmed" : "violated" );
                    line += p.complete ? std::string( ", (b) " ) + ( p.part_b ? "confirmed" : "violated" ) : ", (b) not asserted (incomplete)";
                    if ( !p.failing.empty() )
                        line += "; failing: " + join( p.failing );
                }
                failed |= p.applicable && !p.failing.empty();
                rep.record( "proposition",
                            { { "trace", t.id() }, { "applicable", p.applicable }, { "reason", p.reason }, { "part_a", p.part_a }, { "part_b", p.part_b },
                              { "complete", p.complete }, { "failing", p.failing } },
                            line );
            }
    }

    if ( !o.diagnose.empty() )
    {
        if ( traces.empty() )
            throw PreconditionError( "--diagnose needs --traces" );
        auto timer = rep.time( "diagnose" );
        PropertyOracle oracle( m.dyn, ptrs, co );
        auto d = diagnose( a, oracle, o.diagnose );
        std::vector<std::string> path;
        for ( const auto& [from, to] : d.path )
            path.push_back( from + ">" + to );
        rep.record( "diagnosis",
                    { { "failing", d.failing }, { "culprits", d.culprits }, { "falsified", d.falsified }, { "inconclusive", d.inconclusive }, { "path", path } },
                    "diagnosis " + d.failing + ": " + join( d.culprits ) );
        for ( const auto& id : d.falsified )
            rep.text( "  " + id + ": every antecedent holds, the relation itself is falsified" );
        for ( const auto& id : d.inconclusive )
            rep.text( "  " + id + ": no antecedent fails, some are inconclusive" );
        if ( !path.empty() )
            rep.text( "  path: " + join( path, " " ) );
    }
    return failed ? exit_code::violation : exit_code::ok;
}

int cmd_realize( const Options& o, RunReport& rep )
{
    auto m = read_model( rep, o.model );
    auto text = detail::read_file( o.realization );
    rep.digest( o.realization, text );
    RealizationModel rm;
    try
    {
        rm = parse_realization( text, m.dyn );
    }
    catch ( const ParseError& e )
    {
        in_file( o.realization, e );
    }
    for ( const auto& al : rm.aliases )
    {
        std::vector<std::string> parts;
        for ( const auto& p : al.role_parts )
            parts.push_back( to_string( p ) );
        rep.record( "alias", { { "agent_part", al.agent_part }, { "role_parts", parts } }, "alias " + al.agent_part + " = " + join( parts, " | " ) );
    }
    auto vs = validate_realization( m.dyn, rm.real, rm.rdyn, { o.overlap } );
    report_violations( rep, vs );
    bool failed = error_count( vs ) > 0;

    auto traces = read_traces( rep, o.traces, m.dyn );
    CheckOptions co;
    co.org = &m.dyn.org;
    auto timer = rep.time( "entailment" );
    for ( const auto& v : check_realization( m.dyn, rm, pointers( traces ), co ) )
    {
        failed |= v.refuted;
        rep.record( "entailment",
                    { { "schema", v.schema }, { "subject", v.subject }, { "consequent", v.consequent }, { "antecedents", v.antecedents }, { "refuted", v.refuted },
                      { "trace", v.trace }, { "witness", v.witness } },
                    ( v.refuted ? "refuted      " : "not refuted  " ) + v.schema + " " + v.subject + " => " + v.consequent +
                        ( v.refuted ? " on " + v.trace + ( v.witness.empty() ? "" : " (" + v.witness + ")" ) : "" ) );
    }
    return failed ? exit_code::violation : exit_code::ok;
}

} // namespace

int run_cli( int argc, const char* const* argv, std::ostream& out, std::ostream& err )
{
    Options o;
    CLI::App app{ "agrkit: organisation models, simulation and trace checking" };
    app.name( "agrkit" );
    app.require_subcommand( 1 );
    app.fallthrough();
    app.add_option( "--format", o.format, "Output format" )->check( CLI::IsMember( { "text", "records" } ) );

    auto* validate = app.add_subcommand( "validate", "Check structure, dynamics, relations and an optional realization" );
    validate->add_option( "model", o.model, "Model file" )->required();
    validate->add_option( "realization", o.realization, "Realization file" );
    validate->add_flag( "--overlap", o.overlap, "Accept overlapping instead of included ontologies (warnings)" );

    auto* sim = app.add_subcommand( "simulate", "Generate a trace from the executable properties" );
    sim->add_option( "model", o.model, "Model file" )->required();
    sim->add_option( "--stimuli", o.stimuli, "Stimuli file" );
    sim->add_option( "--horizon", o.horizon, "Last time point" )->check( CLI::NonNegativeNumber );
    sim->add_option( "--seed", o.seed, "Seed for delay choices (minimal delays when omitted)" );
    sim->add_option( "-o,--output", o.output, "Trace file (standard output when omitted)" );
    sim->add_option( "--exclude", o.exclude, "Drop the rules of a property or element" );
    sim->add_option( "--trace-id", o.trace_id, "Id written to the trace header" );

    auto* check = app.add_subcommand( "check", "Check properties against traces" );
    check->add_option( "model", o.model, "Model file" )->required();
    check->add_option( "traces", o.traces, "Trace files" )->required();
    auto* prop = check->add_option( "--prop", o.props, "Property id" );
    auto* all = check->add_flag( "--all", o.all, "Check every property" );
    prop->excludes( all );

    auto* inter = app.add_subcommand( "interlevel", "Analyse an interlevel relation assignment" );
    inter->add_option( "model", o.model, "Model file" )->required();
    auto* std_flag = inter->add_flag( "--standard", o.standard, "Use the standard assignment" );
    inter->add_option( "--assignment", o.assignment, "File of relation declarations" )->excludes( std_flag );
    inter->add_option( "--traces", o.traces, "Trace files" );
    inter->add_option( "--diagnose", o.diagnose, "Failing property to trace down the AND-tree" );

    auto* realize = app.add_subcommand( "realize", "Validate an agent realization and check its entailments" );
    realize->add_option( "model", o.model, "Model file" )->required();
    realize->add_option( "realization", o.realization, "Realization file" )->required();
    realize->add_option( "--traces", o.traces, "Trace files" );
    realize->add_flag( "--overlap", o.overlap, "Accept overlapping instead of included ontologies (warnings)" );

    try
    {
        app.parse( argc, argv );
        if ( check->parsed() && !o.all && o.props.empty() )
            throw CLI::RequiredError( "--prop or --all" );
    }
    catch ( const CLI::ParseError& e )
    {
        int code = app.exit( e, out, err );
        return code == 0 ? exit_code::ok : exit_code::error;
    }

    // A trace written to standard output keeps the report off that stream.
    std::ostream& report_to = sim->parsed() && o.output.empty() ? err : out;
    RunReport rep( o.format == "records" ? ReportFormat::records : ReportFormat::text, report_to );
    rep.command( std::vector<std::string>( argv + 1, argv + argc ) );
    try
    {
        int code = exit_code::error;
        if ( validate->parsed() )
            code = cmd_validate( o, rep );
        else if ( sim->parsed() )
            code = cmd_simulate( o, rep, out );
        else if ( check->parsed() )
            code = cmd_check( o, rep );
        else if ( inter->parsed() )
            code = cmd_interlevel( o, rep );
        else if ( realize->parsed() )
            code = cmd_realize( o, rep );
        return rep.finish( code );
    }
    catch ( const Error& e )
    {
        err << "agrkit: " << e.what() << "\n";
        return exit_code::error;
    }
}

} // namespace agrkit
