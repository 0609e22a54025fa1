#include "agrkit/realization.hpp"

#include "agrkit/error.hpp"
#include "dsl.hpp"
#include "text_util.hpp"

#include <algorithm>

namespace agrkit
{

bool Realization::has_agent( const Identifier& a ) const { return std::find( agents.begin(), agents.end(), a ) != agents.end(); }

std::set<Identifier> Realization::roles_of( const Identifier& agent ) const
{
    std::set<Identifier> out;
    for ( const auto& [a, r] : fulfils )
        if ( a == agent )
            out.insert( r );
    return out;
}

std::set<Identifier> Realization::agents_of( const Identifier& role ) const
{
    std::set<Identifier> out;
    for ( const auto& [a, r] : fulfils )
        if ( r == role )
            out.insert( a );
    return out;
}

std::vector<const AgentProperty*> RealizationDyn::agent_properties( const Identifier& agent ) const
{
    std::vector<const AgentProperty*> out;
    for ( const auto& p : properties )
        if ( !p.communication && p.agent == agent )
            out.push_back( &p );
    return out;
}

std::vector<const AgentProperty*> RealizationDyn::comm_properties( const Identifier& from, const Identifier& to ) const
{
    std::vector<const AgentProperty*> out;
    for ( const auto& p : properties )
        if ( p.communication && p.from == from && p.to == to )
            out.push_back( &p );
    return out;
}

namespace
{

struct UnboundAlias : TypeError
{
    using TypeError::TypeError;
};

using detail::LogicalLine;
using detail::Words;

void predicates_of( const StateProp& s, std::set<std::string>& out )
{
    if ( s.op == StateProp::Op::atom )
        out.insert( s.atom.predicate );
    if ( s.lhs )
        predicates_of( *s.lhs, out );
    if ( s.rhs )
        predicates_of( *s.rhs, out );
}

struct PendingProperty
{
    AgentProperty prop;
    int column;
};

class RealizationParser
{
public:
    explicit RealizationParser( const AGRDyn& dyn ) : _dyn( dyn ) {}

    RealizationModel run( std::string_view text )
    {
        for ( const auto& line : detail::logical_lines( text ) )
            declaration( line );
        for ( auto& p : _pending )
            finish( p );
        return std::move( _out );
    }

private:
    const AGRDyn& _dyn;
    RealizationModel _out;
    std::vector<PendingProperty> _pending;

    void declaration( const LogicalLine& line )
    {
        auto words = detail::split_ws( line.text );
        std::string head = words.empty() ? std::string() : std::string( words.front() );
        if ( head == "agentontology" || head == "ontology" )
        {
            auto decl = detail::parse_ontology_line( line );
            try
            {
                if ( decl.input )
                    _out.rdyn.input_ontologies[decl.owner].merge( *decl.input );
                if ( decl.output )
                    _out.rdyn.output_ontologies[decl.owner].merge( *decl.output );
            }
            catch ( const TypeError& e )
            {
                throw ParseError( e.what(), line.line );
            }
            return;
        }
        if ( head == "agentproperty" || head == "commproperty" )
            return property( line, head == "commproperty" );

        Words w( line );
        w.next();
        if ( head == "agent" )
        {
            _out.real.agents.push_back( w.identifier( "agent name" ) );
            w.end();
        }
        else if ( head == "fulfils" || head == "fulfills" )
        {
            auto agent = w.identifier( "agent name" );
            do
                _out.real.fulfils.insert( { agent, w.identifier( "role name" ) } );
            while ( w.accept_symbol( "," ) );
            w.end();
        }
        else
            w.fail( "unknown declaration '" + head + "'" );
    }

    void property( const LogicalLine& line, bool communication )
    {
        auto def = detail::split_definition( line );
        Words w( { line.line, def.head } );
        w.next();
        AgentProperty p;
        p.id = w.identifier( "property id" );
        p.communication = communication;
        if ( communication )
        {
            w.keyword( "from" );
            p.from = w.identifier( "agent name" );
            w.keyword( "to" );
            p.to = w.identifier( "agent name" );
        }
        else
        {
            w.keyword( "agent" );
            p.agent = w.identifier( "agent name" );
        }
        w.end();
        p.text = def.body;
        p.line = line.line;
        for ( const auto& q : _pending )
            if ( q.prop.id == p.id )
                throw ParseError( "property '" + p.id + "' is declared twice", line.line );
        _pending.push_back( { std::move( p ), def.column } );
    }

    // Agents whose interface parts the property may use.
    std::vector<Identifier> subjects( const AgentProperty& p ) const
    {
        if ( !p.communication )
            return { p.agent };
        return { p.from, p.to };
    }

    void record_alias( const PartRef& part )
    {
        auto name = to_string( part );
        for ( auto& a : _out.aliases )
            if ( a.agent_part == name )
            {
                for ( const auto& m : part.alias_members )
                    if ( std::find( a.role_parts.begin(), a.role_parts.end(), m ) == a.role_parts.end() )
                        a.role_parts.push_back( m );
                std::sort( a.role_parts.begin(), a.role_parts.end() );
                return;
            }
        _out.aliases.push_back( { name, part.alias_members } );
    }

    PartRef alias( const PartRef& part, const StateProp& state, const AgentProperty& p )
    {
        auto allowed = subjects( p );
        const auto& real = _out.real;
        if ( part.kind == PartKind::input || part.kind == PartKind::output )
        {
            if ( std::find( allowed.begin(), allowed.end(), part.name ) != allowed.end() )
            {
                auto dir = part.kind == PartKind::input ? Direction::input : Direction::output;
                auto roles = real.roles_of( part.name );
                if ( roles.empty() )
                    throw UnboundAlias( "unbound alias: agent '" + part.name + "' fulfils no role" );
                std::set<std::string> preds;
                predicates_of( state, preds );
                std::set<AtomicPart> members;
                for ( const auto& pred : preds )
                {
                    bool found = false;
                    for ( const auto& r : roles )
                    {
                        const auto* onto = _dyn.part_ontology( { dir, r } );
                        if ( !onto || onto->declares( pred ) )
                        {
                            members.insert( { dir, r } );
                            found = true;
                        }
                    }
                    if ( !found )
                        throw UnboundAlias( "unbound alias: predicate '" + pred + "' at " + to_string( part ) + " is not in the " +
                                         ( dir == Direction::input ? "input" : "output" ) + " ontology of any role '" + part.name + "' fulfils" );
                }
                if ( preds.empty() )
                    for ( const auto& r : roles )
                        members.insert( { dir, r } );
                PartRef out = part;
                out.alias_members.assign( members.begin(), members.end() );
                record_alias( out );
                return out;
            }
        }
        // a role part: the role must be fulfilled by one of the subjects
        std::vector<Identifier> roles;
        if ( part.kind == PartKind::input || part.kind == PartKind::output || part.kind == PartKind::role )
            roles.push_back( part.name );
        else
            throw TypeError( "agent properties may only refer to agent or role parts, not " + to_string( part ) );
        for ( const auto& r : roles )
        {
            bool ok = std::any_of( allowed.begin(), allowed.end(), [&]( const Identifier& a ) { return real.fulfils.count( { a, r } ) > 0; } );
            if ( !ok )
                throw TypeError( "part " + to_string( part ) + " belongs to neither an agent of the property nor a role they fulfil" );
        }
        return part;
    }

    FormulaPtr rewrite( const FormulaPtr& f, const AgentProperty& p )
    {
        switch ( f->op )
        {
        case Formula::Op::holds:
        {
            auto copy = std::make_shared<Formula>( *f );
            copy->part = alias( f->part, *f->state, p );
            return copy;
        }
        case Formula::Op::negation:
        case Formula::Op::forall:
        case Formula::Op::exists:
        {
            auto copy = std::make_shared<Formula>( *f );
            copy->lhs = rewrite( f->lhs, p );
            return copy;
        }
        case Formula::Op::conjunction:
        case Formula::Op::disjunction:
        case Formula::Op::implication:
        {
            auto copy = std::make_shared<Formula>( *f );
            copy->lhs = rewrite( f->lhs, p );
            copy->rhs = rewrite( f->rhs, p );
            return copy;
        }
        default: return f;
        }
    }

    void finish( PendingProperty& pending )
    {
        auto& p = pending.prop;
        try
        {
            for ( const auto& a : subjects( p ) )
                if ( !_out.real.has_agent( a ) )
                    throw TypeError( "undeclared agent '" + a + "'" );
            p.parsed = parse_property( p.text );
            p.core = rewrite( core_of( p.parsed ), p );
            type_check( _dyn, *p.core );
        }
        catch ( const UnboundAlias& e )
        {
            // Structural validation still applies; only entailment needs the alias.
            p.core = nullptr;
            p.unbound = e.what();
        }
        catch ( const ParseError& e )
        {
            throw ParseError( "property '" + p.id + "': " + e.detail(), p.line, e.column() ? pending.column + e.column() - 1 : 0 );
        }
        catch ( const Error& e )
        {
            throw ParseError( "property '" + p.id + "': " + e.what(), p.line );
        }
        _out.rdyn.properties.push_back( std::move( p ) );
    }
};

std::string names( const std::vector<Signature>& sigs )
{
    std::string out;
    for ( const auto& s : sigs )
        out += ( out.empty() ? "" : ", " ) + to_string( s );
    return out;
}

} // namespace

RealizationModel parse_realization( std::string_view text, const AGRDyn& dyn ) { return RealizationParser( dyn ).run( text ); }

RealizationModel load_realization( const std::string& path, const AGRDyn& dyn ) { return parse_realization( detail::read_file( path ), dyn ); }

std::vector<Violation> validate_realization( const AGRDyn& dyn, const Realization& real, const RealizationDyn& rdyn, const RealizationOptions& opts )
{
    std::vector<Violation> out;
    const auto& org = dyn.org;

    std::map<Identifier, int> seen;
    for ( const auto& a : real.agents )
        if ( ++seen[a] == 2 )
            out.push_back( { rules::duplicate_identifier, { a }, "agent '" + a + "' declared more than once" } );

    for ( const auto& [a, r] : real.fulfils )
    {
        if ( !real.has_agent( a ) )
            out.push_back( { rules::undeclared_agent, { a, r }, "fulfils references undeclared agent '" + a + "'" } );
        if ( !org.has_role( r ) )
            out.push_back( { rules::undeclared_role, { a, r }, "agent '" + a + "' fulfils undeclared role '" + r + "'" } );
    }

    for ( const auto& r : std::set<Identifier>( org.roles.begin(), org.roles.end() ) )
    {
        auto agents = real.agents_of( r );
        if ( agents.size() > 1 )
        {
            std::vector<std::string> ids{ r };
            ids.insert( ids.end(), agents.begin(), agents.end() );
            out.push_back( { rules::shared_role, ids, "role '" + r + "' is fulfilled by more than one agent" } );
        }
        if ( agents.empty() && !dyn.filed_under( Filing::role, r ).empty() )
            out.push_back( { rules::unfulfilled_role, { r }, "role '" + r + "' has dynamic properties but no agent fulfils it", Severity::warning } );
    }

    // (i) ontology inclusion
    static const Ontology empty;
    for ( const auto& [a, r] : real.fulfils )
    {
        if ( !org.has_role( r ) )
            continue;
        for ( auto dir : { Direction::input, Direction::output } )
        {
            const auto& role_side = dir == Direction::input ? dyn.input_ontologies : dyn.output_ontologies;
            const auto& agent_side = dir == Direction::input ? rdyn.input_ontologies : rdyn.output_ontologies;
            auto rit = role_side.find( r );
            if ( rit == role_side.end() )
                continue;
            auto ait = agent_side.find( a );
            const Ontology& agent_onto = ait == agent_side.end() ? empty : ait->second;
            auto missing = agent_onto.missing_from( rit->second );
            if ( missing.empty() )
                continue;
            bool overlaps = missing.size() < rit->second.signatures.size();
            const char* side = dir == Direction::input ? "input" : "output";
            std::vector<std::string> ids{ a, r };
            for ( const auto& s : missing )
                ids.push_back( s.predicate );
            out.push_back( { rules::ontology_inclusion, ids,
                             std::string( "the " ) + side + " ontology of agent '" + a + "' lacks " + names( missing ) + " from role '" + r + "'",
                             opts.overlap && overlaps ? Severity::warning : Severity::error } );
        }
    }

    // (ii) one agent per intergroup interaction
    for ( const auto& i : org.interactions )
    {
        std::set<Identifier> agents;
        bool unfulfilled = false;
        auto roles = involved_roles( org, ElementKind::interaction, i );
        for ( const auto& r : roles )
        {
            auto as = real.agents_of( r );
            if ( as.empty() )
                unfulfilled = true;
            agents.insert( as.begin(), as.end() );
        }
        if ( unfulfilled || agents.size() != 1 )
        {
            std::vector<std::string> ids{ i };
            ids.insert( ids.end(), roles.begin(), roles.end() );
            out.push_back( { rules::intergroup_single_agent, ids, "the roles of interaction '" + i + "' are not fulfilled by one and the same agent" } );
        }
    }

    // an agent on both ends of a transfer must describe its own communication
    for ( const auto& t : org.transfers )
    {
        auto src = org.transfer_source( t );
        auto dst = org.transfer_destination( t );
        if ( !src || !dst )
            continue;
        for ( const auto& a : real.agents_of( *src ) )
            if ( real.agents_of( *dst ).count( a ) && rdyn.comm_properties( a, a ).empty() )
                out.push_back( { rules::self_communication, { a, t }, "agent '" + a + "' fulfils both ends of transfer '" + t + "' but has no communication property with itself" } );
    }
    return out;
}

std::vector<EntailmentVerdict> check_entailment_on_traces( const std::vector<std::pair<Identifier, FormulaPtr>>& antecedents,
                                                           const std::vector<std::pair<Identifier, FormulaPtr>>& consequents,
                                                           const std::vector<const Trace*>& traces, const CheckOptions& opts )
{
    std::vector<EntailmentVerdict> out;
    CheckOptions quiet = opts;
    quiet.explain = false;
    std::vector<bool> premises;
    for ( const auto* t : traces )
    {
        bool all = std::all_of( antecedents.begin(), antecedents.end(),
                                [&]( const auto& a ) { return check_property( *a.second, *t, quiet ).truth == Truth::holds; } );
        premises.push_back( all );
    }
    std::vector<Identifier> ant_ids;
    for ( const auto& a : antecedents )
        ant_ids.push_back( a.first );
    for ( const auto& [id, f] : consequents )
    {
        EntailmentVerdict v;
        v.consequent = id;
        v.antecedents = ant_ids;
        for ( std::size_t i = 0; i < traces.size(); ++i )
        {
            if ( !premises[i] )
                continue;
            auto verdict = check_property( *f, *traces[i], opts );
            if ( verdict.truth == Truth::fails )
            {
                v.refuted = true;
                v.trace = traces[i]->id();
                v.witness = witness_text( verdict );
                break;
            }
        }
        out.push_back( std::move( v ) );
    }
    return out;
}

std::vector<EntailmentVerdict> check_realization( const AGRDyn& dyn, const RealizationModel& rm, const std::vector<const Trace*>& traces, const CheckOptions& opts )
{
    CheckOptions o = opts;
    o.org = &dyn.org;
    const auto& real = rm.real;
    auto props = []( const auto& list ) {
        std::vector<std::pair<Identifier, FormulaPtr>> out;
        for ( const auto* p : list )
        {
            if constexpr ( requires { p->unbound; } )
                if ( !p->core )
                    throw TypeError( "property '" + p->id + "': " + p->unbound );
            out.emplace_back( p->id, p->core );
        }
        return out;
    };
    std::vector<EntailmentVerdict> out;
    auto run = [&]( const char* schema, const std::string& subject, const auto& ants, const auto& cons ) {
        if ( cons.empty() )
            return;
        for ( auto& v : check_entailment_on_traces( props( ants ), props( cons ), traces, o ) )
        {
            v.schema = schema;
            v.subject = subject;
            out.push_back( std::move( v ) );
        }
    };

    for ( const auto& a : real.agents )
        for ( const auto& r : real.roles_of( a ) )
            run( "agent-role", a, rm.rdyn.agent_properties( a ), dyn.filed_under( Filing::role, r ) );

    for ( const auto& i : dyn.org.interactions )
    {
        std::set<Identifier> agents;
        for ( const auto& r : involved_roles( dyn.org, ElementKind::interaction, i ) )
        {
            auto as = real.agents_of( r );
            agents.insert( as.begin(), as.end() );
        }
        if ( agents.size() == 1 )
            run( "agent-interaction", *agents.begin(), rm.rdyn.agent_properties( *agents.begin() ), dyn.filed_under( Filing::interaction, i ) );
    }

    for ( const auto& t : dyn.org.transfers )
    {
        auto src = dyn.org.transfer_source( t );
        auto dst = dyn.org.transfer_destination( t );
        if ( !src || !dst )
            continue;
        auto from = real.agents_of( *src );
        auto to = real.agents_of( *dst );
        if ( from.size() != 1 || to.size() != 1 )
            continue;
        run( "communication-transfer", *from.begin() + "->" + *to.begin(), rm.rdyn.comm_properties( *from.begin(), *to.begin() ),
             dyn.filed_under( Filing::transfer, t ) );
    }
    return out;
}

} // namespace agrkit
