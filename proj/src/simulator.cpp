#include "agrkit/simulator.hpp"

#include "agrkit/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace agrkit
{

namespace
{

struct NoMatch
{
    std::string reason;
};

bool is_var( const TimeTerm& t, const std::string& var, long offset )
{
    return t.base == TimeTerm::Base::variable && t.var == var && t.offset == offset;
}

AtomicPart atomic_part( const PartRef& part, const char* where )
{
    if ( !part.is_atomic() )
        throw NoMatch{ std::string( where ) + " part " + to_string( part ) + " is not an input or output part" };
    return part.atomic();
}

void literals( const StateProp& s, const AtomicPart& part, std::vector<PartAtom>& pos, std::vector<PartAtom>& neg )
{
    switch ( s.op )
    {
    case StateProp::Op::atom:
        if ( !s.atom.ground )
            throw NoMatch{ "atom with variables" };
        pos.emplace_back( part, *s.atom.ground );
        return;
    case StateProp::Op::negation:
        if ( s.lhs->op != StateProp::Op::atom || !s.lhs->atom.ground )
            throw NoMatch{ "negation of a compound state property" };
        neg.emplace_back( part, *s.lhs->atom.ground );
        return;
    case StateProp::Op::conjunction:
        literals( *s.lhs, part, pos, neg );
        literals( *s.rhs, part, pos, neg );
        return;
    case StateProp::Op::constant:
        if ( !s.value )
            throw NoMatch{ "constant false" };
        return;
    default: throw NoMatch{ "state property is not a conjunction of literals" };
    }
}

void antecedent( const Formula& f, const std::string& t, LeadsToRule& rule )
{
    if ( f.op == Formula::Op::conjunction )
    {
        antecedent( *f.lhs, t, rule );
        antecedent( *f.rhs, t, rule );
        return;
    }
    if ( f.op != Formula::Op::holds || !f.trace_var.empty() || !is_var( f.time, t, 0 ) )
        throw NoMatch{ "antecedent is not a conjunction of holds(" + t + ", ...)" };
    literals( *f.state, atomic_part( f.part, "antecedent" ), rule.positive, rule.negative );
}

// Consequent atoms asserted from `var + offset`, either directly or for a
// duration block `forall u in [var+offset, var+offset+h-1]`.
void consequent( const Formula& f, const std::string& var, long offset, LeadsToRule& rule, long& h )
{
    auto take_h = [&]( long value ) {
        if ( h != 0 && h != value )
            throw NoMatch{ "consequent atoms with different durations" };
        h = value;
    };
    switch ( f.op )
    {
    case Formula::Op::conjunction:
        consequent( *f.lhs, var, offset, rule, h );
        consequent( *f.rhs, var, offset, rule, h );
        return;
    case Formula::Op::holds:
    {
        if ( !f.trace_var.empty() || !is_var( f.time, var, offset ) )
            throw NoMatch{ "consequent time does not match the delay window" };
        std::vector<PartAtom> neg;
        literals( *f.state, atomic_part( f.part, "consequent" ), rule.consequent, neg );
        if ( !neg.empty() )
            throw NoMatch{ "negative consequent" };
        take_h( 1 );
        return;
    }
    case Formula::Op::forall:
    {
        if ( f.sort != Sort::time || !f.lower || !f.upper || !is_var( *f.lower, var, offset ) || f.upper->base != TimeTerm::Base::variable ||
             f.upper->var != var || f.upper->offset < offset )
            throw NoMatch{ "consequent quantifier is not a duration block" };
        long block = f.upper->offset - offset + 1;
        long inner = 0;
        consequent( *f.lhs, f.var, 0, rule, inner );
        if ( inner != 1 )
            throw NoMatch{ "nested duration blocks" };
        take_h( block );
        return;
    }
    default: throw NoMatch{ "consequent is not a conjunction of holds" };
    }
}

long leftmost_offset( const Formula& f, const std::string& t )
{
    const Formula* cur = &f;
    while ( cur->op == Formula::Op::conjunction )
        cur = cur->lhs.get();
    const TimeTerm* time = cur->op == Formula::Op::holds ? &cur->time : ( cur->op == Formula::Op::forall && cur->lower ? &*cur->lower : nullptr );
    if ( !time || time->base != TimeTerm::Base::variable || time->var != t )
        throw NoMatch{ "consequent is not anchored at " + t };
    return time->offset;
}

LeadsToRule match( const DynProperty& p )
{
    const Formula& top = *p.core;
    if ( top.op != Formula::Op::forall || top.sort != Sort::time )
        throw NoMatch{ "not of the form forall t. ..." };
    if ( ( top.lower && !( top.lower->base == TimeTerm::Base::constant && top.lower->offset == 0 ) ) ||
         ( top.upper && !( top.upper->base == TimeTerm::Base::end && top.upper->offset == 0 ) ) )
        throw NoMatch{ "outer time quantifier is bounded" };
    const auto& t = top.var;
    const Formula& body = *top.lhs;
    if ( body.op != Formula::Op::implication )
        throw NoMatch{ "body is not an implication" };

    LeadsToRule rule;
    rule.property = p.id;
    rule.filing = p.filing;
    rule.element = p.element;
    antecedent( *body.lhs, t, rule );

    const Formula& rhs = *body.rhs;
    long h = 0;
    if ( rhs.op == Formula::Op::exists )
    {
        if ( rhs.sort != Sort::time || !rhs.lower || !rhs.upper || rhs.lower->base != TimeTerm::Base::variable || rhs.lower->var != t ||
             rhs.upper->base != TimeTerm::Base::variable || rhs.upper->var != t )
            throw NoMatch{ "delay window is not [" + t + "+e, " + t + "+f]" };
        rule.e = rhs.lower->offset;
        rule.f = rhs.upper->offset;
        consequent( *rhs.lhs, rhs.var, 0, rule, h );
    }
    else
    {
        rule.e = rule.f = leftmost_offset( rhs, t );
        consequent( rhs, t, rule.e, rule, h );
    }
    if ( rule.e < 0 || rule.f < rule.e )
        throw NoMatch{ "delay window [" + std::to_string( rule.e ) + ", " + std::to_string( rule.f ) + "] is not forward" };
    if ( rule.positive.empty() )
        throw NoMatch{ "antecedent has no positive literal" };
    rule.h = h;
    return rule;
}

std::string rule_name( const LeadsToRule& r ) { return "rule of '" + r.property + "'"; }

} // namespace

std::optional<LeadsToRule> match_leads_to( const AGRDyn& dyn, const DynProperty& p, std::string* reason )
{
    auto refuse = [&]( std::string why ) -> std::optional<LeadsToRule> {
        if ( reason )
            *reason = std::move( why );
        return std::nullopt;
    };
    if ( p.filing == Filing::group || p.filing == Filing::organisation )
        return refuse( std::string( to_string( p.filing ) ) + " properties are checked after simulation" );
    if ( is_multi_trace( *p.core ) )
        return refuse( "quantifies over traces" );
    LeadsToRule rule;
    try
    {
        rule = match( p );
    }
    catch ( const NoMatch& m )
    {
        return refuse( m.reason );
    }
    auto problems = check_rules( dyn, { rule } );
    if ( !problems.empty() )
        return refuse( problems.front().message );
    return rule;
}

Extraction extract_executable( const AGRDyn& dyn )
{
    Extraction out;
    for ( const auto& p : dyn.properties )
    {
        std::string reason;
        if ( auto rule = match_leads_to( dyn, p, &reason ) )
            out.rules.push_back( std::move( *rule ) );
        else
            out.residue.push_back( { p.id, reason } );
    }
    return out;
}

std::vector<Violation> check_rules( const AGRDyn& dyn, const std::vector<LeadsToRule>& rules )
{
    std::vector<Violation> out;
    const auto& org = dyn.org;
    for ( const auto& r : rules )
    {
        if ( r.e < 0 || r.f < r.e || r.h < 1 )
            out.push_back( { rules::rule_delay, { r.property }, rule_name( r ) + " has delay [" + std::to_string( r.e ) + ", " + std::to_string( r.f ) +
                                                                       "] and duration " + std::to_string( r.h ) } );
        std::optional<AtomicPart> from, to;
        switch ( r.filing )
        {
        case Filing::role:
            from = AtomicPart{ Direction::input, r.element };
            to = AtomicPart{ Direction::output, r.element };
            break;
        case Filing::transfer:
            if ( auto s = org.transfer_source( r.element ) )
                from = AtomicPart{ Direction::output, *s };
            if ( auto d = org.transfer_destination( r.element ) )
                to = AtomicPart{ Direction::input, *d };
            break;
        case Filing::interaction:
            if ( auto s = org.interaction_source( r.element ) )
                from = AtomicPart{ Direction::input, *s };
            if ( auto d = org.interaction_destination( r.element ) )
                to = AtomicPart{ Direction::output, *d };
            break;
        default:
            out.push_back( { rules::rule_direction, { r.property }, rule_name( r ) + " is filed under a " + to_string( r.filing ) } );
            continue;
        }
        auto check_side = [&]( const std::vector<PartAtom>& lits, const std::optional<AtomicPart>& expected, const char* side ) {
            for ( const auto& [part, atom] : lits )
            {
                if ( !org.has_role( part.role ) )
                    out.push_back( { rules::rule_undeclared_part, { r.property, to_string( part ) }, rule_name( r ) + " uses undeclared part " + to_string( part ) } );
                else if ( !expected || part != *expected )
                    out.push_back( { rules::rule_direction,
                                     { r.property, to_string( part ) },
                                     rule_name( r ) + " has " + side + " at " + to_string( part ) + ( expected ? ", expected " + to_string( *expected ) : "" ) } );
            }
        };
        check_side( r.positive, from, "an antecedent" );
        check_side( r.negative, from, "an antecedent" );
        check_side( r.consequent, to, "a consequent" );
    }
    return out;
}

StimuliSchedule read_stimuli( std::string_view text, const TraceSchema& schema )
{
    StimuliSchedule s;
    bool header = false;
    auto lines = detail::split_lines( text );
    for ( std::size_t i = 0; i < lines.size(); ++i )
    {
        int line_no = static_cast<int>( i ) + 1;
        auto line = detail::trim( detail::strip_comment( lines[i] ) );
        if ( line.empty() )
            continue;
        if ( !header )
        {
            auto words = detail::split_ws( line );
            if ( words.size() != 2 || words[0] != "stimuli" || !is_identifier( std::string( words[1] ) ) )
                throw ParseError( "expected header 'stimuli <id>'", line_no );
            s.id = std::string( words[1] );
            header = true;
            continue;
        }
        auto item = parse_timed_atom( line, line_no );
        try
        {
            schema.check( item.part, item.atom );
        }
        catch ( const Error& e )
        {
            throw ParseError( e.what(), line_no );
        }
        s.items.push_back( std::move( item ) );
    }
    if ( !header )
        throw ParseError( "missing stimuli header", 1 );
    return s;
}

std::string write_stimuli( const StimuliSchedule& s )
{
    auto items = s.items;
    std::stable_sort( items.begin(), items.end(), []( const TimedAtom& a, const TimedAtom& b ) {
        return std::tie( a.time, a.part, a.atom ) < std::tie( b.time, b.part, b.atom );
    } );
    std::ostringstream out;
    out << "stimuli " << s.id << "\n";
    for ( const auto& it : items )
        out << it.time << " " << to_string( it.part ) << " " << to_string( it.atom ) << "\n";
    return out.str();
}

StimuliSchedule load_stimuli( const std::string& path, const TraceSchema& schema )
{
    auto text = detail::read_file( path );
    try
    {
        return read_stimuli( text, schema );
    }
    catch ( const ParseError& e )
    {
        throw ParseError( path + ": " + e.detail(), e.line(), e.column() );
    }
}

Trace simulate( const AGRDyn& dyn, const std::vector<LeadsToRule>& rules, const StimuliSchedule& stimuli, const SimulationOptions& opts )
{
    if ( opts.horizon < 0 )
        throw PreconditionError( "horizon must be non-negative" );
    if ( auto problems = check_rules( dyn, rules ); !problems.empty() )
        throw PreconditionError( problems.front().message );

    const int horizon = opts.horizon;
    Trace trace( opts.trace_id, horizon );
    for ( const auto& s : stimuli.items )
        if ( s.time <= horizon )
            trace.insert( s.time, s.part, s.atom );

    std::optional<std::mt19937_64> rng;
    if ( opts.seed )
        rng.emplace( *opts.seed );

    const long n = static_cast<long>( rules.size() );
    std::vector<char> fired( rules.size() );
    std::vector<char> ready( rules.size() );
    [[maybe_unused]] const bool parallel = opts.policy == ExecPolicy::parallel && n >= 32;

    auto holds_at = [&]( const LeadsToRule& r, int t ) {
        for ( const auto& [part, atom] : r.positive )
            if ( !trace.at( t, part ).contains( atom ) )
                return false;
        for ( const auto& [part, atom] : r.negative )
            if ( trace.at( t, part ).contains( atom ) )
                return false;
        return true;
    };

    for ( int t = 0; t <= horizon; ++t )
    {
        std::fill( fired.begin(), fired.end(), 0 );
        // zero-delay firings change the current frame, so repeat until nothing new appears at t
        for ( bool changed_now = true; changed_now; )
        {
            changed_now = false;
            // evaluation only reads the trace; all writes happen in the serial pass below
#pragma omp parallel for schedule( static ) if ( parallel )
            for ( long i = 0; i < n; ++i )
                ready[i] = !fired[i] && holds_at( rules[i], t );

            for ( long i = 0; i < n; ++i )
            {
                if ( !ready[i] )
                    continue;
                const auto& r = rules[i];
                fired[i] = 1;
                long d = r.e;
                if ( rng && r.f > r.e )
                    d = std::uniform_int_distribution<long>( r.e, r.f )( *rng );
                for ( long k = 0; k < r.h; ++k )
                {
                    long when = t + d + k;
                    if ( when > horizon )
                        break;
                    for ( const auto& [part, atom] : r.consequent )
                    {
                        if ( when == t && !trace.at( t, part ).contains( atom ) )
                            changed_now = true;
                        trace.insert( static_cast<int>( when ), part, atom );
                    }
                }
            }
        }
    }
    return trace;
}

} // namespace agrkit
