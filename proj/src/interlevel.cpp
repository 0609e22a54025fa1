#include "agrkit/interlevel.hpp"

#include "agrkit/error.hpp"

#include <algorithm>
#include <functional>

namespace agrkit
{

std::vector<const InterlevelRelation*> InterlevelAssignment::for_group( const Identifier& g ) const
{
    std::vector<const InterlevelRelation*> out;
    for ( const auto& r : relations )
        if ( r.level == RelationLevel::group && r.group == g )
            out.push_back( &r );
    return out;
}

std::vector<const InterlevelRelation*> InterlevelAssignment::for_organisation() const
{
    std::vector<const InterlevelRelation*> out;
    for ( const auto& r : relations )
        if ( r.level == RelationLevel::organisation )
            out.push_back( &r );
    return out;
}

std::vector<const InterlevelRelation*> InterlevelAssignment::with_consequent( const Identifier& id ) const
{
    std::vector<const InterlevelRelation*> out;
    for ( const auto& r : relations )
        if ( r.consequent == id )
            out.push_back( &r );
    return out;
}

namespace
{

bool transfer_in_group( const OrgStructure& org, const Identifier& t, const Identifier& g )
{
    auto src = org.transfer_source( t );
    auto dst = org.transfer_destination( t );
    return src && dst && org.role_in.count( { *src, g } ) && org.role_in.count( { *dst, g } );
}

// Property ids a relation of the given level may use as antecedents.
std::set<Identifier> eligible_antecedents( const AGRDyn& dyn, RelationLevel level, const Identifier& group, bool with_intragroup )
{
    std::set<Identifier> out;
    const auto& org = dyn.org;
    for ( const auto& p : dyn.properties )
    {
        bool ok = false;
        if ( level == RelationLevel::group )
        {
            switch ( p.filing )
            {
            case Filing::role: ok = org.role_in.count( { p.element, group } ) > 0; break;
            case Filing::transfer: ok = transfer_in_group( org, p.element, group ); break;
            case Filing::group: ok = with_intragroup && p.element == group && p.intragroup; break;
            default: break;
            }
        }
        else
            ok = p.filing == Filing::group || p.filing == Filing::transfer || p.filing == Filing::interaction;
        if ( ok )
            out.insert( p.id );
    }
    return out;
}

std::vector<Identifier> ordered( const AGRDyn& dyn, const std::set<Identifier>& ids )
{
    std::vector<Identifier> out;
    for ( const auto& p : dyn.properties )
        if ( ids.count( p.id ) )
            out.push_back( p.id );
    return out;
}

PropertyType type_or_filing( const AGRDyn& dyn, const Identifier& id )
{
    try
    {
        return property_type_of( dyn, id );
    }
    catch ( const Error& )
    {
        const auto* p = dyn.find( id );
        if ( !p )
            return PropertyType::organisation;
        switch ( p->filing )
        {
        case Filing::role: return PropertyType::role;
        case Filing::transfer: return PropertyType::transfer;
        case Filing::group: return p->intragroup ? PropertyType::intragroup : PropertyType::group;
        case Filing::interaction: return PropertyType::intergroup;
        case Filing::organisation: return PropertyType::organisation;
        }
    }
    return PropertyType::organisation;
}

std::set<AtomicPart> parts_of( const AGRDyn& dyn, const Identifier& id )
{
    std::set<AtomicPart> out;
    if ( const auto* p = dyn.find( id ) )
    {
        try
        {
            for ( const auto& [part, preds] : scope_of( *p->core, &dyn.org ) )
                out.insert( part );
        }
        catch ( const Error& )
        {
        }
    }
    return out;
}

// Antecedents not connected to the consequent through shared atomic parts.
std::vector<Identifier> unused_antecedents( const AGRDyn& dyn, const InterlevelRelation& r )
{
    std::vector<std::set<AtomicPart>> scopes;
    for ( const auto& a : r.antecedents )
        scopes.push_back( parts_of( dyn, a ) );
    std::set<AtomicPart> reached = parts_of( dyn, r.consequent );
    std::vector<bool> used( r.antecedents.size(), false );
    for ( bool grew = true; grew; )
    {
        grew = false;
        for ( std::size_t i = 0; i < scopes.size(); ++i )
        {
            if ( used[i] )
                continue;
            bool touches = std::any_of( scopes[i].begin(), scopes[i].end(), [&]( const AtomicPart& p ) { return reached.count( p ) > 0; } );
            if ( touches )
            {
                used[i] = true;
                reached.insert( scopes[i].begin(), scopes[i].end() );
                grew = true;
            }
        }
    }
    std::vector<Identifier> out;
    for ( std::size_t i = 0; i < used.size(); ++i )
        if ( !used[i] )
            out.push_back( r.antecedents[i] );
    return out;
}

Coverage make_coverage( std::set<Identifier> missing )
{
    return { missing.empty(), { missing.begin(), missing.end() } };
}

} // namespace

InterlevelAssignment standard_assignment( const AGRDyn& dyn )
{
    InterlevelAssignment a;
    for ( const auto& g : dyn.org.groups )
    {
        auto antecedents = ordered( dyn, eligible_antecedents( dyn, RelationLevel::group, g, false ) );
        for ( const auto* p : dyn.filed_under( Filing::group, g ) )
            a.relations.push_back( { "std_" + p->id, RelationLevel::group, g, p->id, antecedents, 0 } );
    }
    auto antecedents = ordered( dyn, eligible_antecedents( dyn, RelationLevel::organisation, {}, false ) );
    for ( const auto* p : dyn.filed_as( Filing::organisation ) )
        a.relations.push_back( { "std_" + p->id, RelationLevel::organisation, {}, p->id, antecedents, 0 } );
    return a;
}

std::vector<Violation> validate_assignment( const InterlevelAssignment& a, const AGRDyn& dyn )
{
    std::vector<Violation> out;
    for ( const auto& r : a.relations )
    {
        const auto* c = dyn.find( r.consequent );
        if ( !c )
            out.push_back( { rules::relation_filing, { r.id, r.consequent }, "relation '" + r.id + "' concludes undeclared property '" + r.consequent + "'" } );
        else if ( r.level == RelationLevel::group && !( c->filing == Filing::group && c->element == r.group ) )
            out.push_back(
                { rules::relation_filing, { r.id, r.consequent }, "relation '" + r.id + "' concludes '" + r.consequent + "', which is not a property of group '" + r.group + "'" } );
        else if ( r.level == RelationLevel::organisation && c->filing != Filing::organisation )
            out.push_back( { rules::relation_filing, { r.id, r.consequent }, "relation '" + r.id + "' concludes '" + r.consequent + "', which is not an organisation property" } );

        auto eligible = eligible_antecedents( dyn, r.level, r.group, true );
        for ( const auto& id : r.antecedents )
            if ( !eligible.count( id ) )
                out.push_back( { rules::relation_antecedent,
                                 { r.id, id },
                                 "relation '" + r.id + "' may not use '" + id + "' as an antecedent" + ( dyn.find( id ) ? "" : " (undeclared)" ) } );

        for ( const auto& id : unused_antecedents( dyn, r ) )
            out.push_back( { rules::unused_antecedent, { r.id, id }, "antecedent '" + id + "' of relation '" + r.id + "' shares no part with the rest of the relation",
                             Severity::warning } );
    }
    try
    {
        (void)build_and_tree( a, dyn );
    }
    catch ( const CycleError& e )
    {
        out.push_back( { rules::relation_cycle, {}, e.what() } );
    }
    return out;
}

Coverage check_connected( const InterlevelAssignment& a, const AGRDyn& dyn )
{
    std::set<Identifier> missing;
    for ( const auto* r : a.for_organisation() )
        for ( const auto& id : r->antecedents )
        {
            const auto* p = dyn.find( id );
            if ( !p || p->filing != Filing::group )
                continue;
            auto group_rel = a.for_group( p->element );
            bool covered = std::any_of( group_rel.begin(), group_rel.end(), [&]( const InterlevelRelation* g ) { return g->consequent == id; } );
            if ( !covered )
                missing.insert( id );
        }
    return make_coverage( std::move( missing ) );
}

Coverage check_complete( const InterlevelAssignment& a, const AGRDyn& dyn )
{
    std::set<Identifier> missing;
    for ( const auto& p : dyn.properties )
    {
        bool covered = false;
        if ( p.filing == Filing::group )
        {
            auto rel = a.for_group( p.element );
            covered = std::any_of( rel.begin(), rel.end(), [&]( const InterlevelRelation* r ) { return r->consequent == p.id; } );
        }
        else if ( p.filing == Filing::organisation )
        {
            auto rel = a.for_organisation();
            covered = std::any_of( rel.begin(), rel.end(), [&]( const InterlevelRelation* r ) { return r->consequent == p.id; } );
        }
        else
            continue;
        if ( !covered )
            missing.insert( p.id );
    }
    return make_coverage( std::move( missing ) );
}

PropertyOracle::PropertyOracle( const AGRDyn& dyn, std::vector<const Trace*> traces, CheckOptions opts )
    : _dyn( dyn ), _traces( std::move( traces ) ), _opts( opts )
{
    _opts.org = &_dyn.org;
}

const Verdict& PropertyOracle::verdict( const Identifier& id )
{
    if ( auto it = _cache.find( id ); it != _cache.end() )
        return it->second;
    const auto& p = _dyn.at( id );
    return _cache.emplace( id, check_property( *p.core, _traces, _opts ) ).first->second;
}

std::vector<RelationVerdict> falsify_on_traces( const InterlevelAssignment& a, const AGRDyn& dyn, const std::vector<const Trace*>& traces,
                                                const CheckOptions& opts )
{
    std::vector<PropertyOracle> oracles;
    for ( const auto* t : traces )
        oracles.emplace_back( dyn, std::vector<const Trace*>{ t }, opts );

    std::vector<RelationVerdict> out;
    for ( const auto& r : a.relations )
    {
        RelationVerdict v{ r.id, false, {}, {} };
        for ( auto& oracle : oracles )
        {
            bool premises = std::all_of( r.antecedents.begin(), r.antecedents.end(),
                                         [&]( const Identifier& id ) { return oracle.verdict( id ).truth == Truth::holds; } );
            if ( !premises )
                continue;
            const auto& c = oracle.verdict( r.consequent );
            if ( c.truth == Truth::fails )
            {
                v.falsified = true;
                v.trace = oracle.traces().front()->id();
                v.witness = witness_text( c );
                break;
            }
        }
        out.push_back( std::move( v ) );
    }
    return out;
}

PropositionReport verify_proposition( const AGRDyn& dyn, const InterlevelAssignment& a, const Trace& trace, const CheckOptions& opts )
{
    PropositionReport rep;
    if ( auto conn = check_connected( a, dyn ); !conn.ok )
    {
        rep.reason = "assignment is not connected (missing " + conn.missing.front() + ")";
        return rep;
    }
    PropertyOracle oracle( dyn, { &trace }, opts );
    for ( const auto& p : dyn.properties )
    {
        if ( p.filing == Filing::group || p.filing == Filing::organisation )
            continue;
        auto truth = oracle.verdict( p.id ).truth;
        if ( truth != Truth::holds )
        {
            rep.reason = "leaf property '" + p.id + "' " + to_string( truth );
            return rep;
        }
    }
    for ( const auto& v : falsify_on_traces( a, dyn, { &trace }, opts ) )
        if ( v.falsified )
        {
            rep.reason = "relation '" + v.relation + "' is falsified on the trace";
            return rep;
        }
    rep.applicable = true;

    std::set<Identifier> failing;
    rep.part_a = true;
    for ( const auto& r : a.relations )
    {
        if ( r.level != RelationLevel::group )
            continue;
        if ( oracle.verdict( r.consequent ).truth != Truth::holds )
        {
            rep.part_a = false;
            failing.insert( r.consequent );
        }
    }
    rep.complete = check_complete( a, dyn ).ok;
    if ( rep.complete )
    {
        rep.part_b = true;
        for ( const auto& p : dyn.properties )
            if ( ( p.filing == Filing::group || p.filing == Filing::organisation ) && oracle.verdict( p.id ).truth != Truth::holds )
            {
                rep.part_b = false;
                failing.insert( p.id );
            }
    }
    rep.failing.assign( failing.begin(), failing.end() );
    return rep;
}

AndTree build_and_tree( const InterlevelAssignment& a, const AGRDyn& dyn )
{
    AndTree tree;
    auto touch = [&]( const Identifier& id ) -> AndTreeNode& {
        auto [it, inserted] = tree.nodes.try_emplace( id );
        if ( inserted )
        {
            it->second.id = id;
            it->second.type = type_or_filing( dyn, id );
        }
        return it->second;
    };
    std::set<Identifier> antecedent_ids;
    std::vector<Identifier> consequents;
    for ( const auto& r : a.relations )
    {
        auto& node = touch( r.consequent );
        for ( const auto& id : r.antecedents )
        {
            touch( id );
            antecedent_ids.insert( id );
            auto& children = tree.nodes.at( r.consequent ).children;
            if ( std::find( children.begin(), children.end(), id ) == children.end() )
                children.push_back( id );
        }
        (void)node;
        if ( std::find( consequents.begin(), consequents.end(), r.consequent ) == consequents.end() )
            consequents.push_back( r.consequent );
    }

    // colour-marking depth-first search for cycles
    std::map<Identifier, int> colour;
    std::function<void( const Identifier& )> visit = [&]( const Identifier& id ) {
        colour[id] = 1;
        for ( const auto& c : tree.nodes.at( id ).children )
        {
            if ( colour[c] == 1 )
                throw CycleError( "interlevel relations form a cycle through '" + id + "' and '" + c + "'" );
            if ( colour[c] == 0 )
                visit( c );
        }
        colour[id] = 2;
    };
    for ( const auto& [id, node] : tree.nodes )
        if ( colour[id] == 0 )
            visit( id );

    for ( const auto& c : consequents )
        if ( !antecedent_ids.count( c ) )
            tree.roots.push_back( c );
    return tree;
}

std::string render_tree( const AndTree& tree )
{
    std::string out;
    std::set<Identifier> expanded;
    std::function<void( const Identifier&, int )> emit = [&]( const Identifier& id, int depth ) {
        const auto& node = tree.nodes.at( id );
        out += std::string( 2 * depth, ' ' ) + id + " [" + to_string( node.type ) + "]";
        if ( !node.children.empty() && expanded.count( id ) )
        {
            out += " (see above)\n";
            return;
        }
        out += "\n";
        expanded.insert( id );
        for ( const auto& c : node.children )
            emit( c, depth + 1 );
    };
    for ( const auto& r : tree.roots )
        emit( r, 0 );
    return out;
}

std::string render_adjacency( const AndTree& tree )
{
    std::string out;
    for ( const auto& [id, node] : tree.nodes )
        for ( const auto& c : node.children )
            out += "edge " + id + " " + c + "\n";
    return out;
}

Diagnosis diagnose( const InterlevelAssignment& a, PropertyOracle& oracle, const Identifier& failing )
{
    auto tree = build_and_tree( a, oracle.dyn() );
    if ( !tree.nodes.count( failing ) )
        throw UnknownIdentifier( "interlevel node", failing );
    if ( oracle.verdict( failing ).truth != Truth::fails )
        throw PreconditionError( "property '" + failing + "' does not fail on the given traces" );

    Diagnosis d;
    d.failing = failing;
    std::set<Identifier> culprits, falsified, inconclusive, visited;
    std::function<void( const Identifier& )> descend = [&]( const Identifier& id ) {
        if ( !visited.insert( id ).second )
            return;
        const auto& node = tree.nodes.at( id );
        if ( node.children.empty() )
        {
            culprits.insert( id );
            return;
        }
        bool any_failing = false;
        bool any_unknown = false;
        for ( const auto& c : node.children )
        {
            auto truth = oracle.verdict( c ).truth;
            if ( truth == Truth::fails )
            {
                any_failing = true;
                d.path.emplace_back( id, c );
                descend( c );
            }
            else if ( truth == Truth::inconclusive )
                any_unknown = true;
        }
        if ( any_failing )
            return;
        culprits.insert( id );
        ( any_unknown ? inconclusive : falsified ).insert( id );
    };
    descend( failing );
    d.culprits.assign( culprits.begin(), culprits.end() );
    d.falsified.assign( falsified.begin(), falsified.end() );
    d.inconclusive.assign( inconclusive.begin(), inconclusive.end() );
    return d;
}

} // namespace agrkit
