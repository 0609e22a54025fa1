#include "agrkit/model.hpp"

#include "agrkit/error.hpp"
#include "agrkit/ltl.hpp"
#include "dsl.hpp"
#include "text_util.hpp"

#include <algorithm>

namespace agrkit
{

namespace
{

using detail::LogicalLine;
using detail::Words;

void add_unique( std::vector<Identifier>& v, const Identifier& x )
{
    if ( std::find( v.begin(), v.end(), x ) == v.end() )
        v.push_back( x );
}

struct PendingProperty
{
    Identifier id;
    Filing filing;
    Identifier element;
    bool intragroup;
    std::string text;
    int line;
    int column; // where the property text starts
};

class ModelParser
{
public:
    Model run( std::string_view text )
    {
        for ( const auto& line : detail::logical_lines( text ) )
            declaration( line );
        for ( const auto& p : _pending )
            finish_property( p );
        return std::move( _model );
    }

private:
    Model _model;
    std::vector<PendingProperty> _pending;

    OrgStructure& org() { return _model.dyn.org; }

    void declaration( const LogicalLine& line )
    {
        // Property and ontology bodies have their own lexers, so dispatch on the
        // first word before tokenising.
        auto words = detail::split_ws( line.text );
        std::string head = words.empty() ? std::string() : std::string( words.front() );
        if ( head == "property" )
            return property( line );
        if ( head == "relation" )
        {
            _model.relations.relations.push_back( detail::parse_relation( line ) );
            return;
        }
        if ( head == "ontology" )
            return ontology( line );

        Words w( line );
        w.next();
        if ( head == "organisation" || head == "organization" )
        {
            org().name = w.identifier( "organisation name" );
            w.end();
        }
        else if ( head == "group" )
            group( w );
        else if ( head == "role" )
        {
            add_unique( org().roles, w.identifier( "role name" ) );
            w.end();
        }
        else if ( head == "transfer" || head == "interaction" )
            link( w, head == "transfer" );
        else if ( head == "task" )
        {
            _model.authority.tasks.push_back( w.identifier( "task name" ) );
            w.end();
        }
        else if ( head == "roletype" )
        {
            auto role = w.identifier( "role name" );
            auto word = w.word( "role type" );
            auto type = role_type_from_string( word );
            if ( !type )
                w.fail( "unknown role type '" + word + "' (expected line, staff or functional_authority)" );
            _model.authority.role_of_type.emplace_back( role, *type );
            w.end();
        }
        else if ( head == "superior" )
        {
            auto a = w.identifier( "role name" );
            w.keyword( "over" );
            auto b = w.identifier( "role name" );
            w.end();
            _model.authority.superior_of.insert( { a, b } );
        }
        else if ( head == "delegates" )
        {
            auto a = w.identifier( "role name" );
            w.keyword( "task" );
            auto t = w.identifier( "task name" );
            w.keyword( "to" );
            auto b = w.identifier( "role name" );
            w.end();
            _model.authority.delegates_task_to.insert( { a, t, b } );
        }
        else if ( head == "authorised" || head == "authorized" || head == "responsible" )
        {
            auto r = w.identifier( "role name" );
            w.keyword( "for" );
            auto t = w.identifier( "task name" );
            w.end();
            ( head == "responsible" ? _model.authority.responsible_for : _model.authority.authorised_for ).insert( { r, t } );
        }
        else
            w.fail( "unknown declaration '" + head + "'" );
    }

    void group( Words& w )
    {
        auto g = w.identifier( "group name" );
        org().groups.push_back( g );
        w.symbol( "{" );
        if ( w.accept( "roles" ) )
        {
            while ( !w.at_symbol( "}" ) )
            {
                auto r = w.identifier( "role name" );
                add_unique( org().roles, r );
                org().role_in.insert( { r, g } );
                if ( !w.accept_symbol( "," ) )
                    break;
            }
        }
        w.symbol( "}" );
        w.end();
    }

    void link( Words& w, bool transfer )
    {
        auto id = w.identifier( transfer ? "transfer name" : "interaction name" );
        w.keyword( "from" );
        auto src = w.identifier( "source role" );
        if ( w.at_symbol( "," ) )
            w.fail( std::string( transfer ? "transfers" : "interactions" ) + " have exactly one source and one destination" );
        w.keyword( "to" );
        auto dst = w.identifier( "destination role" );
        if ( w.at_symbol( "," ) )
            w.fail( std::string( transfer ? "transfers" : "interactions" ) + " have exactly one source and one destination" );
        w.end();
        if ( transfer )
        {
            org().transfers.push_back( id );
            org().source_of_transfer.emplace_back( src, id );
            org().destination_of_transfer.emplace_back( dst, id );
        }
        else
        {
            org().interactions.push_back( id );
            org().source_of_interaction.emplace_back( src, id );
            org().destination_of_interaction.emplace_back( dst, id );
        }
    }

    void ontology( const LogicalLine& line )
    {
        auto parsed = detail::parse_ontology_line( line );
        auto& dyn = _model.dyn;
        try
        {
            if ( parsed.input )
                dyn.input_ontologies[parsed.owner].merge( *parsed.input );
            if ( parsed.output )
                dyn.output_ontologies[parsed.owner].merge( *parsed.output );
        }
        catch ( const TypeError& e )
        {
            throw ParseError( e.what(), line.line );
        }
    }

    void property( const LogicalLine& line )
    {
        auto decl = detail::split_definition( line );
        Words w( { line.line, decl.head } );
        w.keyword( "property" );
        PendingProperty p{ w.identifier( "property id" ), Filing::organisation, {}, false, decl.body, line.line, decl.column };
        auto kind = w.word( "filing (role, transfer, group, interaction or organisation)" );
        if ( kind == "role" )
            p.filing = Filing::role;
        else if ( kind == "transfer" )
            p.filing = Filing::transfer;
        else if ( kind == "group" )
            p.filing = Filing::group;
        else if ( kind == "interaction" )
            p.filing = Filing::interaction;
        else if ( kind != "organisation" && kind != "organization" )
            w.fail( "unknown filing '" + kind + "'" );
        if ( p.filing != Filing::organisation )
            p.element = w.identifier( "element name" );
        if ( w.accept( "intragroup" ) )
        {
            if ( p.filing != Filing::group )
                w.fail( "only group properties can be tagged intragroup" );
            p.intragroup = true;
        }
        w.end();
        for ( const auto& q : _pending )
            if ( q.id == p.id )
                throw ParseError( "property '" + p.id + "' is declared twice (first on line " + std::to_string( q.line ) + ")", line.line );
        _pending.push_back( std::move( p ) );
    }

    void finish_property( const PendingProperty& p )
    {
        try
        {
            auto prop = make_property( _model.dyn, p.id, p.filing, p.element, p.text );
            prop.intragroup = p.intragroup;
            prop.line = p.line;
            _model.dyn.properties.push_back( std::move( prop ) );
        }
        catch ( const ParseError& e )
        {
            throw ParseError( "property '" + p.id + "': " + e.detail(), p.line, e.column() ? p.column + e.column() - 1 : 0 );
        }
        catch ( const TypeError& e )
        {
            throw ParseError( "property '" + p.id + "': " + e.what(), p.line );
        }
    }
};

} // namespace

DynProperty make_property( const AGRDyn& dyn, Identifier id, Filing filing, Identifier element, std::string text )
{
    const auto& org = dyn.org;
    auto resolve = [&]( const PartRef& part ) {
        if ( part.kind == PartKind::role && !org.has_role( part.name ) && org.has_group( part.name ) )
            return PartRef::group( part.name );
        return part;
    };
    DynProperty p;
    p.id = std::move( id );
    p.filing = filing;
    p.element = std::move( element );
    p.parsed = parse_property( text );
    if ( p.parsed.dialect == Dialect::ltl )
        p.parsed.ltl = map_parts( p.parsed.ltl, resolve );
    else
        p.parsed.ttl = map_parts( p.parsed.ttl, resolve );
    p.core = core_of( p.parsed );
    p.text = std::move( text );
    type_check( dyn, *p.core );
    return p;
}

Model parse_model( std::string_view text ) { return ModelParser().run( text ); }

Model load_model( const std::string& path ) { return parse_model( detail::read_file( path ) ); }

InterlevelAssignment parse_assignment( std::string_view text )
{
    InterlevelAssignment a;
    for ( const auto& line : detail::logical_lines( text ) )
        a.relations.push_back( detail::parse_relation( line ) );
    return a;
}

InterlevelAssignment load_assignment( const std::string& path ) { return parse_assignment( detail::read_file( path ) ); }

std::vector<Violation> validate_model( const Model& m )
{
    auto out = validate_structure( m.org() );
    auto more = validate_authority( m.org(), m.authority );
    out.insert( out.end(), more.begin(), more.end() );
    more = validate_dynamics( m.dyn );
    out.insert( out.end(), more.begin(), more.end() );
    if ( !m.relations.relations.empty() )
    {
        more = validate_assignment( m.relations, m.dyn );
        out.insert( out.end(), more.begin(), more.end() );
    }
    return out;
}

} // namespace agrkit
