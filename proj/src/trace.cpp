#include "agrkit/trace.hpp"

#include "agrkit/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace agrkit
{

std::string to_string( const Number& n )
{
    if ( n.denominator() == 1 )
        return std::to_string( n.numerator() );
    return std::to_string( n.numerator() ) + "/" + std::to_string( n.denominator() );
}

std::string to_string( const Value& v )
{
    if ( const auto* s = std::get_if<std::string>( &v ) )
        return *s;
    return to_string( std::get<Number>( v ) );
}

namespace
{

long long parse_integer( std::string_view text )
{
    if ( !text.empty() && text.front() == '+' )
        text.remove_prefix( 1 );
    long long value = 0;
    auto [ptr, ec] = std::from_chars( text.data(), text.data() + text.size(), value );
    if ( ec != std::errc() || ptr != text.data() + text.size() || text.empty() )
        throw ParseError( "invalid number '" + std::string( text ) + "'" );
    return value;
}

bool starts_number( std::string_view s )
{
    return !s.empty() && ( std::isdigit( static_cast<unsigned char>( s.front() ) ) || s.front() == '-' || s.front() == '+' );
}

} // namespace

Number parse_number( std::string_view text )
{
    text = detail::trim( text );
    auto slash = text.find( '/' );
    if ( slash == std::string_view::npos )
        return Number( parse_integer( text ) );
    auto num = parse_integer( text.substr( 0, slash ) );
    auto den = parse_integer( text.substr( slash + 1 ) );
    if ( den == 0 )
        throw ParseError( "zero denominator in '" + std::string( text ) + "'" );
    return Number( num, den );
}

bool Atom::operator<( const Atom& other ) const
{
    if ( predicate != other.predicate )
        return predicate < other.predicate;
    return args < other.args;
}

std::string to_string( const Atom& atom )
{
    if ( atom.args.empty() )
        return atom.predicate;
    std::string out = atom.predicate + "(";
    for ( std::size_t i = 0; i < atom.args.size(); ++i )
    {
        if ( i )
            out += ",";
        out += to_string( atom.args[i] );
    }
    return out + ")";
}

Atom parse_atom( std::string_view text )
{
    text = detail::trim( text );
    Atom atom;
    auto open = text.find( '(' );
    atom.predicate = std::string( detail::trim( text.substr( 0, open ) ) );
    if ( !is_identifier( atom.predicate ) )
        throw ParseError( "invalid predicate name in atom '" + std::string( text ) + "'" );
    if ( open == std::string_view::npos )
        return atom;
    if ( text.back() != ')' )
        throw ParseError( "missing ')' in atom '" + std::string( text ) + "'" );
    auto inner = text.substr( open + 1, text.size() - open - 2 );
    if ( detail::trim( inner ).empty() )
        throw ParseError( "empty argument list in atom '" + std::string( text ) + "'" );
    std::size_t start = 0;
    while ( true )
    {
        auto comma = inner.find( ',', start );
        auto arg = detail::trim( inner.substr( start, comma == std::string_view::npos ? std::string_view::npos : comma - start ) );
        if ( arg.empty() )
            throw ParseError( "empty argument in atom '" + std::string( text ) + "'" );
        if ( starts_number( arg ) )
            atom.args.emplace_back( parse_number( arg ) );
        else if ( is_identifier( std::string( arg ) ) )
            atom.args.emplace_back( std::string( arg ) );
        else
            throw ParseError( "invalid argument '" + std::string( arg ) + "'" );
        if ( comma == std::string_view::npos )
            break;
        start = comma + 1;
    }
    return atom;
}

bool Signature::accepts( const Atom& atom ) const
{
    if ( atom.predicate != predicate || atom.args.size() != kinds.size() )
        return false;
    for ( std::size_t i = 0; i < kinds.size(); ++i )
    {
        bool is_num = std::holds_alternative<Number>( atom.args[i] );
        if ( ( kinds[i] == ArgKind::number && !is_num ) || ( kinds[i] == ArgKind::symbol && is_num ) )
            return false;
    }
    return true;
}

std::string to_string( const Signature& sig )
{
    bool untyped = std::all_of( sig.kinds.begin(), sig.kinds.end(), []( ArgKind k ) { return k == ArgKind::any; } );
    if ( untyped )
        return sig.predicate + "/" + std::to_string( sig.arity() );
    std::string out = sig.predicate + "(";
    for ( std::size_t i = 0; i < sig.kinds.size(); ++i )
    {
        if ( i )
            out += ",";
        out += sig.kinds[i] == ArgKind::number ? "num" : sig.kinds[i] == ArgKind::symbol ? "sym" : "any";
    }
    return out + ")";
}

void Ontology::add( const Signature& sig )
{
    auto [it, fresh] = signatures.emplace( sig.predicate, sig );
    if ( !fresh && !( it->second == sig ) )
        throw TypeError( "predicate '" + sig.predicate + "' declared as both " + to_string( it->second ) + " and " + to_string( sig ) );
}

const Signature* Ontology::find( const std::string& predicate ) const
{
    auto it = signatures.find( predicate );
    return it == signatures.end() ? nullptr : &it->second;
}

std::vector<Signature> Ontology::missing_from( const Ontology& other ) const
{
    std::vector<Signature> out;
    for ( const auto& [name, sig] : other.signatures )
    {
        const auto* mine = find( name );
        if ( !mine || !( *mine == sig ) )
            out.push_back( sig );
    }
    return out;
}

void Ontology::merge( const Ontology& other )
{
    for ( const auto& [_, sig] : other.signatures )
        signatures.emplace( sig.predicate, sig );
}

std::string to_string( const AtomicPart& part )
{
    return ( part.direction == Direction::input ? "input(" : "output(" ) + part.role + ")";
}

AtomicPart PartRef::atomic() const
{
    if ( !is_atomic() )
        throw PreconditionError( "part " + to_string( *this ) + " is not atomic" );
    return { kind == PartKind::input ? Direction::input : Direction::output, name };
}

bool PartRef::operator<( const PartRef& other ) const
{
    if ( kind != other.kind )
        return kind < other.kind;
    if ( name != other.name )
        return name < other.name;
    return alias_members < other.alias_members;
}

std::string to_string( const PartRef& part )
{
    switch ( part.kind )
    {
    case PartKind::input: return "input(" + part.name + ")";
    case PartKind::output: return "output(" + part.name + ")";
    case PartKind::role: return "role(" + part.name + ")";
    case PartKind::group: return "group(" + part.name + ")";
    case PartKind::organisation: return "organisation";
    }
    return "?";
}

PartRef parse_part( std::string_view text )
{
    text = detail::trim( text );
    if ( text == "organisation" || text == "organization" )
        return PartRef::organisation();
    auto open = text.find( '(' );
    if ( open == std::string_view::npos || text.back() != ')' )
        throw ParseError( "invalid part '" + std::string( text ) + "'" );
    auto kind = detail::trim( text.substr( 0, open ) );
    std::string name( detail::trim( text.substr( open + 1, text.size() - open - 2 ) ) );
    if ( !is_identifier( name ) )
        throw ParseError( "invalid name in part '" + std::string( text ) + "'" );
    if ( kind == "input" )
        return PartRef::input( name );
    if ( kind == "output" )
        return PartRef::output( name );
    if ( kind == "role" )
        return PartRef::role( name );
    if ( kind == "group" )
        return PartRef::group( name );
    throw ParseError( "unknown part kind '" + std::string( kind ) + "'" );
}

std::vector<AtomicPart> expand_part( const PartRef& part, const OrgStructure* org )
{
    if ( !part.alias_members.empty() )
        return part.alias_members;
    auto need_role = [&]( const Identifier& r ) {
        if ( org && !org->has_role( r ) )
            throw UnknownIdentifier( "role", r );
    };
    std::vector<AtomicPart> out;
    switch ( part.kind )
    {
    case PartKind::input:
    case PartKind::output:
        need_role( part.name );
        out.push_back( part.atomic() );
        break;
    case PartKind::role:
        need_role( part.name );
        out.push_back( { Direction::input, part.name } );
        out.push_back( { Direction::output, part.name } );
        break;
    case PartKind::group:
        if ( !org )
            throw PreconditionError( "group part " + to_string( part ) + " needs an organisation structure" );
        if ( !org->has_group( part.name ) )
            throw UnknownIdentifier( "group", part.name );
        for ( const auto& r : org->roles_of( part.name ) )
        {
            out.push_back( { Direction::input, r } );
            out.push_back( { Direction::output, r } );
        }
        break;
    case PartKind::organisation:
        if ( !org )
            throw PreconditionError( "organisation part needs an organisation structure" );
        {
            std::set<Identifier> roles( org->roles.begin(), org->roles.end() );
            for ( const auto& r : roles )
            {
                out.push_back( { Direction::input, r } );
                out.push_back( { Direction::output, r } );
            }
        }
        break;
    }
    return out;
}

State::State( std::initializer_list<Atom> atoms )
{
    for ( const auto& a : atoms )
        insert( a );
}

bool State::contains( const Atom& atom ) const
{
    return std::binary_search( _atoms.begin(), _atoms.end(), atom );
}

bool State::insert( Atom atom )
{
    auto it = std::lower_bound( _atoms.begin(), _atoms.end(), atom );
    if ( it != _atoms.end() && *it == atom )
        return false;
    _atoms.insert( it, std::move( atom ) );
    return true;
}

void State::merge( const State& other )
{
    for ( const auto& a : other )
        insert( a );
}

Trace::Trace( std::string id, int horizon ) : _id( std::move( id ) ), _horizon( horizon )
{
    if ( horizon < 0 )
        throw PreconditionError( "trace horizon must be non-negative" );
}

void Trace::insert( int t, const AtomicPart& part, Atom atom )
{
    if ( t < 0 || t > _horizon )
        throw PreconditionError( "time " + std::to_string( t ) + " outside 0.." + std::to_string( _horizon ) );
    auto& column = _columns[part];
    if ( column.empty() )
        column.resize( static_cast<std::size_t>( _horizon ) + 1 );
    column[static_cast<std::size_t>( t )].insert( std::move( atom ) );
}

const State& Trace::at( int t, const AtomicPart& part ) const
{
    static const State empty;
    if ( t < 0 || t > _horizon )
        throw PreconditionError( "time " + std::to_string( t ) + " outside 0.." + std::to_string( _horizon ) );
    const auto* c = column( part );
    return c ? ( *c )[static_cast<std::size_t>( t )] : empty;
}

const Trace::Column* Trace::column( const AtomicPart& part ) const
{
    auto it = _columns.find( part );
    return it == _columns.end() ? nullptr : &it->second;
}

Trace Trace::extended( int horizon ) const
{
    if ( horizon < _horizon )
        throw PreconditionError( "cannot shrink a trace by extension" );
    Trace out = *this;
    out._horizon = horizon;
    for ( auto& [_, column] : out._columns )
        column.resize( static_cast<std::size_t>( horizon ) + 1 );
    return out;
}

std::size_t Trace::atom_count() const
{
    std::size_t n = 0;
    for ( const auto& [_, column] : _columns )
        for ( const auto& s : column )
            n += s.size();
    return n;
}

State state_at( const Trace& trace, int t, const PartRef& part, const OrgStructure* org )
{
    if ( t < 0 || t > trace.horizon() )
        throw PreconditionError( "time " + std::to_string( t ) + " outside 0.." + std::to_string( trace.horizon() ) );
    State out;
    for ( const auto& p : expand_part( part, org ) )
        out.merge( trace.at( t, p ) );
    return out;
}

void TraceSchema::check( const AtomicPart& part, const Atom& atom ) const
{
    if ( org && !org->has_role( part.role ) )
        throw UnknownIdentifier( "role", part.role );
    const auto* table = part.direction == Direction::input ? input_ontologies : output_ontologies;
    if ( !table )
        return;
    auto it = table->find( part.role );
    if ( it == table->end() )
        return;
    const auto* sig = it->second.find( atom.predicate );
    if ( !sig )
        throw UnknownIdentifier( "predicate at " + to_string( part ), atom.predicate );
    if ( !sig->accepts( atom ) )
        throw TypeError( "atom " + to_string( atom ) + " does not match signature " + to_string( *sig ) );
}

TimedAtom parse_timed_atom( std::string_view line, int line_no )
{
    auto body = detail::trim( line );
    auto sp1 = body.find_first_of( " \t" );
    if ( sp1 == std::string_view::npos )
        throw ParseError( "expected '<t> <part> <atom>'", line_no );
    auto rest = detail::trim( body.substr( sp1 ) );
    auto sp2 = rest.find_first_of( " \t" );
    if ( sp2 == std::string_view::npos )
        throw ParseError( "expected '<t> <part> <atom>'", line_no );
    TimedAtom out;
    try
    {
        auto t = parse_number( body.substr( 0, sp1 ) );
        if ( t.denominator() != 1 || t.numerator() < 0 )
            throw ParseError( "time must be a non-negative integer" );
        out.time = static_cast<int>( t.numerator() );
        auto part = parse_part( rest.substr( 0, sp2 ) );
        if ( !part.is_atomic() )
            throw ParseError( "only input(<role>) and output(<role>) parts carry state" );
        out.part = part.atomic();
        out.atom = parse_atom( rest.substr( sp2 ) );
    }
    catch ( const ParseError& e )
    {
        throw ParseError( e.detail(), line_no );
    }
    return out;
}

Trace read_trace( std::string_view text, const TraceSchema& schema )
{
    auto lines = detail::split_lines( text );
    std::optional<Trace> trace;
    for ( std::size_t i = 0; i < lines.size(); ++i )
    {
        int line_no = static_cast<int>( i ) + 1;
        auto line = detail::trim( detail::strip_comment( lines[i] ) );
        if ( line.empty() )
            continue;
        if ( !trace )
        {
            auto words = detail::split_ws( line );
            if ( words.size() != 4 || words[0] != "trace" || words[2] != "horizon" )
                throw ParseError( "expected header 'trace <id> horizon <T>'", line_no );
            if ( !is_identifier( std::string( words[1] ) ) )
                throw ParseError( "invalid trace id '" + std::string( words[1] ) + "'", line_no );
            Number h;
            try
            {
                h = parse_number( words[3] );
            }
            catch ( const ParseError& )
            {
                throw ParseError( "invalid horizon", line_no );
            }
            if ( h.denominator() != 1 || h.numerator() < 0 )
                throw ParseError( "horizon must be a non-negative integer", line_no );
            trace.emplace( std::string( words[1] ), static_cast<int>( h.numerator() ) );
            continue;
        }
        auto item = parse_timed_atom( line, line_no );
        if ( item.time > trace->horizon() )
            throw ParseError( "time " + std::to_string( item.time ) + " beyond horizon", line_no );
        try
        {
            schema.check( item.part, item.atom );
        }
        catch ( const Error& e )
        {
            throw ParseError( e.what(), line_no );
        }
        trace->insert( item.time, item.part, std::move( item.atom ) );
    }
    if ( !trace )
        throw ParseError( "missing trace header", 1 );
    return *trace;
}

std::string write_trace( const Trace& trace )
{
    std::ostringstream out;
    out << "trace " << trace.id() << " horizon " << trace.horizon() << "\n";
    for ( int t = 0; t <= trace.horizon(); ++t )
        for ( const auto& [part, column] : trace.columns() )
            for ( const auto& atom : column[static_cast<std::size_t>( t )] )
                out << t << " " << to_string( part ) << " " << to_string( atom ) << "\n";
    return out.str();
}

Trace load_trace( const std::string& path, const TraceSchema& schema )
{
    auto text = detail::read_file( path );
    try
    {
        return read_trace( text, schema );
    }
    catch ( const ParseError& e )
    {
        throw ParseError( path + ": " + e.detail(), e.line(), e.column() );
    }
}

void save_trace( const Trace& trace, const std::string& path )
{
    detail::write_file( path, write_trace( trace ) );
}

} // namespace agrkit
