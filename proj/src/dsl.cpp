#include "dsl.hpp"

#include "agrkit/error.hpp"

#include <algorithm>
#include <cctype>

namespace agrkit::detail
{

namespace
{

bool word_char( char c ) { return std::isalnum( static_cast<unsigned char>( c ) ) || c == '_' || c == '.'; }

} // namespace

Words::Words( const LogicalLine& line ) : _line( line.line ), _end_column( static_cast<int>( line.text.size() ) + 1 )
{
    const auto& s = line.text;
    std::size_t i = 0;
    while ( i < s.size() )
    {
        char c = s[i];
        if ( c == ' ' || c == '\t' )
        {
            ++i;
            continue;
        }
        int col = static_cast<int>( i ) + 1;
        if ( word_char( c ) )
        {
            std::size_t j = i;
            while ( j < s.size() && word_char( s[j] ) )
                ++j;
            _tokens.push_back( { s.substr( i, j - i ), col, false } );
            i = j;
        }
        else if ( s.compare( i, 2, "<=" ) == 0 )
        {
            _tokens.push_back( { "<=", col, true } );
            i += 2;
        }
        else if ( c == '{' || c == '}' || c == ',' || c == ':' )
        {
            _tokens.push_back( { std::string( 1, c ), col, true } );
            ++i;
        }
        else
            throw ParseError( std::string( "unexpected character '" ) + c + "'", _line, col );
    }
}

const std::string& Words::peek() const
{
    static const std::string none;
    return done() ? none : _tokens[_pos].text;
}

void Words::next()
{
    if ( !done() )
        ++_pos;
}

void Words::fail( const std::string& message ) const
{
    int col = done() ? _end_column : _tokens[_pos].column;
    throw ParseError( message, _line, col );
}

std::string Words::word( const char* what )
{
    if ( done() || _tokens[_pos].symbol )
        fail( std::string( "expected " ) + what );
    return _tokens[_pos++].text;
}

std::string Words::identifier( const char* what )
{
    if ( done() || _tokens[_pos].symbol )
        fail( std::string( "expected " ) + what );
    const auto& t = _tokens[_pos].text;
    if ( t.back() == '.' || t.front() == '.' )
        fail( "'" + t + "' is not a valid identifier" );
    return _tokens[_pos++].text;
}

void Words::keyword( const char* k )
{
    if ( !accept( k ) )
        fail( std::string( "expected '" ) + k + "'" );
}

bool Words::accept( const char* k )
{
    if ( done() || _tokens[_pos].symbol || _tokens[_pos].text != k )
        return false;
    ++_pos;
    return true;
}

void Words::symbol( const char* s )
{
    if ( !accept_symbol( s ) )
        fail( std::string( "expected '" ) + s + "'" );
}

bool Words::accept_symbol( const char* s )
{
    if ( !at_symbol( s ) )
        return false;
    ++_pos;
    return true;
}

bool Words::at_symbol( const char* s ) const { return !done() && _tokens[_pos].symbol && _tokens[_pos].text == s; }

void Words::end()
{
    if ( !done() )
        fail( "unexpected '" + _tokens[_pos].text + "'" );
}

Definition split_definition( const LogicalLine& line )
{
    auto at = line.text.find( ":=" );
    if ( at == std::string::npos )
        throw ParseError( "expected ':=' followed by the property", line.line, static_cast<int>( line.text.size() ) + 1 );
    auto body_start = at + 2;
    while ( body_start < line.text.size() && line.text[body_start] == ' ' )
        ++body_start;
    return { line.text.substr( 0, at ), line.text.substr( body_start ), static_cast<int>( body_start ) + 1 };
}

namespace
{

ArgKind arg_kind( std::string_view word, int line, int col )
{
    if ( word == "sym" || word == "symbol" )
        return ArgKind::symbol;
    if ( word == "num" || word == "number" )
        return ArgKind::number;
    if ( word == "any" )
        return ArgKind::any;
    throw ParseError( "unknown argument kind '" + std::string( word ) + "' (expected sym, num or any)", line, col );
}

// One entry: `pred`, `pred/N` or `pred(kind, ...)`.
Signature signature( std::string_view text, int line, int col )
{
    Signature sig;
    auto open = text.find( '(' );
    auto slash = text.find( '/' );
    auto name_end = std::min( open, slash );
    sig.predicate = std::string( trim( text.substr( 0, name_end ) ) );
    if ( sig.predicate.empty() || !is_identifier( sig.predicate ) )
        throw ParseError( "invalid predicate in ontology entry '" + std::string( text ) + "'", line, col );
    if ( slash != std::string_view::npos && slash < open )
    {
        auto digits = trim( text.substr( slash + 1 ) );
        if ( digits.empty() || !std::all_of( digits.begin(), digits.end(), []( char c ) { return std::isdigit( static_cast<unsigned char>( c ) ); } ) )
            throw ParseError( "invalid arity in ontology entry '" + std::string( text ) + "'", line, col );
        sig.kinds.assign( std::stoul( std::string( digits ) ), ArgKind::any );
    }
    else if ( open != std::string_view::npos )
    {
        if ( text.back() != ')' )
            throw ParseError( "unterminated ontology entry '" + std::string( text ) + "'", line, col );
        auto inner = text.substr( open + 1, text.size() - open - 2 );
        std::size_t start = 0;
        while ( start <= inner.size() )
        {
            auto comma = inner.find( ',', start );
            auto piece = trim( inner.substr( start, comma == std::string_view::npos ? std::string_view::npos : comma - start ) );
            if ( !piece.empty() )
                sig.kinds.push_back( arg_kind( piece, line, col ) );
            if ( comma == std::string_view::npos )
                break;
            start = comma + 1;
        }
    }
    return sig;
}

} // namespace

OntologyDecl parse_ontology_line( const LogicalLine& line )
{
    const auto& s = line.text;
    std::size_t i = 0;
    auto fail = [&]( const std::string& msg ) -> void { throw ParseError( msg, line.line, static_cast<int>( i ) + 1 ); };
    auto skip_ws = [&] {
        while ( i < s.size() && ( s[i] == ' ' || s[i] == '\t' ) )
            ++i;
    };
    auto word = [&] {
        skip_ws();
        std::size_t j = i;
        while ( j < s.size() && word_char( s[j] ) )
            ++j;
        std::string w = s.substr( i, j - i );
        i = j;
        return w;
    };

    OntologyDecl decl;
    auto head = word();
    if ( head != "ontology" && head != "agentontology" )
        fail( "expected 'ontology'" );
    decl.owner = word();
    if ( decl.owner.empty() )
        fail( "expected the owner of the ontology" );
    while ( true )
    {
        skip_ws();
        if ( i >= s.size() )
            break;
        auto side = word();
        if ( side != "input" && side != "output" )
            fail( "expected 'input' or 'output'" );
        skip_ws();
        if ( i >= s.size() || s[i] != '{' )
            fail( "expected '{'" );
        ++i;
        Ontology onto;
        int depth = 0;
        std::size_t entry_start = i;
        auto flush = [&]( std::size_t stop ) {
            auto entry = trim( std::string_view( s ).substr( entry_start, stop - entry_start ) );
            if ( !entry.empty() )
            {
                try
                {
                    onto.add( signature( entry, line.line, static_cast<int>( entry_start ) + 1 ) );
                }
                catch ( const TypeError& e )
                {
                    throw ParseError( e.what(), line.line, static_cast<int>( entry_start ) + 1 );
                }
            }
        };
        bool closed = false;
        for ( ; i < s.size(); ++i )
        {
            char c = s[i];
            if ( c == '(' )
                ++depth;
            else if ( c == ')' )
                --depth;
            else if ( depth == 0 && ( c == ',' || c == ' ' || c == '\t' || c == '}' ) )
            {
                flush( i );
                entry_start = i + 1;
                if ( c == '}' )
                {
                    closed = true;
                    ++i;
                    break;
                }
            }
        }
        if ( !closed )
            fail( "expected '}'" );
        auto& slot = side == "input" ? decl.input : decl.output;
        if ( slot )
            slot->merge( onto );
        else
            slot = std::move( onto );
    }
    return decl;
}

InterlevelRelation parse_relation( const LogicalLine& line )
{
    Words w( line );
    w.keyword( "relation" );
    InterlevelRelation r;
    r.line = line.line;
    r.id = w.identifier( "relation id" );
    w.keyword( "for" );
    if ( w.accept( "group" ) )
    {
        r.level = RelationLevel::group;
        r.group = w.identifier( "group name" );
    }
    else if ( w.accept( "organisation" ) || w.accept( "organization" ) )
        r.level = RelationLevel::organisation;
    else
        w.fail( "expected 'group <id>' or 'organisation'" );
    w.symbol( ":" );
    r.consequent = w.identifier( "consequent property id" );
    w.symbol( "<=" );
    while ( !w.done() )
    {
        r.antecedents.push_back( w.identifier( "antecedent property id" ) );
        if ( !w.accept_symbol( "," ) )
            break;
    }
    w.end();
    return r;
}

} // namespace agrkit::detail
