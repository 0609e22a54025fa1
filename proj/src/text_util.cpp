#include "text_util.hpp"

#include "agrkit/error.hpp"

#include <fstream>
#include <sstream>

namespace agrkit::detail
{

std::string_view trim( std::string_view s )
{
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of( ws );
    if ( b == std::string_view::npos )
        return {};
    auto e = s.find_last_not_of( ws );
    return s.substr( b, e - b + 1 );
}

std::string_view strip_comment( std::string_view s )
{
    auto p = s.find( '#' );
    return p == std::string_view::npos ? s : s.substr( 0, p );
}

std::vector<std::string_view> split_ws( std::string_view s )
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while ( i < s.size() )
    {
        while ( i < s.size() && ( s[i] == ' ' || s[i] == '\t' || s[i] == '\r' ) )
            ++i;
        std::size_t j = i;
        while ( j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r' )
            ++j;
        if ( j > i )
            out.push_back( s.substr( i, j - i ) );
        i = j;
    }
    return out;
}

std::vector<std::string> split_lines( std::string_view text )
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while ( start <= text.size() )
    {
        auto nl = text.find( '\n', start );
        if ( nl == std::string_view::npos )
        {
            if ( start < text.size() )
                out.emplace_back( text.substr( start ) );
            break;
        }
        out.emplace_back( text.substr( start, nl - start ) );
        start = nl + 1;
    }
    return out;
}

std::vector<LogicalLine> logical_lines( std::string_view text )
{
    std::vector<LogicalLine> out;
    LogicalLine pending;
    bool continuing = false;
    auto lines = split_lines( text );
    for ( std::size_t i = 0; i < lines.size(); ++i )
    {
        auto body = trim( strip_comment( lines[i] ) );
        if ( !continuing )
            pending = { static_cast<int>( i ) + 1, {} };
        continuing = !body.empty() && body.back() == '\\';
        if ( continuing )
            body = trim( body.substr( 0, body.size() - 1 ) );
        if ( !body.empty() )
        {
            if ( !pending.text.empty() )
                pending.text += ' ';
            pending.text += body;
        }
        if ( !continuing && !pending.text.empty() )
            out.push_back( std::move( pending ) );
    }
    if ( continuing && !pending.text.empty() )
        out.push_back( std::move( pending ) );
    return out;
}

std::string read_file( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw Error( "cannot open '" + path + "'" );
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file( const std::string& path, const std::string& content )
{
    std::ofstream out( path, std::ios::binary );
    if ( !out )
        throw Error( "cannot write '" + path + "'" );
    out << content;
}

} // namespace agrkit::detail
