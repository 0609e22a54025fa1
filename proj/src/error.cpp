#include "agrkit/error.hpp"

namespace agrkit
{

namespace
{

std::string located( const std::string& message, int line, int column )
{
    if ( line <= 0 )
        return message;
    std::string where = "line " + std::to_string( line );
    if ( column > 0 )
        where += ", column " + std::to_string( column );
    return where + ": " + message;
}

} // namespace

ParseError::ParseError( const std::string& message, int line, int column )
    : Error( located( message, line, column ) ), _line( line ), _column( column ), _detail( message )
{
}

UnknownIdentifier::UnknownIdentifier( const std::string& kind, const std::string& name )
    : Error( "unknown " + kind + " '" + name + "'" ), _name( name )
{
}

} // namespace agrkit
