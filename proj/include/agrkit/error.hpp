#pragma once

#include <stdexcept>
#include <string>

namespace agrkit
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` and `column` are 1-based; 0 means unknown.
class ParseError : public Error
{
public:
    ParseError( const std::string& message, int line = 0, int column = 0 );

    [[nodiscard]] int line() const { return _line; }
    [[nodiscard]] int column() const { return _column; }
    [[nodiscard]] const std::string& detail() const { return _detail; }

private:
    int _line;
    int _column;
    std::string _detail;
};

/// Well-formed text that disagrees with the model: arity, argument kind, sort.
class TypeError : public Error
{
public:
    using Error::Error;
};

class UnknownIdentifier : public Error
{
public:
    UnknownIdentifier( const std::string& kind, const std::string& name );

    [[nodiscard]] const std::string& name() const { return _name; }

private:
    std::string _name;
};

class CycleError : public Error
{
public:
    using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error
{
public:
    using Error::Error;
};

} // namespace agrkit
