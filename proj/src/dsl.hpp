#pragma once

#include "agrkit/interlevel.hpp"
#include "text_util.hpp"

#include <optional>
#include <string>
#include <vector>

namespace agrkit::detail
{

/// Token cursor over one DSL declaration. Words are identifier runs; the
/// symbols are `{ } , : <=`.
class Words
{
public:
    explicit Words( const LogicalLine& line );

    [[nodiscard]] const std::string& peek() const;
    void next();
    [[nodiscard]] bool done() const { return _pos >= _tokens.size(); }

    std::string word( const char* what );
    std::string identifier( const char* what );
    void keyword( const char* k );
    bool accept( const char* k );
    void symbol( const char* s );
    bool accept_symbol( const char* s );
    [[nodiscard]] bool at_symbol( const char* s ) const;
    void end();

    [[noreturn]] void fail( const std::string& message ) const;

private:
    struct Token
    {
        std::string text;
        int column;
        bool symbol;
    };

    int _line;
    std::vector<Token> _tokens;
    std::size_t _pos = 0;
    int _end_column;
};

/// `<head> := <body>`.
struct Definition
{
    std::string head;
    std::string body;
    int column; // 1-based column of the body in the logical line
};

Definition split_definition( const LogicalLine& line );

/// `ontology <owner> input { ... } output { ... }`; either section may be omitted.
struct OntologyDecl
{
    std::string owner;
    std::optional<Ontology> input;
    std::optional<Ontology> output;
};

OntologyDecl parse_ontology_line( const LogicalLine& line );

/// `relation <id> for group <g> : <dp> <= a, b` or `relation <id> for organisation : ...`.
InterlevelRelation parse_relation( const LogicalLine& line );

} // namespace agrkit::detail
