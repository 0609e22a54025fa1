#include "agrkit/property_parser.hpp"

#include "agrkit/error.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace agrkit
{

namespace
{

struct Token
{
    enum class Kind
    {
        ident,
        number,
        symbol,
        end
    };

    Kind kind = Kind::end;
    std::string text;
    std::size_t pos = 0; // byte offset
};

// Multi-byte spellings accepted for the ASCII operators.
struct Alias
{
    std::string_view utf8;
    std::string_view ascii;
};

constexpr Alias unicode_aliases[] = {
    { "∧", "&" },  { "∨", "|" },  { "¬", "!" },  { "⇒", "=>" },     { "→", "=>" },
    { "≤", "<=" }, { "≥", ">=" }, { "≠", "!=" }, { "∀", "forall" }, { "∃", "exists" }, { "⊨", "|=" },
};

bool ident_char( char c )
{
    return std::isalnum( static_cast<unsigned char>( c ) ) || c == '_';
}

std::vector<Token> lex( std::string_view text, std::size_t base )
{
    std::vector<Token> out;
    std::size_t i = 0;
    while ( i < text.size() )
    {
        char c = text[i];
        if ( std::isspace( static_cast<unsigned char>( c ) ) )
        {
            ++i;
            continue;
        }
        bool matched = false;
        for ( const auto& a : unicode_aliases )
            if ( text.substr( i, a.utf8.size() ) == a.utf8 )
            {
                Token::Kind k = ( a.ascii == "forall" || a.ascii == "exists" ) ? Token::Kind::ident : Token::Kind::symbol;
                out.push_back( { k, std::string( a.ascii ), i } );
                i += a.utf8.size();
                matched = true;
                break;
            }
        if ( matched )
            continue;
        if ( std::isdigit( static_cast<unsigned char>( c ) ) )
        {
            std::size_t j = i;
            while ( j < text.size() && std::isdigit( static_cast<unsigned char>( text[j] ) ) )
                ++j;
            if ( j + 1 < text.size() && text[j] == '/' && std::isdigit( static_cast<unsigned char>( text[j + 1] ) ) )
            {
                ++j;
                while ( j < text.size() && std::isdigit( static_cast<unsigned char>( text[j] ) ) )
                    ++j;
            }
            out.push_back( { Token::Kind::number, std::string( text.substr( i, j - i ) ), i } );
            i = j;
            continue;
        }
        if ( ident_char( c ) )
        {
            std::size_t j = i;
            // dots are allowed inside identifiers, never at their end
            while ( j < text.size() && ( ident_char( text[j] ) || ( text[j] == '.' && j + 1 < text.size() && ident_char( text[j + 1] ) ) ) )
                ++j;
            out.push_back( { Token::Kind::ident, std::string( text.substr( i, j - i ) ), i } );
            i = j;
            continue;
        }
        static const std::string_view two[] = { "=>", "->", "<=", ">=", "!=", "==", "|=" };
        std::string_view sym;
        for ( auto s : two )
            if ( text.substr( i, 2 ) == s )
                sym = s;
        if ( sym.empty() )
        {
            static const std::string_view one = "()[],.:&|!+-<>=";
            if ( one.find( c ) == std::string_view::npos )
                throw ParseError( std::string( "unexpected character '" ) + c + "'", 1, static_cast<int>( base + i ) + 1 );
            sym = text.substr( i, 1 );
        }
        std::string norm( sym );
        if ( norm == "->" )
            norm = "=>";
        if ( norm == "==" )
            norm = "=";
        out.push_back( { Token::Kind::symbol, norm, i } );
        i += sym.size();
    }
    out.push_back( { Token::Kind::end, "", text.size() } );
    return out;
}

struct Binder
{
    std::string name;
    Sort sort;
};

class Parser
{
public:
    explicit Parser( std::string_view text, std::size_t base = 0 ) : _tokens( lex( text, base ) ), _base( base ) {}

    FormulaPtr parse_ttl_all()
    {
        auto f = formula();
        expect_end();
        return f;
    }

    LtlPtr parse_ltl_all()
    {
        auto f = ltl();
        expect_end();
        return f;
    }

    StatePropPtr parse_state_all()
    {
        auto p = state_prop();
        expect_end();
        return p;
    }

private:
    std::vector<Token> _tokens;
    std::size_t _pos = 0;
    std::size_t _base;
    std::vector<Binder> _scope;

    // --- token helpers ---------------------------------------------------

    const Token& peek( std::size_t ahead = 0 ) const
    {
        auto idx = std::min( _pos + ahead, _tokens.size() - 1 );
        return _tokens[idx];
    }

    [[noreturn]] void fail( const std::string& message, const Token& at ) const
    {
        std::string where = at.kind == Token::Kind::end ? " at end of input" : " at '" + at.text + "'";
        throw ParseError( message + where, 1, static_cast<int>( _base + at.pos ) + 1 );
    }

    bool is_symbol( std::string_view s, std::size_t ahead = 0 ) const
    {
        const auto& t = peek( ahead );
        return t.kind == Token::Kind::symbol && t.text == s;
    }

    bool is_word( std::string_view s, std::size_t ahead = 0 ) const
    {
        const auto& t = peek( ahead );
        return t.kind == Token::Kind::ident && t.text == s;
    }

    bool accept_symbol( std::string_view s )
    {
        if ( !is_symbol( s ) )
            return false;
        ++_pos;
        return true;
    }

    bool accept_word( std::string_view s )
    {
        if ( !is_word( s ) )
            return false;
        ++_pos;
        return true;
    }

    void expect_symbol( std::string_view s )
    {
        if ( !accept_symbol( s ) )
            fail( "expected '" + std::string( s ) + "'", peek() );
    }

    std::string expect_ident( const char* what )
    {
        if ( peek().kind != Token::Kind::ident )
            fail( std::string( "expected " ) + what, peek() );
        return _tokens[_pos++].text;
    }

    long expect_integer()
    {
        const auto& t = peek();
        if ( t.kind != Token::Kind::number || t.text.find( '/' ) != std::string::npos )
            fail( "expected integer", t );
        long v = 0;
        std::from_chars( t.text.data(), t.text.data() + t.text.size(), v );
        ++_pos;
        return v;
    }

    void expect_end()
    {
        if ( peek().kind != Token::Kind::end )
            fail( "unexpected trailing input", peek() );
    }

    const Binder* lookup( const std::string& name ) const
    {
        for ( auto it = _scope.rbegin(); it != _scope.rend(); ++it )
            if ( it->name == name )
                return &*it;
        return nullptr;
    }

    static bool is_keyword( const std::string& s )
    {
        static const std::set<std::string> words = { "forall", "exists", "in", "holds", "state", "true", "false", "and", "or", "not", "end" };
        return words.count( s ) > 0;
    }

    // --- core formulas ---------------------------------------------------

    FormulaPtr formula() { return implication(); }

    FormulaPtr implication()
    {
        auto lhs = disjunction();
        if ( accept_symbol( "=>" ) )
            return make::implies( lhs, implication() );
        return lhs;
    }

    FormulaPtr disjunction()
    {
        auto lhs = conjunction();
        while ( accept_symbol( "|" ) || accept_word( "or" ) )
            lhs = make::disj( lhs, conjunction() );
        return lhs;
    }

    FormulaPtr conjunction()
    {
        auto lhs = unary();
        while ( accept_symbol( "&" ) || accept_word( "and" ) )
            lhs = make::conj( lhs, unary() );
        return lhs;
    }

    FormulaPtr unary()
    {
        if ( accept_symbol( "!" ) || accept_word( "not" ) )
            return make::negation( unary() );
        if ( is_word( "forall" ) || is_word( "exists" ) )
            return quantifier();
        return primary();
    }

    FormulaPtr quantifier()
    {
        bool universal = peek().text == "forall";
        ++_pos;
        std::vector<std::string> vars;
        do
        {
            auto at = peek();
            auto v = expect_ident( "variable name" );
            if ( is_keyword( v ) )
                fail( "keyword used as variable", at );
            vars.push_back( v );
        } while ( accept_symbol( "," ) );

        Sort sort = Sort::time;
        if ( accept_symbol( ":" ) )
        {
            auto at = peek();
            auto s = expect_ident( "sort" );
            if ( s == "time" )
                sort = Sort::time;
            else if ( s == "num" || s == "number" )
                sort = Sort::number;
            else if ( s == "trace" )
                sort = Sort::trace;
            else
                fail( "unknown sort", at );
        }

        std::optional<TimeTerm> lower, upper;
        if ( accept_word( "in" ) )
        {
            if ( sort != Sort::time )
                fail( "interval bounds only apply to time variables", peek() );
            expect_symbol( "[" );
            lower = time_term();
            expect_symbol( "," );
            upper = time_term();
            expect_symbol( "]" );
        }
        expect_symbol( "." );

        for ( const auto& v : vars )
            _scope.push_back( { v, sort } );
        auto body = formula();
        _scope.resize( _scope.size() - vars.size() );

        for ( auto it = vars.rbegin(); it != vars.rend(); ++it )
            body = make::quantifier( universal, sort, *it, body, lower, upper );
        return body;
    }

    FormulaPtr primary()
    {
        if ( accept_symbol( "(" ) )
        {
            auto f = formula();
            expect_symbol( ")" );
            return f;
        }
        if ( accept_word( "true" ) )
            return make::constant( true );
        if ( accept_word( "false" ) )
            return make::constant( false );
        if ( ( is_word( "holds" ) || is_word( "state" ) ) && is_symbol( "(", 1 ) )
            return holds();
        if ( peek().kind == Token::Kind::end )
            fail( "expected formula", peek() );
        return comparison();
    }

    FormulaPtr holds()
    {
        _pos += 2;
        std::string trace_var;
        if ( peek().kind == Token::Kind::ident && is_symbol( ",", 1 ) )
        {
            const auto* b = lookup( peek().text );
            if ( b && b->sort == Sort::trace )
            {
                trace_var = peek().text;
                _pos += 2;
            }
        }
        auto t = time_term();
        expect_symbol( "," );
        auto part = part_ref();
        // state(t, part) |= prop binds the property as tightly as a negation
        if ( accept_symbol( ")" ) )
        {
            expect_symbol( "|=" );
            return make::holds( t, part, state_unary(), trace_var );
        }
        expect_symbol( "," );
        auto s = state_prop();
        expect_symbol( ")" );
        return make::holds( t, part, s, trace_var );
    }

    PartRef part_ref()
    {
        auto at = peek();
        auto word = expect_ident( "part" );
        if ( word == "organisation" || word == "organization" )
            return PartRef::organisation();
        if ( ( word == "input" || word == "output" || word == "role" || word == "group" ) && accept_symbol( "(" ) )
        {
            auto name = expect_ident( "name" );
            expect_symbol( ")" );
            if ( word == "input" )
                return PartRef::input( name );
            if ( word == "output" )
                return PartRef::output( name );
            if ( word == "group" )
                return PartRef::group( name );
            return PartRef::role( name );
        }
        if ( is_keyword( word ) )
            fail( "expected part", at );
        if ( const auto* b = lookup( word ) )
            fail( "variable '" + word + "' of sort " + to_string( b->sort ) + " used as a part", at );
        // bare name: a role, possibly resolved to a group against the model later
        return PartRef::role( word );
    }

    TimeTerm time_term()
    {
        auto at = peek();
        TimeTerm term;
        if ( at.kind == Token::Kind::number )
        {
            term = TimeTerm::constant( expect_integer() );
        }
        else if ( at.kind == Token::Kind::ident )
        {
            ++_pos;
            if ( at.text == "end" )
                term = TimeTerm::end();
            else
            {
                const auto* b = lookup( at.text );
                if ( !b )
                    fail( "unbound time variable", at );
                if ( b->sort != Sort::time )
                    fail( std::string( "variable of sort " ) + to_string( b->sort ) + " used as a time", at );
                term = TimeTerm::variable( at.text );
            }
        }
        else if ( accept_symbol( "-" ) )
        {
            return TimeTerm::constant( -expect_integer() );
        }
        else
            fail( "expected time term", at );

        while ( is_symbol( "+" ) || is_symbol( "-" ) )
        {
            bool plus = peek().text == "+";
            ++_pos;
            long c = expect_integer();
            term.offset += plus ? c : -c;
        }
        return term;
    }

    // An operand of a comparison before its sort is known.
    struct Operand
    {
        Token at;
        std::optional<Sort> sort; // empty for literals
        std::string var;
        Number literal;
        long offset = 0;
        bool is_end = false;
    };

    Operand operand()
    {
        Operand o;
        o.at = peek();
        bool negative = accept_symbol( "-" );
        if ( peek().kind == Token::Kind::number )
        {
            o.literal = parse_number( peek().text );
            if ( negative )
                o.literal = -o.literal;
            ++_pos;
            return o;
        }
        if ( negative )
            fail( "expected number", peek() );
        if ( peek().kind != Token::Kind::ident )
            fail( "expected formula", peek() );
        auto name = peek().text;
        ++_pos;
        if ( name == "end" )
        {
            o.is_end = true;
            o.sort = Sort::time;
        }
        else
        {
            const auto* b = lookup( name );
            if ( !b )
                fail( "unbound variable", o.at );
            if ( b->sort == Sort::trace )
                fail( "trace variables cannot be compared", o.at );
            o.sort = b->sort;
            o.var = name;
        }
        if ( o.sort == Sort::time )
            while ( is_symbol( "+" ) || is_symbol( "-" ) )
            {
                bool plus = peek().text == "+";
                ++_pos;
                long c = expect_integer();
                o.offset += plus ? c : -c;
            }
        return o;
    }

    std::optional<CmpOp> cmp_op()
    {
        static const std::pair<std::string_view, CmpOp> ops[] = { { "<=", CmpOp::le }, { "<", CmpOp::lt }, { ">=", CmpOp::ge },
                                                                  { ">", CmpOp::gt },  { "=", CmpOp::eq }, { "!=", CmpOp::ne } };
        for ( const auto& [s, op] : ops )
            if ( accept_symbol( s ) )
                return op;
        return std::nullopt;
    }

    TimeTerm as_time( const Operand& o ) const
    {
        if ( o.is_end )
            return TimeTerm::end( o.offset );
        if ( o.sort )
            return TimeTerm::variable( o.var, o.offset );
        if ( o.literal.denominator() != 1 )
            fail( "time constants must be integers", o.at );
        return TimeTerm::constant( static_cast<long>( o.literal.numerator() ) );
    }

    static NumTerm as_num( const Operand& o )
    {
        NumTerm n;
        n.is_var = o.sort.has_value();
        n.var = o.var;
        n.value = o.literal;
        return n;
    }

    FormulaPtr comparison()
    {
        auto lhs = operand();
        auto op = cmp_op();
        if ( !op )
            fail( "expected comparison operator", peek() );
        auto rhs = operand();
        std::optional<Sort> sort = lhs.sort ? lhs.sort : rhs.sort;
        if ( lhs.sort && rhs.sort && *lhs.sort != *rhs.sort )
            fail( "comparison mixes time and number", rhs.at );
        if ( !sort )
            sort = ( lhs.literal.denominator() == 1 && rhs.literal.denominator() == 1 ) ? Sort::time : Sort::number;
        if ( *sort == Sort::time )
            return make::time_cmp( as_time( lhs ), *op, as_time( rhs ) );
        if ( lhs.offset || rhs.offset )
            fail( "offsets only apply to time terms", lhs.at );
        return make::num_cmp( as_num( lhs ), *op, as_num( rhs ) );
    }

    // --- state properties ------------------------------------------------

    StatePropPtr state_prop()
    {
        auto lhs = state_or();
        if ( accept_symbol( "=>" ) )
            return StateProp::make_binary( StateProp::Op::implication, lhs, state_prop() );
        return lhs;
    }

    StatePropPtr state_or()
    {
        auto lhs = state_and();
        while ( accept_symbol( "|" ) || accept_word( "or" ) )
            lhs = StateProp::make_binary( StateProp::Op::disjunction, lhs, state_and() );
        return lhs;
    }

    StatePropPtr state_and()
    {
        auto lhs = state_unary();
        while ( accept_symbol( "&" ) || accept_word( "and" ) )
            lhs = StateProp::make_binary( StateProp::Op::conjunction, lhs, state_unary() );
        return lhs;
    }

    StatePropPtr state_unary()
    {
        if ( accept_symbol( "!" ) || accept_word( "not" ) )
            return StateProp::make_not( state_unary() );
        if ( accept_symbol( "(" ) )
        {
            auto p = state_prop();
            expect_symbol( ")" );
            return p;
        }
        if ( accept_word( "true" ) )
            return StateProp::make_constant( true );
        if ( accept_word( "false" ) )
            return StateProp::make_constant( false );
        return StateProp::make_atom( atom_pattern() );
    }

    AtomPattern atom_pattern()
    {
        auto at = peek();
        auto pred = expect_ident( "atom" );
        if ( is_keyword( pred ) )
            fail( "expected atom", at );
        std::vector<AtomArg> args;
        if ( accept_symbol( "(" ) )
        {
            do
                args.push_back( atom_arg() );
            while ( accept_symbol( "," ) );
            expect_symbol( ")" );
        }
        return make_pattern( pred, std::move( args ) );
    }

    AtomArg atom_arg()
    {
        AtomArg a;
        auto at = peek();
        bool negative = accept_symbol( "-" );
        if ( peek().kind == Token::Kind::number )
        {
            a.kind = AtomArg::Kind::number;
            a.number = parse_number( peek().text );
            if ( negative )
                a.number = -a.number;
            ++_pos;
            return a;
        }
        if ( negative )
            fail( "expected number", peek() );
        a.name = expect_ident( "atom argument" );
        if ( const auto* b = lookup( a.name ) )
        {
            if ( b->sort != Sort::number )
                fail( std::string( "variable of sort " ) + to_string( b->sort ) + " used as an atom argument", at );
            a.kind = AtomArg::Kind::variable;
        }
        return a;
    }

    // --- LTL surface -----------------------------------------------------

    LtlPtr ltl_binary( LtlFormula::Op op, LtlPtr l, LtlPtr r )
    {
        auto f = std::make_shared<LtlFormula>();
        f->op = op;
        f->lhs = std::move( l );
        f->rhs = std::move( r );
        return f;
    }

    LtlPtr ltl()
    {
        auto lhs = ltl_or();
        if ( accept_symbol( "=>" ) )
            return ltl_binary( LtlFormula::Op::implication, lhs, ltl() );
        return lhs;
    }

    LtlPtr ltl_or()
    {
        auto lhs = ltl_and();
        while ( accept_symbol( "|" ) || accept_word( "or" ) )
            lhs = ltl_binary( LtlFormula::Op::disjunction, lhs, ltl_and() );
        return lhs;
    }

    LtlPtr ltl_and()
    {
        auto lhs = ltl_unary();
        while ( accept_symbol( "&" ) || accept_word( "and" ) )
            lhs = ltl_binary( LtlFormula::Op::conjunction, lhs, ltl_unary() );
        return lhs;
    }

    LtlPtr ltl_unary()
    {
        if ( accept_symbol( "!" ) || accept_word( "not" ) )
            return ltl_binary( LtlFormula::Op::negation, ltl_unary(), nullptr );
        if ( accept_symbol( "(" ) )
        {
            auto f = ltl();
            expect_symbol( ")" );
            return f;
        }
        if ( is_word( "true" ) || is_word( "false" ) )
        {
            auto f = std::make_shared<LtlFormula>();
            f->op = LtlFormula::Op::constant;
            f->value = peek().text == "true";
            ++_pos;
            return f;
        }
        return modal();
    }

    LtlPtr modal()
    {
        auto at = peek();
        if ( at.kind != Token::Kind::ident )
            fail( "expected modal operator", at );
        static const std::string_view letters = "CXFGPH";
        auto word = at.text;
        if ( letters.find( word.front() ) == std::string_view::npos )
            fail( "expected modal operator (C, X, F, G, P, H)", at );
        ++_pos;

        auto f = std::make_shared<LtlFormula>();
        f->op = LtlFormula::Op::modal;
        f->modal = static_cast<Modal>( letters.find( word.front() ) );

        if ( word.size() > 1 )
        {
            // `F10` means exactly 10 steps ahead
            auto digits = std::string_view( word ).substr( 1 );
            long c = 0;
            auto [ptr, ec] = std::from_chars( digits.data(), digits.data() + digits.size(), c );
            if ( ec != std::errc() || ptr != digits.data() + digits.size() )
                fail( "expected modal operator (C, X, F, G, P, H)", at );
            f->constraint = { TimeConstraint::Kind::exactly, c };
        }
        else if ( accept_symbol( "<=" ) )
            f->constraint = { TimeConstraint::Kind::less_equal, expect_integer() };
        else if ( accept_symbol( "<" ) )
            f->constraint = { TimeConstraint::Kind::less, expect_integer() };
        else if ( accept_symbol( "=" ) )
            f->constraint = { TimeConstraint::Kind::exactly, expect_integer() };
        else if ( peek().kind == Token::Kind::number )
            f->constraint = { TimeConstraint::Kind::exactly, expect_integer() };

        if ( f->constraint.kind != TimeConstraint::Kind::none && ( f->modal == Modal::C || f->modal == Modal::X ) )
            fail( "C and X take no time constraint", at );
        if ( f->constraint.kind == TimeConstraint::Kind::less && f->constraint.bound < 1 )
            fail( "'<' constraint needs a positive bound", at );

        expect_symbol( "[" );
        f->part = part_ref();
        expect_symbol( "]" );
        expect_symbol( "(" );
        f->state = state_prop();
        expect_symbol( ")" );
        return f;
    }
};

} // namespace

ParsedProperty parse_property( std::string_view text )
{
    std::size_t i = 0;
    while ( i < text.size() && std::isspace( static_cast<unsigned char>( text[i] ) ) )
        ++i;
    auto rest = text.substr( i );
    ParsedProperty out;
    if ( rest.substr( 0, 4 ) == "ttl:" )
    {
        out.dialect = Dialect::ttl;
        out.ttl = Parser( rest.substr( 4 ), i + 4 ).parse_ttl_all();
    }
    else if ( rest.substr( 0, 4 ) == "ltl:" )
    {
        out.dialect = Dialect::ltl;
        out.ltl = Parser( rest.substr( 4 ), i + 4 ).parse_ltl_all();
    }
    else
        throw ParseError( "property must start with 'ttl:' or 'ltl:'", 1, static_cast<int>( i ) + 1 );
    return out;
}

FormulaPtr parse_ttl( std::string_view text ) { return Parser( text ).parse_ttl_all(); }

LtlPtr parse_ltl( std::string_view text ) { return Parser( text ).parse_ltl_all(); }

StatePropPtr parse_state_prop( std::string_view text ) { return Parser( text ).parse_state_all(); }

} // namespace agrkit
