#include "agrkit/formula.hpp"

#include "agrkit/error.hpp"

#include <algorithm>

namespace agrkit
{

AtomPattern make_pattern( std::string predicate, std::vector<AtomArg> args )
{
    AtomPattern p{ std::move( predicate ), std::move( args ), std::nullopt };
    bool ground = std::none_of( p.args.begin(), p.args.end(), []( const AtomArg& a ) { return a.kind == AtomArg::Kind::variable; } );
    if ( ground )
    {
        Atom atom{ p.predicate, {} };
        for ( const auto& a : p.args )
        {
            if ( a.kind == AtomArg::Kind::number )
                atom.args.emplace_back( a.number );
            else
                atom.args.emplace_back( a.name );
        }
        p.ground = std::move( atom );
    }
    return p;
}

StatePropPtr StateProp::make_atom( AtomPattern a )
{
    auto p = std::make_shared<StateProp>();
    p->op = Op::atom;
    p->atom = std::move( a );
    return p;
}

StatePropPtr StateProp::make_constant( bool v )
{
    auto p = std::make_shared<StateProp>();
    p->op = Op::constant;
    p->value = v;
    return p;
}

StatePropPtr StateProp::make_not( StatePropPtr sub )
{
    auto p = std::make_shared<StateProp>();
    p->op = Op::negation;
    p->lhs = std::move( sub );
    return p;
}

StatePropPtr StateProp::make_binary( Op op, StatePropPtr l, StatePropPtr r )
{
    auto p = std::make_shared<StateProp>();
    p->op = op;
    p->lhs = std::move( l );
    p->rhs = std::move( r );
    return p;
}

namespace
{

std::string arg_text( const AtomArg& a )
{
    return a.kind == AtomArg::Kind::number ? to_string( a.number ) : a.name;
}

std::string pattern_text( const AtomPattern& p )
{
    if ( p.args.empty() )
        return p.predicate;
    std::string out = p.predicate + "(";
    for ( std::size_t i = 0; i < p.args.size(); ++i )
        out += ( i ? "," : "" ) + arg_text( p.args[i] );
    return out + ")";
}

const char* binary_symbol( StateProp::Op op )
{
    switch ( op )
    {
    case StateProp::Op::conjunction: return " & ";
    case StateProp::Op::disjunction: return " | ";
    case StateProp::Op::implication: return " => ";
    default: return " ? ";
    }
}

} // namespace

std::string to_string( const StateProp& p )
{
    switch ( p.op )
    {
    case StateProp::Op::atom: return pattern_text( p.atom );
    case StateProp::Op::constant: return p.value ? "true" : "false";
    case StateProp::Op::negation: return "!" + to_string( *p.lhs );
    default: return "(" + to_string( *p.lhs ) + binary_symbol( p.op ) + to_string( *p.rhs ) + ")";
    }
}

namespace
{

template <typename Contains>
bool eval_with( const StateProp& p, const Contains& contains )
{
    switch ( p.op )
    {
    case StateProp::Op::atom:
        if ( !p.atom.ground )
            throw TypeError( "atom " + pattern_text( p.atom ) + " has unbound variables" );
        return contains( *p.atom.ground );
    case StateProp::Op::constant: return p.value;
    case StateProp::Op::negation: return !eval_with( *p.lhs, contains );
    case StateProp::Op::conjunction: return eval_with( *p.lhs, contains ) && eval_with( *p.rhs, contains );
    case StateProp::Op::disjunction: return eval_with( *p.lhs, contains ) || eval_with( *p.rhs, contains );
    case StateProp::Op::implication: return !eval_with( *p.lhs, contains ) || eval_with( *p.rhs, contains );
    }
    return false;
}

} // namespace

bool eval_state_prop( const State& state, const StateProp& prop )
{
    return eval_with( prop, [&]( const Atom& a ) { return state.contains( a ); } );
}

bool eval_state_prop( const std::vector<const State*>& states, const StateProp& prop )
{
    return eval_with( prop, [&]( const Atom& a ) {
        return std::any_of( states.begin(), states.end(), [&]( const State* s ) { return s->contains( a ); } );
    } );
}

const char* to_string( Sort s )
{
    switch ( s )
    {
    case Sort::time: return "time";
    case Sort::number: return "num";
    case Sort::trace: return "trace";
    }
    return "?";
}

std::string to_string( const TimeTerm& t )
{
    std::string base;
    switch ( t.base )
    {
    case TimeTerm::Base::constant: return std::to_string( t.offset );
    case TimeTerm::Base::variable: base = t.var; break;
    case TimeTerm::Base::end: base = "end"; break;
    }
    if ( t.offset > 0 )
        return base + "+" + std::to_string( t.offset );
    if ( t.offset < 0 )
        return base + "-" + std::to_string( -t.offset );
    return base;
}

const char* to_string( CmpOp op )
{
    switch ( op )
    {
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::eq: return "=";
    case CmpOp::ne: return "!=";
    case CmpOp::ge: return ">=";
    case CmpOp::gt: return ">";
    }
    return "?";
}

namespace make
{

FormulaPtr holds( TimeTerm t, PartRef part, StatePropPtr s, std::string trace_var )
{
    auto f = std::make_shared<Formula>();
    f->op = Formula::Op::holds;
    f->time = std::move( t );
    f->part = std::move( part );
    f->state = std::move( s );
    f->trace_var = std::move( trace_var );
    return f;
}

FormulaPtr constant( bool v )
{
    auto f = std::make_shared<Formula>();
    f->op = Formula::Op::constant;
    f->value = v;
    return f;
}

FormulaPtr negation( FormulaPtr sub )
{
    auto f = std::make_shared<Formula>();
    f->op = Formula::Op::negation;
    f->lhs = std::move( sub );
    return f;
}

FormulaPtr binary( Formula::Op op, FormulaPtr l, FormulaPtr r )
{
    auto f = std::make_shared<Formula>();
    f->op = op;
    f->lhs = std::move( l );
    f->rhs = std::move( r );
    return f;
}

FormulaPtr conj( FormulaPtr l, FormulaPtr r ) { return binary( Formula::Op::conjunction, std::move( l ), std::move( r ) ); }
FormulaPtr disj( FormulaPtr l, FormulaPtr r ) { return binary( Formula::Op::disjunction, std::move( l ), std::move( r ) ); }
FormulaPtr implies( FormulaPtr l, FormulaPtr r ) { return binary( Formula::Op::implication, std::move( l ), std::move( r ) ); }

FormulaPtr quantifier( bool universal, Sort sort, std::string var, FormulaPtr body, std::optional<TimeTerm> lower, std::optional<TimeTerm> upper )
{
    auto f = std::make_shared<Formula>();
    f->op = universal ? Formula::Op::forall : Formula::Op::exists;
    f->sort = sort;
    f->var = std::move( var );
    f->lhs = std::move( body );
    f->lower = std::move( lower );
    f->upper = std::move( upper );
    return f;
}

FormulaPtr forall_time( std::string var, FormulaPtr body, std::optional<TimeTerm> lower, std::optional<TimeTerm> upper )
{
    return quantifier( true, Sort::time, std::move( var ), std::move( body ), std::move( lower ), std::move( upper ) );
}

FormulaPtr exists_time( std::string var, FormulaPtr body, std::optional<TimeTerm> lower, std::optional<TimeTerm> upper )
{
    return quantifier( false, Sort::time, std::move( var ), std::move( body ), std::move( lower ), std::move( upper ) );
}

FormulaPtr time_cmp( TimeTerm l, CmpOp op, TimeTerm r )
{
    auto f = std::make_shared<Formula>();
    f->op = Formula::Op::time_cmp;
    f->time_lhs = std::move( l );
    f->cmp = op;
    f->time_rhs = std::move( r );
    return f;
}

FormulaPtr num_cmp( NumTerm l, CmpOp op, NumTerm r )
{
    auto f = std::make_shared<Formula>();
    f->op = Formula::Op::num_cmp;
    f->num_lhs = std::move( l );
    f->cmp = op;
    f->num_rhs = std::move( r );
    return f;
}

} // namespace make

namespace
{

std::string num_term_text( const NumTerm& n )
{
    return n.is_var ? n.var : to_string( n.value );
}

const char* formula_symbol( Formula::Op op )
{
    switch ( op )
    {
    case Formula::Op::conjunction: return " & ";
    case Formula::Op::disjunction: return " | ";
    case Formula::Op::implication: return " => ";
    default: return " ? ";
    }
}

} // namespace

std::string to_string( const Formula& f )
{
    switch ( f.op )
    {
    case Formula::Op::holds:
    {
        std::string out = "holds(";
        if ( !f.trace_var.empty() )
            out += f.trace_var + ", ";
        return out + to_string( f.time ) + ", " + to_string( f.part ) + ", " + to_string( *f.state ) + ")";
    }
    case Formula::Op::constant: return f.value ? "true" : "false";
    case Formula::Op::negation: return "!" + to_string( *f.lhs );
    case Formula::Op::conjunction:
    case Formula::Op::disjunction:
    case Formula::Op::implication: return "(" + to_string( *f.lhs ) + formula_symbol( f.op ) + to_string( *f.rhs ) + ")";
    case Formula::Op::forall:
    case Formula::Op::exists:
    {
        std::string out = f.op == Formula::Op::forall ? "(forall " : "(exists ";
        out += f.var;
        if ( f.sort != Sort::time )
            out += std::string( " : " ) + to_string( f.sort );
        if ( f.lower || f.upper )
            out += " in [" + ( f.lower ? to_string( *f.lower ) : std::string( "0" ) ) + ", " + ( f.upper ? to_string( *f.upper ) : std::string( "end" ) ) + "]";
        return out + ". " + to_string( *f.lhs ) + ")";
    }
    case Formula::Op::time_cmp: return "(" + to_string( f.time_lhs ) + " " + to_string( f.cmp ) + " " + to_string( f.time_rhs ) + ")";
    case Formula::Op::num_cmp: return "(" + num_term_text( f.num_lhs ) + " " + to_string( f.cmp ) + " " + num_term_text( f.num_rhs ) + ")";
    }
    return "?";
}

namespace
{

// Bound-variable correspondence for alpha_equal; searched innermost first.
using Renaming = std::vector<std::pair<std::string, std::string>>;

bool same_var( const Renaming& ren, const std::string& a, const std::string& b )
{
    for ( auto it = ren.rbegin(); it != ren.rend(); ++it )
    {
        if ( it->first == a || it->second == b )
            return it->first == a && it->second == b;
    }
    return a == b;
}

bool same_time( const Renaming& ren, const TimeTerm& a, const TimeTerm& b )
{
    if ( a.base != b.base || a.offset != b.offset )
        return false;
    return a.base != TimeTerm::Base::variable || same_var( ren, a.var, b.var );
}

bool same_num( const Renaming& ren, const NumTerm& a, const NumTerm& b )
{
    if ( a.is_var != b.is_var )
        return false;
    return a.is_var ? same_var( ren, a.var, b.var ) : a.value == b.value;
}

bool same_state( const Renaming& ren, const StateProp& a, const StateProp& b )
{
    if ( a.op != b.op )
        return false;
    switch ( a.op )
    {
    case StateProp::Op::atom:
        if ( a.atom.predicate != b.atom.predicate || a.atom.args.size() != b.atom.args.size() )
            return false;
        for ( std::size_t i = 0; i < a.atom.args.size(); ++i )
        {
            const auto& x = a.atom.args[i];
            const auto& y = b.atom.args[i];
            if ( x.kind != y.kind )
                return false;
            if ( x.kind == AtomArg::Kind::variable ? !same_var( ren, x.name, y.name ) : !( x == y ) )
                return false;
        }
        return true;
    case StateProp::Op::constant: return a.value == b.value;
    case StateProp::Op::negation: return same_state( ren, *a.lhs, *b.lhs );
    default: return same_state( ren, *a.lhs, *b.lhs ) && same_state( ren, *a.rhs, *b.rhs );
    }
}

bool alpha( Renaming& ren, const Formula& a, const Formula& b )
{
    if ( a.op != b.op )
        return false;
    switch ( a.op )
    {
    case Formula::Op::holds:
        if ( a.trace_var.empty() != b.trace_var.empty() )
            return false;
        if ( !a.trace_var.empty() && !same_var( ren, a.trace_var, b.trace_var ) )
            return false;
        return same_time( ren, a.time, b.time ) && a.part == b.part && same_state( ren, *a.state, *b.state );
    case Formula::Op::constant: return a.value == b.value;
    case Formula::Op::negation: return alpha( ren, *a.lhs, *b.lhs );
    case Formula::Op::conjunction:
    case Formula::Op::disjunction:
    case Formula::Op::implication: return alpha( ren, *a.lhs, *b.lhs ) && alpha( ren, *a.rhs, *b.rhs );
    case Formula::Op::forall:
    case Formula::Op::exists:
    {
        if ( a.sort != b.sort || a.lower.has_value() != b.lower.has_value() || a.upper.has_value() != b.upper.has_value() )
            return false;
        // bounds are evaluated outside the binder's scope
        if ( a.lower && !same_time( ren, *a.lower, *b.lower ) )
            return false;
        if ( a.upper && !same_time( ren, *a.upper, *b.upper ) )
            return false;
        ren.emplace_back( a.var, b.var );
        bool ok = alpha( ren, *a.lhs, *b.lhs );
        ren.pop_back();
        return ok;
    }
    case Formula::Op::time_cmp: return a.cmp == b.cmp && same_time( ren, a.time_lhs, b.time_lhs ) && same_time( ren, a.time_rhs, b.time_rhs );
    case Formula::Op::num_cmp: return a.cmp == b.cmp && same_num( ren, a.num_lhs, b.num_lhs ) && same_num( ren, a.num_rhs, b.num_rhs );
    }
    return false;
}

} // namespace

bool alpha_equal( const Formula& a, const Formula& b )
{
    Renaming ren;
    return alpha( ren, a, b );
}

bool uses_implicit_trace( const Formula& f )
{
    switch ( f.op )
    {
    case Formula::Op::holds: return f.trace_var.empty();
    case Formula::Op::negation:
    case Formula::Op::forall:
    case Formula::Op::exists: return uses_implicit_trace( *f.lhs );
    case Formula::Op::conjunction:
    case Formula::Op::disjunction:
    case Formula::Op::implication: return uses_implicit_trace( *f.lhs ) || uses_implicit_trace( *f.rhs );
    default: return false;
    }
}

FormulaPtr map_parts( const FormulaPtr& f, const std::function<PartRef( const PartRef& )>& fn )
{
    switch ( f->op )
    {
    case Formula::Op::holds:
    {
        auto copy = std::make_shared<Formula>( *f );
        copy->part = fn( f->part );
        return copy;
    }
    case Formula::Op::negation:
    case Formula::Op::forall:
    case Formula::Op::exists:
    {
        auto copy = std::make_shared<Formula>( *f );
        copy->lhs = map_parts( f->lhs, fn );
        return copy;
    }
    case Formula::Op::conjunction:
    case Formula::Op::disjunction:
    case Formula::Op::implication:
    {
        auto copy = std::make_shared<Formula>( *f );
        copy->lhs = map_parts( f->lhs, fn );
        copy->rhs = map_parts( f->rhs, fn );
        return copy;
    }
    default: return f;
    }
}

char to_char( Modal m )
{
    switch ( m )
    {
    case Modal::C: return 'C';
    case Modal::X: return 'X';
    case Modal::F: return 'F';
    case Modal::G: return 'G';
    case Modal::P: return 'P';
    case Modal::H: return 'H';
    }
    return '?';
}

std::string to_string( const LtlFormula& f )
{
    switch ( f.op )
    {
    case LtlFormula::Op::modal:
    {
        std::string out( 1, to_char( f.modal ) );
        switch ( f.constraint.kind )
        {
        case TimeConstraint::Kind::none: break;
        case TimeConstraint::Kind::less: out += "<" + std::to_string( f.constraint.bound ); break;
        case TimeConstraint::Kind::less_equal: out += "<=" + std::to_string( f.constraint.bound ); break;
        case TimeConstraint::Kind::exactly: out += "=" + std::to_string( f.constraint.bound ); break;
        }
        return out + "[" + to_string( f.part ) + "](" + to_string( *f.state ) + ")";
    }
    case LtlFormula::Op::constant: return f.value ? "true" : "false";
    case LtlFormula::Op::negation: return "!" + to_string( *f.lhs );
    case LtlFormula::Op::conjunction: return "(" + to_string( *f.lhs ) + " & " + to_string( *f.rhs ) + ")";
    case LtlFormula::Op::disjunction: return "(" + to_string( *f.lhs ) + " | " + to_string( *f.rhs ) + ")";
    case LtlFormula::Op::implication: return "(" + to_string( *f.lhs ) + " => " + to_string( *f.rhs ) + ")";
    }
    return "?";
}

LtlPtr map_parts( const LtlPtr& f, const std::function<PartRef( const PartRef& )>& fn )
{
    auto copy = std::make_shared<LtlFormula>( *f );
    if ( f->op == LtlFormula::Op::modal )
        copy->part = fn( f->part );
    if ( f->lhs )
        copy->lhs = map_parts( f->lhs, fn );
    if ( f->rhs )
        copy->rhs = map_parts( f->rhs, fn );
    return copy;
}

} // namespace agrkit
