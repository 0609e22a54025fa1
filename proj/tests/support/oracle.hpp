#pragma once

// Reference evaluators used as test oracles. They share the data types with
// the library but none of its evaluation code: every quantifier binding is
// enumerated explicitly and states are recomputed from the raw trace columns.

#include "agrkit/checker.hpp"
#include "agrkit/formula.hpp"
#include "agrkit/trace.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle
{

using agrkit::AtomicPart;
using agrkit::Direction;
using agrkit::Formula;
using agrkit::LtlFormula;
using agrkit::Number;
using agrkit::PartKind;
using agrkit::PartRef;
using agrkit::StateProp;
using agrkit::Trace;
using agrkit::Truth;

inline Truth t_not( Truth a ) { return a == Truth::holds ? Truth::fails : a == Truth::fails ? Truth::holds : Truth::inconclusive; }

inline Truth t_and( Truth a, Truth b )
{
    if ( a == Truth::fails || b == Truth::fails )
        return Truth::fails;
    if ( a == Truth::holds && b == Truth::holds )
        return Truth::holds;
    return Truth::inconclusive;
}

inline Truth t_or( Truth a, Truth b ) { return t_not( t_and( t_not( a ), t_not( b ) ) ); }

inline Truth from_bool( bool b ) { return b ? Truth::holds : Truth::fails; }

// Atomic parts of a reference, resolved without the library.
inline std::vector<AtomicPart> parts_of( const PartRef& p, const agrkit::OrgStructure* org )
{
    if ( !p.alias_members.empty() )
        return p.alias_members;
    std::set<std::string> roles;
    switch ( p.kind )
    {
    case PartKind::input: return { { Direction::input, p.name } };
    case PartKind::output: return { { Direction::output, p.name } };
    case PartKind::role: roles.insert( p.name ); break;
    case PartKind::group:
        for ( const auto& [r, g] : org->role_in )
            if ( g == p.name )
                roles.insert( r );
        break;
    case PartKind::organisation: roles.insert( org->roles.begin(), org->roles.end() ); break;
    }
    std::vector<AtomicPart> out;
    for ( const auto& r : roles )
    {
        out.push_back( { Direction::input, r } );
        out.push_back( { Direction::output, r } );
    }
    return out;
}

// Closed-world membership over the union of the parts' states.
inline bool has_atom( const Trace& tr, int t, const std::vector<AtomicPart>& parts, const agrkit::Atom& a )
{
    for ( const auto& p : parts )
    {
        const auto* col = tr.column( p );
        if ( !col )
            continue;
        for ( const auto& x : ( *col )[static_cast<std::size_t>( t )] )
            if ( x == a )
                return true;
    }
    return false;
}

inline bool eval_state( const StateProp& s, const Trace& tr, int t, const std::vector<AtomicPart>& parts, const std::map<std::string, Number>& num )
{
    switch ( s.op )
    {
    case StateProp::Op::constant: return s.value;
    case StateProp::Op::atom:
    {
        agrkit::Atom a{ s.atom.predicate, {} };
        for ( const auto& arg : s.atom.args )
        {
            if ( arg.kind == agrkit::AtomArg::Kind::symbol )
                a.args.emplace_back( arg.name );
            else if ( arg.kind == agrkit::AtomArg::Kind::number )
                a.args.emplace_back( arg.number );
            else
                a.args.emplace_back( num.at( arg.name ) );
        }
        return has_atom( tr, t, parts, a );
    }
    case StateProp::Op::negation: return !eval_state( *s.lhs, tr, t, parts, num );
    case StateProp::Op::conjunction: return eval_state( *s.lhs, tr, t, parts, num ) && eval_state( *s.rhs, tr, t, parts, num );
    case StateProp::Op::disjunction: return eval_state( *s.lhs, tr, t, parts, num ) || eval_state( *s.rhs, tr, t, parts, num );
    case StateProp::Op::implication: return !eval_state( *s.lhs, tr, t, parts, num ) || eval_state( *s.rhs, tr, t, parts, num );
    }
    return false;
}

inline bool multi_trace( const Formula& f )
{
    if ( f.is_quantifier() && f.sort == agrkit::Sort::trace )
        return true;
    return ( f.lhs && multi_trace( *f.lhs ) ) || ( f.rhs && multi_trace( *f.rhs ) );
}

/// Brute-force evaluation of the temporal core.
class Ttl
{
public:
    Ttl( std::vector<const Trace*> traces, const agrkit::OrgStructure* org = nullptr ) : _traces( std::move( traces ) ), _org( org ) {}

    Truth operator()( const Formula& f )
    {
        if ( multi_trace( f ) )
        {
            _scope = _traces;
            _h = _traces.front()->horizon();
            for ( const auto* tr : _traces )
                _h = std::min( _h, tr->horizon() );
            _current = nullptr;
            return eval( f );
        }
        Truth out = Truth::holds;
        for ( const auto* tr : _traces )
        {
            _scope = { tr };
            _current = tr;
            _h = tr->horizon();
            out = t_and( out, eval( f ) );
        }
        return out;
    }

private:
    std::vector<const Trace*> _traces;
    std::vector<const Trace*> _scope;
    const agrkit::OrgStructure* _org;
    const Trace* _current = nullptr;
    int _h = 0;
    std::map<std::string, long> _time;
    std::map<std::string, Number> _num;
    std::map<std::string, const Trace*> _trace;

    long value( const agrkit::TimeTerm& t ) const
    {
        switch ( t.base )
        {
        case agrkit::TimeTerm::Base::constant: return t.offset;
        case agrkit::TimeTerm::Base::variable: return _time.at( t.var ) + t.offset;
        case agrkit::TimeTerm::Base::end: return _h + t.offset;
        }
        return 0;
    }

    Number value( const agrkit::NumTerm& n ) const { return n.is_var ? _num.at( n.var ) : n.value; }

    static bool compare( long a, agrkit::CmpOp op, long b )
    {
        using agrkit::CmpOp;
        switch ( op )
        {
        case CmpOp::lt: return a < b;
        case CmpOp::le: return a <= b;
        case CmpOp::eq: return a == b;
        case CmpOp::ne: return a != b;
        case CmpOp::ge: return a >= b;
        case CmpOp::gt: return a > b;
        }
        return false;
    }

    static bool compare( const Number& a, agrkit::CmpOp op, const Number& b )
    {
        using agrkit::CmpOp;
        switch ( op )
        {
        case CmpOp::lt: return a < b;
        case CmpOp::le: return a <= b;
        case CmpOp::eq: return a == b;
        case CmpOp::ne: return a != b;
        case CmpOp::ge: return a >= b;
        case CmpOp::gt: return a > b;
        }
        return false;
    }

    static void positions( const StateProp& s, const std::string& var, std::set<std::pair<std::string, std::size_t>>& out )
    {
        if ( s.op == StateProp::Op::atom )
            for ( std::size_t i = 0; i < s.atom.args.size(); ++i )
                if ( s.atom.args[i].kind == agrkit::AtomArg::Kind::variable && s.atom.args[i].name == var )
                    out.insert( { s.atom.predicate, i } );
        if ( s.lhs )
            positions( *s.lhs, var, out );
        if ( s.rhs )
            positions( *s.rhs, var, out );
    }

    static void positions( const Formula& f, const std::string& var, std::set<std::pair<std::string, std::size_t>>& out )
    {
        if ( f.op == Formula::Op::holds )
            positions( *f.state, var, out );
        if ( f.is_quantifier() && f.var == var )
            return;
        if ( f.lhs )
            positions( *f.lhs, var, out );
        if ( f.rhs )
            positions( *f.rhs, var, out );
    }

    std::set<Number> domain( const Formula& q ) const
    {
        std::set<std::pair<std::string, std::size_t>> pos;
        positions( *q.lhs, q.var, pos );
        std::set<Number> out;
        for ( const auto* tr : _scope )
            for ( const auto& [part, col] : tr->columns() )
                for ( const auto& st : col )
                    for ( const auto& a : st )
                        for ( std::size_t i = 0; i < a.args.size(); ++i )
                            if ( pos.count( { a.predicate, i } ) && std::holds_alternative<Number>( a.args[i] ) )
                                out.insert( std::get<Number>( a.args[i] ) );
        return out;
    }

    Truth eval( const Formula& f )
    {
        switch ( f.op )
        {
        case Formula::Op::constant: return from_bool( f.value );
        case Formula::Op::holds:
        {
            long t = value( f.time );
            if ( t < 0 )
                return Truth::fails;
            if ( t > _h )
                return Truth::inconclusive;
            const Trace* tr = f.trace_var.empty() ? _current : _trace.at( f.trace_var );
            return from_bool( eval_state( *f.state, *tr, static_cast<int>( t ), parts_of( f.part, _org ), _num ) );
        }
        case Formula::Op::negation: return t_not( eval( *f.lhs ) );
        case Formula::Op::conjunction: return t_and( eval( *f.lhs ), eval( *f.rhs ) );
        case Formula::Op::disjunction: return t_or( eval( *f.lhs ), eval( *f.rhs ) );
        case Formula::Op::implication: return t_or( t_not( eval( *f.lhs ) ), eval( *f.rhs ) );
        case Formula::Op::time_cmp: return from_bool( compare( value( f.time_lhs ), f.cmp, value( f.time_rhs ) ) );
        case Formula::Op::num_cmp: return from_bool( compare( value( f.num_lhs ), f.cmp, value( f.num_rhs ) ) );
        case Formula::Op::forall:
        case Formula::Op::exists:
        {
            bool all = f.op == Formula::Op::forall;
            Truth acc = all ? Truth::holds : Truth::fails;
            auto fold = [&]( Truth v ) { acc = all ? t_and( acc, v ) : t_or( acc, v ); };
            if ( f.sort == agrkit::Sort::time )
            {
                long lo = f.lower ? std::max( 0L, value( *f.lower ) ) : 0L;
                long hi = f.upper ? value( *f.upper ) : _h;
                auto saved = _time.count( f.var ) ? std::optional<long>( _time[f.var] ) : std::nullopt;
                for ( long t = lo; t <= hi; ++t )
                {
                    _time[f.var] = t;
                    fold( eval( *f.lhs ) );
                }
                if ( saved )
                    _time[f.var] = *saved;
                else
                    _time.erase( f.var );
            }
            else if ( f.sort == agrkit::Sort::number )
            {
                auto saved = _num.count( f.var ) ? std::optional<Number>( _num[f.var] ) : std::nullopt;
                for ( const auto& n : domain( f ) )
                {
                    _num[f.var] = n;
                    fold( eval( *f.lhs ) );
                }
                if ( saved )
                    _num[f.var] = *saved;
                else
                    _num.erase( f.var );
            }
            else
            {
                auto saved = _trace.count( f.var ) ? _trace[f.var] : nullptr;
                for ( const auto* tr : _scope )
                {
                    _trace[f.var] = tr;
                    fold( eval( *f.lhs ) );
                }
                if ( saved )
                    _trace[f.var] = saved;
                else
                    _trace.erase( f.var );
            }
            return acc;
        }
        }
        return Truth::inconclusive;
    }
};

inline Truth ttl( const Formula& f, const std::vector<const Trace*>& traces, const agrkit::OrgStructure* org = nullptr )
{
    return Ttl( traces, org )( f );
}

/// Direct finite-trace semantics of the indexed LTL surface, read off the
/// operator descriptions: the formula is required at every time point.
class Ltl
{
public:
    Ltl( const Trace& tr, const agrkit::OrgStructure* org = nullptr ) : _tr( tr ), _org( org ) {}

    Truth operator()( const LtlFormula& f ) const
    {
        Truth out = Truth::holds;
        for ( int t0 = 0; t0 <= _tr.horizon(); ++t0 )
            out = t_and( out, at( f, t0 ) );
        return out;
    }

private:
    const Trace& _tr;
    const agrkit::OrgStructure* _org;

    Truth point( const LtlFormula& f, long t ) const
    {
        if ( t < 0 )
            return Truth::fails;
        if ( t > _tr.horizon() )
            return Truth::inconclusive;
        return from_bool( eval_state( *f.state, _tr, static_cast<int>( t ), parts_of( f.part, _org ), {} ) );
    }

    // Fold over [lo, hi]; times before 0 are not part of any window.
    Truth window( const LtlFormula& f, long lo, long hi, bool all ) const
    {
        Truth acc = all ? Truth::holds : Truth::fails;
        for ( long t = std::max( 0L, lo ); t <= hi; ++t )
            acc = all ? t_and( acc, point( f, t ) ) : t_or( acc, point( f, t ) );
        return acc;
    }

    Truth modal( const LtlFormula& f, long t0 ) const
    {
        using K = agrkit::TimeConstraint::Kind;
        using agrkit::Modal;
        long c = f.constraint.bound;
        K k = f.constraint.kind;
        switch ( f.modal )
        {
        case Modal::C: return point( f, t0 );
        case Modal::X: return point( f, t0 + 1 );
        case Modal::F:
        case Modal::G:
        {
            bool all = f.modal == Modal::G;
            if ( k == K::none )
                return window( f, t0, _tr.horizon(), all );
            if ( k == K::exactly )
                return point( f, t0 + c );
            return window( f, t0, k == K::less ? t0 + c - 1 : t0 + c, all );
        }
        case Modal::P:
        case Modal::H:
        {
            bool all = f.modal == Modal::H;
            if ( k == K::none )
                return window( f, 0, t0, all );
            if ( k == K::exactly )
                return point( f, t0 - c );
            return window( f, k == K::less ? t0 - c + 1 : t0 - c, t0, all );
        }
        }
        return Truth::inconclusive;
    }

    Truth at( const LtlFormula& f, long t0 ) const
    {
        switch ( f.op )
        {
        case LtlFormula::Op::modal: return modal( f, t0 );
        case LtlFormula::Op::constant: return from_bool( f.value );
        case LtlFormula::Op::negation: return t_not( at( *f.lhs, t0 ) );
        case LtlFormula::Op::conjunction: return t_and( at( *f.lhs, t0 ), at( *f.rhs, t0 ) );
        case LtlFormula::Op::disjunction: return t_or( at( *f.lhs, t0 ), at( *f.rhs, t0 ) );
        case LtlFormula::Op::implication: return t_or( t_not( at( *f.lhs, t0 ) ), at( *f.rhs, t0 ) );
        }
        return Truth::inconclusive;
    }
};

} // namespace oracle
