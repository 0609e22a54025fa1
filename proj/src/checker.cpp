#include "agrkit/checker.hpp"

#include "agrkit/error.hpp"
#include "agrkit/ltl.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cstdlib>
#include <memory>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace agrkit
{

const char* to_string( Truth t )
{
    switch ( t )
    {
    case Truth::fails: return "fails";
    case Truth::inconclusive: return "inconclusive";
    case Truth::holds: return "holds";
    }
    return "?";
}

std::string witness_text( const Verdict& v )
{
    std::string out;
    for ( const auto& b : v.witness )
    {
        if ( !out.empty() )
            out += ", ";
        out += b.var + "=" + b.value;
    }
    return out;
}

ExecPolicy default_policy()
{
    const char* env = std::getenv( "AGRKIT_NO_PARALLEL" );
    return ( env && std::string_view( env ) == "1" ) ? ExecPolicy::serial : ExecPolicy::parallel;
}

FormulaPtr core_of( const ParsedProperty& p ) { return p.dialect == Dialect::ltl ? compile_ltl( *p.ltl ) : p.ttl; }

namespace
{

// ---------------------------------------------------------------------------
// Compiled form: variables resolved to slots, parts to columns.

struct TermC
{
    TimeTerm::Base base = TimeTerm::Base::constant;
    int slot = -1;
    long offset = 0;
};

struct NumC
{
    bool is_var = false;
    int slot = -1;
    Number value;
};

struct ArgC
{
    bool is_var = false;
    int slot = -1;
    Value value;
};

struct SNode
{
    StateProp::Op op = StateProp::Op::constant;
    bool value = true;
    std::optional<Atom> ground;
    std::string predicate;
    std::vector<ArgC> args;
    std::unique_ptr<SNode> lhs, rhs;
};

struct Node
{
    Formula::Op op = Formula::Op::constant;
    const Formula* src = nullptr;

    int trace_slot = -1; // -1: the implicit trace
    TermC time;
    std::vector<AtomicPart> parts;
    std::vector<std::vector<const Trace::Column*>> columns; // per trace index, nulls dropped
    std::unique_ptr<SNode> state;

    bool value = true;
    std::unique_ptr<Node> lhs, rhs;

    Sort sort = Sort::time;
    int slot = -1;
    std::optional<TermC> lower, upper;
    std::vector<Number> domain; // numeric quantifiers

    CmpOp cmp = CmpOp::le;
    TermC tl, tr;
    NumC nl, nr;

    [[nodiscard]] bool is_quantifier_node() const { return op == Formula::Op::forall || op == Formula::Op::exists; }
};

struct Env
{
    std::vector<long> time;
    std::vector<Number> num;
    std::vector<int> trace;
    int implicit = 0;
};

template <typename T>
bool compare( const T& a, CmpOp op, const T& b )
{
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

Truth truth_of( bool b ) { return b ? Truth::holds : Truth::fails; }

class Engine
{
public:
    Engine( const Formula& f, std::span<const Trace* const> traces, const CheckOptions& opts ) : _traces( traces ), _opts( opts )
    {
        _multi = is_multi_trace( f );
        if ( _multi && uses_implicit_trace( f ) )
            throw TypeError( "holds without a trace variable in a formula that quantifies over traces" );
        _root = compile( f );
        _slots = _next_slot;
    }

    Verdict run()
    {
        if ( _multi )
        {
            _horizon = INT_MAX;
            for ( const auto* t : _traces )
                _horizon = std::min( _horizon, t->horizon() );
            if ( _traces.empty() )
                _horizon = 0;
            Env env = fresh_env();
            Verdict v;
            v.truth = eval_top( *_root, env );
            if ( _opts.explain )
                explain_into( v, env );
            return v;
        }

        Verdict overall;
        std::size_t decisive = _traces.size();
        std::vector<Truth> per_trace( _traces.size() );
        for ( std::size_t i = 0; i < _traces.size(); ++i )
        {
            _horizon = _traces[i]->horizon();
            Env env = fresh_env();
            env.implicit = static_cast<int>( i );
            per_trace[i] = eval_top( *_root, env );
            overall.truth = kleene_and( overall.truth, per_trace[i] );
            if ( overall.truth == Truth::fails )
                break;
        }
        for ( std::size_t i = 0; i < _traces.size() && decisive == _traces.size(); ++i )
            if ( per_trace[i] == overall.truth )
                decisive = i;
        if ( decisive < _traces.size() )
        {
            overall.trace = _traces[decisive]->id();
            if ( _opts.explain )
            {
                _horizon = _traces[decisive]->horizon();
                Env env = fresh_env();
                env.implicit = static_cast<int>( decisive );
                explain_into( overall, env );
            }
        }
        return overall;
    }

private:
    std::span<const Trace* const> _traces;
    CheckOptions _opts;
    bool _multi = false;
    int _horizon = 0;
    std::unique_ptr<Node> _root;
    int _next_slot = 0;
    int _slots = 0;

    struct Binder
    {
        std::string name;
        Sort sort;
        int slot;
    };
    std::vector<Binder> _scope;

    // --- compilation -----------------------------------------------------

    const Binder& lookup( const std::string& name, Sort sort ) const
    {
        for ( auto it = _scope.rbegin(); it != _scope.rend(); ++it )
            if ( it->name == name )
            {
                if ( it->sort != sort )
                    throw TypeError( "variable '" + name + "' is of sort " + to_string( it->sort ) + ", not " + to_string( sort ) );
                return *it;
            }
        if ( sort == Sort::trace )
            throw TypeError( "unbound trace variable '" + name + "'" );
        throw TypeError( "free variable '" + name + "'" );
    }

    TermC compile_time( const TimeTerm& t ) const
    {
        TermC c{ t.base, -1, t.offset };
        if ( t.base == TimeTerm::Base::variable )
            c.slot = lookup( t.var, Sort::time ).slot;
        return c;
    }

    NumC compile_num( const NumTerm& n ) const
    {
        NumC c{ n.is_var, -1, n.value };
        if ( n.is_var )
            c.slot = lookup( n.var, Sort::number ).slot;
        return c;
    }

    std::unique_ptr<SNode> compile_state( const StateProp& p ) const
    {
        auto s = std::make_unique<SNode>();
        s->op = p.op;
        s->value = p.value;
        if ( p.op == StateProp::Op::atom )
        {
            s->ground = p.atom.ground;
            s->predicate = p.atom.predicate;
            for ( const auto& a : p.atom.args )
            {
                ArgC c;
                switch ( a.kind )
                {
                case AtomArg::Kind::symbol: c.value = a.name; break;
                case AtomArg::Kind::number: c.value = a.number; break;
                case AtomArg::Kind::variable:
                    c.is_var = true;
                    c.slot = lookup( a.name, Sort::number ).slot;
                    break;
                }
                s->args.push_back( std::move( c ) );
            }
        }
        if ( p.lhs )
            s->lhs = compile_state( *p.lhs );
        if ( p.rhs )
            s->rhs = compile_state( *p.rhs );
        return s;
    }

    std::unique_ptr<Node> compile( const Formula& f )
    {
        auto n = std::make_unique<Node>();
        n->op = f.op;
        n->src = &f;
        switch ( f.op )
        {
        case Formula::Op::holds:
        {
            if ( !f.trace_var.empty() )
                n->trace_slot = lookup( f.trace_var, Sort::trace ).slot;
            n->time = compile_time( f.time );
            n->parts = expand_part( f.part, _opts.org );
            for ( const auto* trace : _traces )
            {
                std::vector<const Trace::Column*> cols;
                for ( const auto& p : n->parts )
                    if ( const auto* c = trace->column( p ) )
                        cols.push_back( c );
                n->columns.push_back( std::move( cols ) );
            }
            n->state = compile_state( *f.state );
            break;
        }
        case Formula::Op::constant: n->value = f.value; break;
        case Formula::Op::negation: n->lhs = compile( *f.lhs ); break;
        case Formula::Op::conjunction:
        case Formula::Op::disjunction:
        case Formula::Op::implication:
            n->lhs = compile( *f.lhs );
            n->rhs = compile( *f.rhs );
            break;
        case Formula::Op::forall:
        case Formula::Op::exists:
        {
            n->sort = f.sort;
            if ( f.lower )
                n->lower = compile_time( *f.lower );
            if ( f.upper )
                n->upper = compile_time( *f.upper );
            n->slot = _next_slot++;
            if ( f.sort == Sort::number )
                n->domain = numeric_domain( f );
            _scope.push_back( { f.var, f.sort, n->slot } );
            n->lhs = compile( *f.lhs );
            _scope.pop_back();
            break;
        }
        case Formula::Op::time_cmp:
            n->cmp = f.cmp;
            n->tl = compile_time( f.time_lhs );
            n->tr = compile_time( f.time_rhs );
            break;
        case Formula::Op::num_cmp:
            n->cmp = f.cmp;
            n->nl = compile_num( f.num_lhs );
            n->nr = compile_num( f.num_rhs );
            break;
        }
        return n;
    }

    // Values occurring in the supplied traces at the atom positions where the variable is used.
    std::vector<Number> numeric_domain( const Formula& q ) const
    {
        std::set<std::pair<std::string, std::size_t>> positions;
        collect_positions( *q.lhs, q.var, positions );
        std::set<Number> values;
        for ( const auto* trace : _traces )
            for ( const auto& [part, column] : trace->columns() )
                for ( const auto& state : column )
                    for ( const auto& atom : state )
                        for ( std::size_t i = 0; i < atom.args.size(); ++i )
                            if ( positions.count( { atom.predicate, i } ) )
                                if ( const auto* n = std::get_if<Number>( &atom.args[i] ) )
                                    values.insert( *n );
        return { values.begin(), values.end() };
    }

    static void collect_positions( const StateProp& p, const std::string& var, std::set<std::pair<std::string, std::size_t>>& out )
    {
        if ( p.op == StateProp::Op::atom )
            for ( std::size_t i = 0; i < p.atom.args.size(); ++i )
                if ( p.atom.args[i].kind == AtomArg::Kind::variable && p.atom.args[i].name == var )
                    out.insert( { p.atom.predicate, i } );
        if ( p.lhs )
            collect_positions( *p.lhs, var, out );
        if ( p.rhs )
            collect_positions( *p.rhs, var, out );
    }

    static void collect_positions( const Formula& f, const std::string& var, std::set<std::pair<std::string, std::size_t>>& out )
    {
        if ( f.op == Formula::Op::holds )
            collect_positions( *f.state, var, out );
        if ( f.is_quantifier() && f.var == var )
            return; // shadowed
        if ( f.lhs )
            collect_positions( *f.lhs, var, out );
        if ( f.rhs )
            collect_positions( *f.rhs, var, out );
    }

    // --- evaluation ------------------------------------------------------

    Env fresh_env() const
    {
        Env env;
        env.time.assign( _slots, 0 );
        env.num.assign( _slots, Number() );
        env.trace.assign( _slots, 0 );
        return env;
    }

    long time_of( const TermC& t, const Env& env ) const
    {
        switch ( t.base )
        {
        case TimeTerm::Base::constant: return t.offset;
        case TimeTerm::Base::variable: return env.time[t.slot] + t.offset;
        case TimeTerm::Base::end: return _horizon + t.offset;
        }
        return 0;
    }

    static Number num_of( const NumC& n, const Env& env ) { return n.is_var ? env.num[n.slot] : n.value; }

    static bool eval_state( const SNode& s, const Env& env, const std::vector<const Trace::Column*>& cols, long t )
    {
        switch ( s.op )
        {
        case StateProp::Op::atom:
        {
            auto contains = [&]( const Atom& a ) {
                return std::any_of( cols.begin(), cols.end(), [&]( const Trace::Column* c ) { return ( *c )[t].contains( a ); } );
            };
            if ( s.ground )
                return contains( *s.ground );
            Atom a{ s.predicate, {} };
            a.args.reserve( s.args.size() );
            for ( const auto& arg : s.args )
                a.args.push_back( arg.is_var ? Value( env.num[arg.slot] ) : arg.value );
            return contains( a );
        }
        case StateProp::Op::constant: return s.value;
        case StateProp::Op::negation: return !eval_state( *s.lhs, env, cols, t );
        case StateProp::Op::conjunction: return eval_state( *s.lhs, env, cols, t ) && eval_state( *s.rhs, env, cols, t );
        case StateProp::Op::disjunction: return eval_state( *s.lhs, env, cols, t ) || eval_state( *s.rhs, env, cols, t );
        case StateProp::Op::implication: return !eval_state( *s.lhs, env, cols, t ) || eval_state( *s.rhs, env, cols, t );
        }
        return false;
    }

    int trace_index( const Node& n, const Env& env ) const { return n.trace_slot < 0 ? env.implicit : env.trace[n.trace_slot]; }

    Truth eval_holds( const Node& n, const Env& env ) const
    {
        int ti = trace_index( n, env );
        long t = time_of( n.time, env );
        if ( t < 0 )
            return Truth::fails;
        if ( t > _traces[ti]->horizon() )
            return Truth::inconclusive;
        return truth_of( eval_state( *n.state, env, n.columns[ti], t ) );
    }

    // Instance range of a quantifier; `count` is 0 for an empty domain.
    struct Range
    {
        long lo = 0;
        long count = 0;
    };

    Range range_of( const Node& n, const Env& env ) const
    {
        switch ( n.sort )
        {
        case Sort::time:
        {
            long lo = n.lower ? std::max( 0L, time_of( *n.lower, env ) ) : 0L;
            long hi = n.upper ? time_of( *n.upper, env ) : _horizon;
            return { lo, hi < lo ? 0 : hi - lo + 1 };
        }
        case Sort::number: return { 0, static_cast<long>( n.domain.size() ) };
        case Sort::trace: return { 0, static_cast<long>( _traces.size() ) };
        }
        return {};
    }

    void bind( const Node& n, Env& env, long value ) const
    {
        switch ( n.sort )
        {
        case Sort::time: env.time[n.slot] = value; break;
        case Sort::number: env.num[n.slot] = n.domain[value]; break;
        case Sort::trace: env.trace[n.slot] = static_cast<int>( value ); break;
        }
    }

    std::string instance_text( const Node& n, long value ) const
    {
        switch ( n.sort )
        {
        case Sort::time: return std::to_string( value );
        case Sort::number: return to_string( n.domain[value] );
        case Sort::trace: return _traces[value]->id();
        }
        return {};
    }

    std::string range_text( const Node& n, const Range& r ) const
    {
        if ( r.count == 0 )
            return "{}";
        if ( n.sort == Sort::time )
            return std::to_string( r.lo ) + ".." + std::to_string( r.lo + r.count - 1 );
        return std::to_string( r.count ) + " values";
    }

    Truth eval_quantifier( const Node& n, Env& env ) const
    {
        bool universal = n.op == Formula::Op::forall;
        Truth decisive = universal ? Truth::fails : Truth::holds;
        Truth result = universal ? Truth::holds : Truth::fails;
        auto r = range_of( n, env );
        for ( long i = 0; i < r.count; ++i )
        {
            bind( n, env, r.lo + i );
            Truth v = eval( *n.lhs, env );
            if ( v == decisive )
                return v;
            if ( v == Truth::inconclusive )
                result = Truth::inconclusive;
        }
        return result;
    }

    Truth eval( const Node& n, Env& env ) const
    {
        switch ( n.op )
        {
        case Formula::Op::holds: return eval_holds( n, env );
        case Formula::Op::constant: return truth_of( n.value );
        case Formula::Op::negation: return kleene_not( eval( *n.lhs, env ) );
        case Formula::Op::conjunction:
        {
            Truth a = eval( *n.lhs, env );
            return a == Truth::fails ? a : kleene_and( a, eval( *n.rhs, env ) );
        }
        case Formula::Op::disjunction:
        {
            Truth a = eval( *n.lhs, env );
            return a == Truth::holds ? a : kleene_or( a, eval( *n.rhs, env ) );
        }
        case Formula::Op::implication:
        {
            Truth a = eval( *n.lhs, env );
            return a == Truth::fails ? Truth::holds : kleene_implies( a, eval( *n.rhs, env ) );
        }
        case Formula::Op::forall:
        case Formula::Op::exists: return eval_quantifier( n, env );
        case Formula::Op::time_cmp: return truth_of( compare( time_of( n.tl, env ), n.cmp, time_of( n.tr, env ) ) );
        case Formula::Op::num_cmp: return truth_of( compare( num_of( n.nl, env ), n.cmp, num_of( n.nr, env ) ) );
        }
        return Truth::fails;
    }

    // Outermost quantifier instances are independent; evaluate them across
    // threads. The result is the min/max over instances, so it does not
    // depend on the schedule.
    Truth eval_top( const Node& n, Env& env ) const
    {
#ifdef _OPENMP
        constexpr long min_parallel_instances = 64;
        if ( _opts.policy == ExecPolicy::parallel && n.is_quantifier_node() )
        {
            auto r = range_of( n, env );
            if ( r.count >= min_parallel_instances && omp_get_max_threads() > 1 )
            {
                bool universal = n.op == Formula::Op::forall;
                const int decisive = static_cast<int>( universal ? Truth::fails : Truth::holds );
                std::atomic<bool> settled{ false };
                int lowest = static_cast<int>( Truth::holds );
                int highest = static_cast<int>( Truth::fails );
#pragma omp parallel reduction( min : lowest ) reduction( max : highest )
                {
                    Env local = env;
#pragma omp for schedule( dynamic, 16 )
                    for ( long i = 0; i < r.count; ++i )
                    {
                        if ( settled.load( std::memory_order_relaxed ) )
                            continue;
                        bind( n, local, r.lo + i );
                        int v = static_cast<int>( eval( *n.lhs, local ) );
                        lowest = std::min( lowest, v );
                        highest = std::max( highest, v );
                        if ( v == decisive )
                            settled.store( true, std::memory_order_relaxed );
                    }
                }
                return static_cast<Truth>( universal ? lowest : highest );
            }
        }
#endif
        return eval( n, env );
    }

    // --- explanation -----------------------------------------------------

    struct Explanation
    {
        std::vector<Binding> bindings;
        std::vector<std::string> loci;
    };

    static constexpr std::size_t max_loci = 4;

    void explain_into( Verdict& v, Env& env ) const
    {
        Explanation ex;
        explain( *_root, env, v.truth, ex );
        v.witness = std::move( ex.bindings );
        for ( const auto& l : ex.loci )
        {
            if ( !v.explanation.empty() )
                v.explanation += "; ";
            v.explanation += l;
        }
    }

    void explain_holds( const Node& n, const Env& env, Truth value, Explanation& ex ) const
    {
        if ( ex.loci.size() >= max_loci )
            return;
        const auto& f = *n.src;
        long t = time_of( n.time, env );
        std::string head = "holds(";
        if ( n.trace_slot >= 0 )
            head += _traces[trace_index( n, env )]->id() + ", ";
        head += std::to_string( t ) + ", " + to_string( f.part ) + ", " + to_string( *f.state ) + ")";
        if ( t < 0 )
            ex.loci.push_back( head + " is false: time before trace start" );
        else if ( value == Truth::inconclusive )
            ex.loci.push_back( head + " is unknown: time past horizon " + std::to_string( _traces[trace_index( n, env )]->horizon() ) );
        else
            ex.loci.push_back( head + ( value == Truth::holds ? " is true" : " is false" ) );
    }

    void explain( const Node& n, Env& env, Truth value, Explanation& ex ) const
    {
        switch ( n.op )
        {
        case Formula::Op::holds: explain_holds( n, env, value, ex ); return;
        case Formula::Op::constant: return;
        case Formula::Op::time_cmp:
        case Formula::Op::num_cmp:
            if ( ex.loci.size() < max_loci )
                ex.loci.push_back( to_string( *n.src ) + ( value == Truth::holds ? " is true" : " is false" ) );
            return;
        case Formula::Op::negation: explain( *n.lhs, env, kleene_not( value ), ex ); return;
        case Formula::Op::conjunction:
        case Formula::Op::disjunction:
        {
            Truth a = eval( *n.lhs, env );
            Truth b = eval( *n.rhs, env );
            // holds for AND / fails for OR: both operands matter
            Truth both = n.op == Formula::Op::conjunction ? Truth::holds : Truth::fails;
            if ( value == both )
            {
                explain( *n.lhs, env, a, ex );
                explain( *n.rhs, env, b, ex );
            }
            else if ( a == value )
                explain( *n.lhs, env, a, ex );
            else
                explain( *n.rhs, env, b, ex );
            return;
        }
        case Formula::Op::implication:
        {
            Truth a = eval( *n.lhs, env );
            if ( a == Truth::fails )
            {
                explain( *n.lhs, env, a, ex );
                return;
            }
            Truth b = eval( *n.rhs, env );
            if ( value != Truth::holds || b != Truth::holds )
                explain( *n.lhs, env, a, ex );
            explain( *n.rhs, env, b, ex );
            return;
        }
        case Formula::Op::forall:
        case Formula::Op::exists:
        {
            const auto& var = n.src->var;
            auto r = range_of( n, env );
            bool universal = n.op == Formula::Op::forall;
            Truth exhaustive = universal ? Truth::holds : Truth::fails;
            if ( value == exhaustive )
            {
                ex.bindings.push_back( { var, range_text( n, r ) + ( universal ? " (all)" : " (none)" ) } );
                return;
            }
            for ( long i = 0; i < r.count; ++i )
            {
                bind( n, env, r.lo + i );
                if ( eval( *n.lhs, env ) == value )
                {
                    ex.bindings.push_back( { var, instance_text( n, r.lo + i ) } );
                    explain( *n.lhs, env, value, ex );
                    return;
                }
            }
            return;
        }
        }
    }
};

} // namespace

Verdict check_property( const Formula& f, std::span<const Trace* const> traces, const CheckOptions& opts )
{
    return Engine( f, traces, opts ).run();
}

Verdict check_property( const Formula& f, const Trace& trace, const CheckOptions& opts )
{
    const Trace* one[] = { &trace };
    return check_property( f, std::span<const Trace* const>( one ), opts );
}

Verdict check_property( const ParsedProperty& p, std::span<const Trace* const> traces, const CheckOptions& opts )
{
    auto core = core_of( p );
    return check_property( *core, traces, opts );
}

namespace
{

void predicates_of( const StateProp& p, std::set<std::string>& out )
{
    if ( p.op == StateProp::Op::atom )
        out.insert( p.atom.predicate );
    if ( p.lhs )
        predicates_of( *p.lhs, out );
    if ( p.rhs )
        predicates_of( *p.rhs, out );
}

void scope_into( const Formula& f, const OrgStructure* org, Scope& out )
{
    if ( f.op == Formula::Op::holds )
    {
        std::set<std::string> preds;
        predicates_of( *f.state, preds );
        for ( const auto& part : expand_part( f.part, org ) )
            out[part].insert( preds.begin(), preds.end() );
        return;
    }
    if ( f.lhs )
        scope_into( *f.lhs, org, out );
    if ( f.rhs )
        scope_into( *f.rhs, org, out );
}

} // namespace

Scope scope_of( const Formula& f, const OrgStructure* org )
{
    Scope out;
    scope_into( f, org, out );
    return out;
}

bool is_multi_trace( const Formula& f )
{
    if ( f.is_quantifier() && f.sort == Sort::trace )
        return true;
    return ( f.lhs && is_multi_trace( *f.lhs ) ) || ( f.rhs && is_multi_trace( *f.rhs ) );
}

} // namespace agrkit
