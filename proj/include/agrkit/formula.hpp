#pragma once

#include "agrkit/trace.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace agrkit
{

// ---------------------------------------------------------------------------
// State properties

struct AtomArg
{
    enum class Kind
    {
        symbol,
        number,
        variable
    };

    Kind kind = Kind::symbol;
    std::string name; // symbol or variable name
    Number number;

    bool operator==( const AtomArg& ) const = default;
};

/// Atom with possibly variable arguments. `ground` is set when no argument is a variable.
struct AtomPattern
{
    std::string predicate;
    std::vector<AtomArg> args;
    std::optional<Atom> ground;

    bool operator==( const AtomPattern& other ) const { return predicate == other.predicate && args == other.args; }
};

[[nodiscard]] AtomPattern make_pattern( std::string predicate, std::vector<AtomArg> args );

struct StateProp;
using StatePropPtr = std::shared_ptr<const StateProp>;

/// Propositional formula over atoms, evaluated under the closed-world assumption.
struct StateProp
{
    enum class Op
    {
        atom,
        constant,
        negation,
        conjunction,
        disjunction,
        implication
    };

    Op op = Op::constant;
    AtomPattern atom;
    bool value = true;
    StatePropPtr lhs;
    StatePropPtr rhs;

    [[nodiscard]] static StatePropPtr make_atom( AtomPattern a );
    [[nodiscard]] static StatePropPtr make_constant( bool v );
    [[nodiscard]] static StatePropPtr make_not( StatePropPtr p );
    [[nodiscard]] static StatePropPtr make_binary( Op op, StatePropPtr l, StatePropPtr r );
};

[[nodiscard]] std::string to_string( const StateProp& p );

/// Closed-world evaluation of a ground state property. Throws TypeError when an
/// atom still has a variable argument.
[[nodiscard]] bool eval_state_prop( const State& state, const StateProp& prop );

/// Same over the union of several states, without materialising it.
[[nodiscard]] bool eval_state_prop( const std::vector<const State*>& states, const StateProp& prop );

// ---------------------------------------------------------------------------
// Dynamic properties: the reified temporal core

enum class Sort
{
    time,
    number,
    trace
};

[[nodiscard]] const char* to_string( Sort s );

/// `var + offset`, `offset`, or `end + offset` where `end` is the trace horizon.
struct TimeTerm
{
    enum class Base
    {
        constant,
        variable,
        end
    };

    Base base = Base::constant;
    std::string var;
    long offset = 0;

    [[nodiscard]] static TimeTerm constant( long c ) { return { Base::constant, {}, c }; }
    [[nodiscard]] static TimeTerm variable( std::string v, long off = 0 ) { return { Base::variable, std::move( v ), off }; }
    [[nodiscard]] static TimeTerm end( long off = 0 ) { return { Base::end, {}, off }; }

    bool operator==( const TimeTerm& ) const = default;
};

[[nodiscard]] std::string to_string( const TimeTerm& t );

struct NumTerm
{
    bool is_var = false;
    std::string var;
    Number value;

    bool operator==( const NumTerm& ) const = default;
};

enum class CmpOp
{
    lt,
    le,
    eq,
    ne,
    ge,
    gt
};

[[nodiscard]] const char* to_string( CmpOp op );

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// One node of the temporal core language.
struct Formula
{
    enum class Op
    {
        holds,
        constant,
        negation,
        conjunction,
        disjunction,
        implication,
        forall,
        exists,
        time_cmp,
        num_cmp
    };

    Op op = Op::constant;

    // holds
    std::string trace_var; // empty: the trace under check
    TimeTerm time;
    PartRef part;
    StatePropPtr state;

    // constant
    bool value = true;

    // connectives (negation uses lhs); quantifier body is lhs
    FormulaPtr lhs;
    FormulaPtr rhs;

    // quantifiers
    Sort sort = Sort::time;
    std::string var;
    std::optional<TimeTerm> lower;
    std::optional<TimeTerm> upper;

    // comparisons
    CmpOp cmp = CmpOp::le;
    TimeTerm time_lhs;
    TimeTerm time_rhs;
    NumTerm num_lhs;
    NumTerm num_rhs;

    [[nodiscard]] bool is_quantifier() const { return op == Op::forall || op == Op::exists; }
};

namespace make
{
[[nodiscard]] FormulaPtr holds( TimeTerm t, PartRef part, StatePropPtr s, std::string trace_var = {} );
[[nodiscard]] FormulaPtr constant( bool v );
[[nodiscard]] FormulaPtr negation( FormulaPtr f );
[[nodiscard]] FormulaPtr binary( Formula::Op op, FormulaPtr l, FormulaPtr r );
[[nodiscard]] FormulaPtr conj( FormulaPtr l, FormulaPtr r );
[[nodiscard]] FormulaPtr disj( FormulaPtr l, FormulaPtr r );
[[nodiscard]] FormulaPtr implies( FormulaPtr l, FormulaPtr r );
[[nodiscard]] FormulaPtr quantifier( bool universal, Sort sort, std::string var, FormulaPtr body, std::optional<TimeTerm> lower = {},
                                     std::optional<TimeTerm> upper = {} );
[[nodiscard]] FormulaPtr forall_time( std::string var, FormulaPtr body, std::optional<TimeTerm> lower = {}, std::optional<TimeTerm> upper = {} );
[[nodiscard]] FormulaPtr exists_time( std::string var, FormulaPtr body, std::optional<TimeTerm> lower = {}, std::optional<TimeTerm> upper = {} );
[[nodiscard]] FormulaPtr time_cmp( TimeTerm l, CmpOp op, TimeTerm r );
[[nodiscard]] FormulaPtr num_cmp( NumTerm l, CmpOp op, NumTerm r );
} // namespace make

/// Re-parseable TTL text (without the `ttl:` prefix).
[[nodiscard]] std::string to_string( const Formula& f );

/// Structural equality up to renaming of bound variables.
[[nodiscard]] bool alpha_equal( const Formula& a, const Formula& b );

/// True when some holds node omits the trace variable.
[[nodiscard]] bool uses_implicit_trace( const Formula& f );

/// Applies `fn` to every holds node's part, returning a rewritten copy.
[[nodiscard]] FormulaPtr map_parts( const FormulaPtr& f, const std::function<PartRef( const PartRef& )>& fn );

// ---------------------------------------------------------------------------
// Indexed LTL surface

enum class Modal
{
    C, // currently
    X, // next
    F, // sometime in the future
    G, // always in the future
    P, // sometime in the past
    H  // always in the past
};

[[nodiscard]] char to_char( Modal m );

struct TimeConstraint
{
    enum class Kind
    {
        none,
        less,       // < c
        less_equal, // <= c
        exactly     // = c
    };

    Kind kind = Kind::none;
    long bound = 0;

    bool operator==( const TimeConstraint& ) const = default;
};

struct LtlFormula;
using LtlPtr = std::shared_ptr<const LtlFormula>;

struct LtlFormula
{
    enum class Op
    {
        modal,
        constant,
        negation,
        conjunction,
        disjunction,
        implication
    };

    Op op = Op::constant;
    Modal modal = Modal::C;
    TimeConstraint constraint;
    PartRef part;
    StatePropPtr state;
    bool value = true;
    LtlPtr lhs;
    LtlPtr rhs;
};

[[nodiscard]] std::string to_string( const LtlFormula& f );

/// Applies `fn` to every modal operator's index.
[[nodiscard]] LtlPtr map_parts( const LtlPtr& f, const std::function<PartRef( const PartRef& )>& fn );

} // namespace agrkit
