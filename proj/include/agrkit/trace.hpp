#pragma once

#include "agrkit/structure.hpp"

#include <boost/rational.hpp>

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace agrkit
{

/// Exact numeric atom argument.
using Number = boost::rational<long long>;

/// Atom argument: a symbol or an exact rational.
using Value = std::variant<std::string, Number>;

[[nodiscard]] std::string to_string( const Number& n );
[[nodiscard]] std::string to_string( const Value& v );

/// Parses `p/q` or an integer. Throws ParseError.
[[nodiscard]] Number parse_number( std::string_view text );

struct Atom
{
    std::string predicate;
    std::vector<Value> args;

    bool operator==( const Atom& other ) const = default;
    bool operator<( const Atom& other ) const;
};

[[nodiscard]] std::string to_string( const Atom& atom );

/// Parses `pred` or `pred(a1,...,ak)`. Throws ParseError.
[[nodiscard]] Atom parse_atom( std::string_view text );

enum class ArgKind
{
    any,
    symbol,
    number
};

struct Signature
{
    std::string predicate;
    std::vector<ArgKind> kinds;

    [[nodiscard]] std::size_t arity() const { return kinds.size(); }
    [[nodiscard]] bool accepts( const Atom& atom ) const;
    bool operator==( const Signature& ) const = default;
};

[[nodiscard]] std::string to_string( const Signature& sig );

/// A state ontology: a set of predicate signatures, unique by name.
struct Ontology
{
    std::map<std::string, Signature> signatures;

    /// Throws TypeError when the predicate is already declared with another signature.
    void add( const Signature& sig );
    [[nodiscard]] const Signature* find( const std::string& predicate ) const;
    [[nodiscard]] bool declares( const std::string& predicate ) const { return find( predicate ) != nullptr; }
    /// Signatures of `other` missing from this ontology.
    [[nodiscard]] std::vector<Signature> missing_from( const Ontology& other ) const;
    void merge( const Ontology& other );
    [[nodiscard]] bool empty() const { return signatures.empty(); }
};

enum class Direction
{
    input,
    output
};

/// A stored part of a trace: the input or the output interface of one role.
struct AtomicPart
{
    Direction direction;
    Identifier role;

    auto operator<=>( const AtomicPart& ) const = default;
};

[[nodiscard]] std::string to_string( const AtomicPart& part );

enum class PartKind
{
    input,
    output,
    role,
    group,
    organisation
};

/// Reference to a part of the organisation. Aggregates (role, group,
/// organisation) denote the union of their atomic parts. A non-empty
/// `alias_members` turns an input/output part of an agent into the union of
/// the role parts that agent fulfils.
struct PartRef
{
    PartKind kind = PartKind::organisation;
    Identifier name;
    std::vector<AtomicPart> alias_members;

    [[nodiscard]] static PartRef input( Identifier r ) { return { PartKind::input, std::move( r ), {} }; }
    [[nodiscard]] static PartRef output( Identifier r ) { return { PartKind::output, std::move( r ), {} }; }
    [[nodiscard]] static PartRef role( Identifier r ) { return { PartKind::role, std::move( r ), {} }; }
    [[nodiscard]] static PartRef group( Identifier g ) { return { PartKind::group, std::move( g ), {} }; }
    [[nodiscard]] static PartRef organisation() { return { PartKind::organisation, {}, {} }; }
    [[nodiscard]] static PartRef of( const AtomicPart& p )
    {
        return p.direction == Direction::input ? input( p.role ) : output( p.role );
    }

    [[nodiscard]] bool is_atomic() const { return ( kind == PartKind::input || kind == PartKind::output ) && alias_members.empty(); }
    [[nodiscard]] AtomicPart atomic() const;

    bool operator==( const PartRef& ) const = default;
    bool operator<( const PartRef& other ) const;
};

[[nodiscard]] std::string to_string( const PartRef& part );

/// Parses `input(r)`, `output(r)`, `role(r)`, `group(g)` or `organisation`.
[[nodiscard]] PartRef parse_part( std::string_view text );

/// Atomic parts a reference stands for. Needs `org` for groups and the
/// organisation; throws UnknownIdentifier for undeclared names when `org` is given.
[[nodiscard]] std::vector<AtomicPart> expand_part( const PartRef& part, const OrgStructure* org );

/// A closed-world state: the set of true atoms, kept sorted.
class State
{
public:
    State() = default;
    State( std::initializer_list<Atom> atoms );

    [[nodiscard]] bool contains( const Atom& atom ) const;
    bool insert( Atom atom );
    void merge( const State& other );

    [[nodiscard]] bool empty() const { return _atoms.empty(); }
    [[nodiscard]] std::size_t size() const { return _atoms.size(); }
    [[nodiscard]] auto begin() const { return _atoms.begin(); }
    [[nodiscard]] auto end() const { return _atoms.end(); }

    bool operator==( const State& ) const = default;

private:
    std::vector<Atom> _atoms;
};

/// A finite trace over the time frame 0..horizon. Only atomic parts carry
/// state; a part without stored atoms has the empty state at every time.
class Trace
{
public:
    using Column = std::vector<State>;

    Trace() = default;
    Trace( std::string id, int horizon );

    [[nodiscard]] const std::string& id() const { return _id; }
    [[nodiscard]] int horizon() const { return _horizon; }

    /// Throws PreconditionError when t is outside 0..horizon.
    void insert( int t, const AtomicPart& part, Atom atom );

    [[nodiscard]] const State& at( int t, const AtomicPart& part ) const;
    [[nodiscard]] const Column* column( const AtomicPart& part ) const;
    [[nodiscard]] const std::map<AtomicPart, Column>& columns() const { return _columns; }

    /// Copy with a larger horizon; the new frames are empty.
    [[nodiscard]] Trace extended( int horizon ) const;
    void set_id( std::string id ) { _id = std::move( id ); }

    [[nodiscard]] std::size_t atom_count() const;

    bool operator==( const Trace& ) const = default;

private:
    std::string _id = "trace";
    int _horizon = 0;
    std::map<AtomicPart, Column> _columns;
};

/// State of any part at time t: atomic parts return their frame, aggregates
/// the union over their atomic parts. Throws PreconditionError for t out of
/// range and UnknownIdentifier for unresolvable parts.
[[nodiscard]] State state_at( const Trace& trace, int t, const PartRef& part, const OrgStructure* org = nullptr );

/// What read_trace checks parts and atoms against. Any null member disables that check.
struct TraceSchema
{
    const OrgStructure* org = nullptr;
    const std::map<Identifier, Ontology>* input_ontologies = nullptr;
    const std::map<Identifier, Ontology>* output_ontologies = nullptr;

    /// Throws UnknownIdentifier / TypeError when part or atom does not fit.
    void check( const AtomicPart& part, const Atom& atom ) const;
};

/// One `<t> <part> <atom>` body line.
struct TimedAtom
{
    int time = 0;
    AtomicPart part;
    Atom atom;
};

/// Parses a body line; `line_no` is used in errors.
[[nodiscard]] TimedAtom parse_timed_atom( std::string_view line, int line_no );

/// Reads the trace text format: header `trace <id> horizon <T>`, then
/// `<t> <part> <atom>` lines. `#` starts a comment.
[[nodiscard]] Trace read_trace( std::string_view text, const TraceSchema& schema = {} );

/// Canonical form: sorted by time, then part, then atom.
[[nodiscard]] std::string write_trace( const Trace& trace );

[[nodiscard]] Trace load_trace( const std::string& path, const TraceSchema& schema = {} );
void save_trace( const Trace& trace, const std::string& path );

} // namespace agrkit
