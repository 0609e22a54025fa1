#pragma once

#include "agrkit/dynamics.hpp"
#include "agrkit/interlevel.hpp"
#include "agrkit/structure.hpp"

#include <string>
#include <string_view>

namespace agrkit
{

/// Everything a model file declares.
struct Model
{
    AGRDyn dyn; // holds the organisation structure
    AuthorityAnnotations authority;
    InterlevelAssignment relations; // `relation` declarations, possibly none

    [[nodiscard]] const OrgStructure& org() const { return dyn.org; }
};

/// Parses the model DSL. Throws ParseError (with line numbers) for syntax
/// errors and for property type errors.
[[nodiscard]] Model parse_model( std::string_view text );
[[nodiscard]] Model load_model( const std::string& path );

/// Parses a file of `relation` declarations against a model.
[[nodiscard]] InterlevelAssignment parse_assignment( std::string_view text );
[[nodiscard]] InterlevelAssignment load_assignment( const std::string& path );

/// Structure, authority, dynamics and (when declared) relation checks.
[[nodiscard]] std::vector<Violation> validate_model( const Model& m );

/// Parses one property text against a structure: bare names that denote
/// groups become group parts, LTL is compiled, atoms are type-checked.
/// Throws ParseError / TypeError.
[[nodiscard]] DynProperty make_property( const AGRDyn& dyn, Identifier id, Filing filing, Identifier element, std::string text );

} // namespace agrkit
