#pragma once

#include <ostream>

namespace agrkit
{

/// Exit codes of the command-line tool.
namespace exit_code
{
inline constexpr int ok = 0;
inline constexpr int violation = 1; // violations found or a property fails
inline constexpr int error = 2;     // usage, I/O or parse error
inline constexpr int inconclusive = 3;
} // namespace exit_code

/// Entry point of the `agrkit` tool, separated from main for testing.
int run_cli( int argc, const char* const* argv, std::ostream& out, std::ostream& err );

} // namespace agrkit
