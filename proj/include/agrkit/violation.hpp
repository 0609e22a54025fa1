#pragma once

#include <string>
#include <vector>

namespace agrkit
{

enum class Severity
{
    error,
    warning
};

/// A broken model rule. Validators return these as data; they never throw for them.
struct Violation
{
    std::string rule;
    std::vector<std::string> identifiers;
    std::string message;
    Severity severity = Severity::error;
};

[[nodiscard]] inline std::size_t error_count( const std::vector<Violation>& violations )
{
    std::size_t n = 0;
    for ( const auto& v : violations )
        if ( v.severity == Severity::error )
            ++n;
    return n;
}

} // namespace agrkit
