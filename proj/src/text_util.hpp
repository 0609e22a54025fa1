#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace agrkit::detail
{

std::string_view trim( std::string_view s );

/// Drops everything from the first '#'.
std::string_view strip_comment( std::string_view s );

std::vector<std::string_view> split_ws( std::string_view s );

std::vector<std::string> split_lines( std::string_view text );

/// A declaration after joining `\` continuations and dropping comments.
struct LogicalLine
{
    int line = 0; // 1-based number of the first physical line
    std::string text;
};

/// Non-blank logical lines of a DSL file.
std::vector<LogicalLine> logical_lines( std::string_view text );

/// Throws Error when the file cannot be read.
std::string read_file( const std::string& path );

void write_file( const std::string& path, const std::string& content );

} // namespace agrkit::detail
