#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace agrkit
{

[[nodiscard]] std::string sha256_hex( std::string_view bytes );

enum class ReportFormat
{
    text,
    records
};

/// Output of one CLI run. Every entry is a machine-readable record with a
/// human-readable line; the format picks which one is printed. Timing
/// records are excluded from the digest, so the digest depends only on
/// inputs and seed.
class RunReport
{
public:
    RunReport( ReportFormat format, std::ostream& out ) : _format( format ), _out( out ) {}

    void command( const std::vector<std::string>& argv );
    void digest( const std::string& label, std::string_view bytes );
    /// `type` becomes the record's "type" field.
    void record( const std::string& type, nlohmann::json fields, const std::string& line );
    /// Text-only output (tree renderings and similar); a "text" record in records mode.
    void text( const std::string& line );

    class Timer
    {
    public:
        Timer( RunReport& report, std::string phase ) : _report( report ), _phase( std::move( phase ) ), _start( std::chrono::steady_clock::now() ) {}
        ~Timer();
        Timer( const Timer& ) = delete;
        Timer& operator=( const Timer& ) = delete;

    private:
        RunReport& _report;
        std::string _phase;
        std::chrono::steady_clock::time_point _start;
    };

    [[nodiscard]] Timer time( std::string phase ) { return Timer( *this, std::move( phase ) ); }

    /// Emits timings and the summary record; returns `exit_code`.
    int finish( int exit_code );

    [[nodiscard]] std::string report_digest() const { return sha256_hex( _digest_input ); }

private:
    ReportFormat _format;
    std::ostream& _out;
    std::string _digest_input;
    std::vector<std::pair<std::string, double>> _timings;

    void emit( const nlohmann::json& rec, const std::string& line, bool digested );
};

} // namespace agrkit
