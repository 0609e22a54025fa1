#include "agrkit/report.hpp"

#include "agrkit/error.hpp"

#include <openssl/evp.h>

#include <cstdio>

namespace agrkit
{

std::string sha256_hex( std::string_view bytes )
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if ( EVP_Digest( bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr ) != 1 )
        throw Error( "SHA-256 digest failed" );
    std::string hex;
    hex.reserve( 2 * len );
    char buf[3];
    for ( unsigned int i = 0; i < len; ++i )
    {
        std::snprintf( buf, sizeof buf, "%02x", md[i] );
        hex += buf;
    }
    return hex;
}

void RunReport::emit( const nlohmann::json& rec, const std::string& line, bool digested )
{
    auto dumped = rec.dump();
    if ( digested )
        _digest_input += dumped + "\n";
    if ( _format == ReportFormat::records )
        _out << dumped << "\n";
    else
        _out << line << "\n";
}

void RunReport::command( const std::vector<std::string>& argv )
{
    std::string line = "agrkit";
    for ( const auto& a : argv )
        line += " " + a;
    emit( { { "type", "command" }, { "argv", argv } }, "# " + line, true );
}

void RunReport::digest( const std::string& label, std::string_view bytes )
{
    auto hex = sha256_hex( bytes );
    emit( { { "type", "digest" }, { "input", label }, { "sha256", hex } }, "# sha256 " + hex + "  " + label, true );
}

void RunReport::record( const std::string& type, nlohmann::json fields, const std::string& line )
{
    nlohmann::json rec = { { "type", type } };
    rec.update( fields );
    emit( rec, line, true );
}

void RunReport::text( const std::string& line ) { emit( { { "type", "text" }, { "line", line } }, line, true ); }

RunReport::Timer::~Timer()
{
    auto ms = std::chrono::duration<double, std::milli>( std::chrono::steady_clock::now() - _start ).count();
    _report._timings.emplace_back( _phase, ms );
}

int RunReport::finish( int exit_code )
{
    std::string line = "# timings:";
    for ( const auto& [phase, ms] : _timings )
    {
        char buf[64];
        std::snprintf( buf, sizeof buf, " %s=%.1fms", phase.c_str(), ms );
        line += buf;
        if ( _format == ReportFormat::records )
            _out << nlohmann::json{ { "type", "timing" }, { "phase", phase }, { "ms", ms } }.dump() << "\n";
    }
    if ( _format == ReportFormat::text && !_timings.empty() )
        _out << line << "\n";
    auto digest = report_digest();
    if ( _format == ReportFormat::records )
        _out << nlohmann::json{ { "type", "summary" }, { "exit", exit_code }, { "report_sha256", digest } }.dump() << "\n";
    else
        _out << "# exit " << exit_code << ", report sha256 " << digest << "\n";
    return exit_code;
}

} // namespace agrkit
