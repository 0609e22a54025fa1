#pragma once

// Random closed TTL formulas over a small vocabulary, emitted as text so the
// parser is exercised along the way.

#include "common.hpp"

#include <random>
#include <string>
#include <vector>

namespace gen
{

struct Options
{
    int depth = 3;
    int max_const_time = 8;
    bool numeric = true;   // allow number quantifiers
    bool unbounded = true; // allow quantifiers without an interval
    bool end = true;       // allow `end` in time terms
};

class Ttl
{
public:
    explicit Ttl( std::mt19937_64& rng, Options o = {} ) : _rng( rng ), _o( o ) {}

    std::string operator()()
    {
        _time.clear();
        _num.clear();
        _next = 0;
        return formula( _o.depth );
    }

private:
    std::mt19937_64& _rng;
    Options _o;
    std::vector<std::string> _time, _num;
    int _next = 0;

    int pick( int lo, int hi ) { return std::uniform_int_distribution<int>( lo, hi )( _rng ); }
    template<class V> const auto& choose( const V& v ) { return v[static_cast<std::size_t>( pick( 0, static_cast<int>( v.size() ) - 1 ) )]; }

    std::string time_term()
    {
        if ( !_time.empty() && pick( 0, 3 ) > 0 )
        {
            int off = pick( -2, 2 );
            std::string v = choose( _time );
            return off == 0 ? v : off > 0 ? v + "+" + std::to_string( off ) : v + "-" + std::to_string( -off );
        }
        if ( _o.end && pick( 0, 5 ) == 0 )
            return "end";
        return std::to_string( pick( 0, _o.max_const_time ) );
    }

    std::string state_prop( int depth )
    {
        static const std::vector<std::string> atoms = { "p", "q", "lvl(0)", "lvl(1)", "lvl(2)" };
        int k = depth <= 0 ? 0 : pick( 0, 4 );
        switch ( k )
        {
        case 1: return "!" + state_prop( depth - 1 );
        case 2: return "(" + state_prop( depth - 1 ) + " & " + state_prop( depth - 1 ) + ")";
        case 3: return "(" + state_prop( depth - 1 ) + " | " + state_prop( depth - 1 ) + ")";
        default:
            if ( !_num.empty() && pick( 0, 1 ) == 0 )
                return "lvl(" + choose( _num ) + ")";
            return choose( atoms );
        }
    }

    std::string leaf()
    {
        static const std::vector<std::string> parts = { "input(a)", "output(a)", "role(a)", "input(b)" };
        int k = pick( 0, 9 );
        if ( k == 0 && !_time.empty() )
        {
            static const std::vector<std::string> ops = { "<", "<=", "=", "!=", ">=", ">" };
            return time_term() + " " + choose( ops ) + " " + time_term();
        }
        if ( k == 1 && !_num.empty() )
        {
            static const std::vector<std::string> ops = { "<", "<=", "=", "!=" };
            std::string rhs = pick( 0, 1 ) ? choose( _num ) : std::to_string( pick( 0, 2 ) );
            return choose( _num ) + " " + choose( ops ) + " " + rhs;
        }
        return "holds(" + time_term() + ", " + choose( parts ) + ", " + state_prop( 1 ) + ")";
    }

    std::string fresh( char prefix ) { return std::string( 1, prefix ) + std::to_string( _next++ ); }

    std::string formula( int depth )
    {
        int k = depth <= 0 ? 0 : pick( 0, 7 );
        switch ( k )
        {
        case 1: return "!" + formula( depth - 1 );
        case 2: return "(" + formula( depth - 1 ) + " & " + formula( depth - 1 ) + ")";
        case 3: return "(" + formula( depth - 1 ) + " | " + formula( depth - 1 ) + ")";
        case 4: return "(" + formula( depth - 1 ) + " => " + formula( depth - 1 ) + ")";
        case 5:
        case 6:
        {
            std::string q = pick( 0, 1 ) ? "forall " : "exists ";
            std::string v = fresh( 't' );
            std::string head = q + v;
            if ( !_o.unbounded || pick( 0, 1 ) )
                head += " in [" + time_term() + ", " + time_term() + "]";
            _time.push_back( v );
            auto body = formula( depth - 1 );
            _time.pop_back();
            return "(" + head + " . " + body + ")";
        }
        case 7:
        {
            if ( !_o.numeric )
                return formula( depth );
            std::string q = pick( 0, 1 ) ? "forall " : "exists ";
            std::string v = fresh( 'v' );
            _num.push_back( v );
            auto body = formula( depth - 1 );
            _num.pop_back();
            return "(" + q + v + " : num . " + body + ")";
        }
        default: return leaf();
        }
    }
};

inline testing_support::Vocabulary vocabulary()
{
    using testing_support::atom;
    return { { testing_support::in( "a" ), testing_support::out( "a" ), testing_support::in( "b" ), testing_support::out( "b" ) },
             { atom( "p" ), atom( "q" ), atom( "lvl", { agrkit::Number( 0 ) } ), atom( "lvl", { agrkit::Number( 1 ) } ),
               atom( "lvl", { agrkit::Number( 2 ) } ) } };
}

} // namespace gen
