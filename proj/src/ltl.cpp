#include "agrkit/ltl.hpp"

#include "agrkit/error.hpp"

namespace agrkit
{

namespace
{

class Compiler
{
public:
    FormulaPtr operator()( const LtlFormula& f ) { return make::forall_time( "t0", translate( f ) ); }

private:
    int _fresh = 0;

    std::string fresh() { return "t" + std::to_string( ++_fresh ); }

    FormulaPtr translate( const LtlFormula& f )
    {
        switch ( f.op )
        {
        case LtlFormula::Op::constant: return make::constant( f.value );
        case LtlFormula::Op::negation: return make::negation( translate( *f.lhs ) );
        case LtlFormula::Op::conjunction: return make::conj( translate( *f.lhs ), translate( *f.rhs ) );
        case LtlFormula::Op::disjunction: return make::disj( translate( *f.lhs ), translate( *f.rhs ) );
        case LtlFormula::Op::implication: return make::implies( translate( *f.lhs ), translate( *f.rhs ) );
        case LtlFormula::Op::modal: return modal( f );
        }
        throw PreconditionError( "unknown LTL node" );
    }

    FormulaPtr at( long offset, const LtlFormula& f ) { return make::holds( TimeTerm::variable( "t0", offset ), f.part, f.state ); }

    FormulaPtr window( bool universal, TimeTerm lo, TimeTerm hi, const LtlFormula& f )
    {
        auto v = fresh();
        auto body = make::holds( TimeTerm::variable( v ), f.part, f.state );
        return make::quantifier( universal, Sort::time, v, body, lo, hi );
    }

    FormulaPtr modal( const LtlFormula& f )
    {
        const auto& c = f.constraint;
        auto now = TimeTerm::variable( "t0" );
        auto rel = [&]( long off ) { return TimeTerm::variable( "t0", off ); };
        switch ( f.modal )
        {
        case Modal::C: return at( 0, f );
        case Modal::X: return at( 1, f );
        case Modal::F:
        case Modal::G:
        {
            bool universal = f.modal == Modal::G;
            switch ( c.kind )
            {
            case TimeConstraint::Kind::none: return window( universal, now, TimeTerm::end(), f );
            case TimeConstraint::Kind::less: return window( universal, now, rel( c.bound - 1 ), f );
            case TimeConstraint::Kind::less_equal: return window( universal, now, rel( c.bound ), f );
            case TimeConstraint::Kind::exactly: return at( c.bound, f );
            }
            break;
        }
        case Modal::P:
        case Modal::H:
        {
            bool universal = f.modal == Modal::H;
            switch ( c.kind )
            {
            case TimeConstraint::Kind::none: return window( universal, TimeTerm::constant( 0 ), now, f );
            case TimeConstraint::Kind::less: return window( universal, rel( 1 - c.bound ), now, f );
            case TimeConstraint::Kind::less_equal: return window( universal, rel( -c.bound ), now, f );
            case TimeConstraint::Kind::exactly: return at( -c.bound, f );
            }
            break;
        }
        }
        throw PreconditionError( "unknown modal operator" );
    }
};

} // namespace

FormulaPtr compile_ltl( const LtlFormula& f ) { return Compiler()( f ); }

} // namespace agrkit
