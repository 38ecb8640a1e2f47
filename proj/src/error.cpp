#include "tsys/error.hpp"

namespace tsys {

const char* errc_name(Errc c) noexcept {
    switch (c) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::DomainViolation: return "DomainViolation";
        case Errc::NonDifferentiable: return "NonDifferentiable";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::InvalidNodes: return "InvalidNodes";
        case Errc::NonPositiveLeadFunction: return "NonPositiveLeadFunction";
        case Errc::CertificationRequired: return "CertificationRequired";
        case Errc::IndexTooLarge: return "IndexTooLarge";
        case Errc::ZeroPolynomial: return "ZeroPolynomial";
        case Errc::InvariantViolation: return "InvariantViolation";
        case Errc::NotPositive: return "NotPositive";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::TooManyZeros: return "TooManyZeros";
        case Errc::OddInteriorMultiplicity: return "OddInteriorMultiplicity";
        case Errc::LeadingCoefficientNonpositive: return "LeadingCoefficientNonpositive";
        case Errc::ValueAtZeroNonpositive: return "ValueAtZeroNonpositive";
        case Errc::OddDegree: return "OddDegree";
        case Errc::NegativeLeading: return "NegativeLeading";
        case Errc::NegativeSomewhere: return "NegativeSomewhere";
        case Errc::NoSeparator: return "NoSeparator";
        case Errc::ExchangeStall: return "ExchangeStall";
        case Errc::SNotStrictlyPositive: return "SNotStrictlyPositive";
        case Errc::TooShort: return "TooShort";
        case Errc::NotFeasible: return "NotFeasible";
        case Errc::PolishDiverged: return "PolishDiverged";
        case Errc::QuadratureBudgetExceeded: return "QuadratureBudgetExceeded";
        case Errc::TailNotDominated: return "TailNotDominated";
        case Errc::Parse: return "Parse";
    }
    return "Unknown";
}

}  // namespace tsys
