#pragma once

#include <stdexcept>
#include <string>

namespace tsys {

enum class Errc {
    InvalidArgument,
    DomainViolation,
    NonDifferentiable,
    DimensionMismatch,
    InvalidNodes,
    NonPositiveLeadFunction,
    CertificationRequired,
    IndexTooLarge,
    ZeroPolynomial,
    InvariantViolation,
    NotPositive,
    NoConvergence,
    TooManyZeros,
    OddInteriorMultiplicity,
    LeadingCoefficientNonpositive,
    ValueAtZeroNonpositive,
    OddDegree,
    NegativeLeading,
    NegativeSomewhere,
    NoSeparator,
    ExchangeStall,
    SNotStrictlyPositive,
    TooShort,
    NotFeasible,
    PolishDiverged,
    QuadratureBudgetExceeded,
    TailNotDominated,
    Parse,
};

[[nodiscard]] const char* errc_name(Errc c) noexcept;

/// Single exception type for the library; the code is the machine-readable part.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace tsys
