#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsys/family.hpp"
#include "tsys/linalg.hpp"

namespace tsys {

struct Atom {
    double x = 0.0;
    double w = 0.0;
};

struct AtomicMeasure {
    std::vector<Atom> atoms;
};

/// s_i = L(f_i)
struct MomentFunctional {
    FamilySpec family;
    std::vector<double> values;

    [[nodiscard]] double apply(std::span<const double> coeffs) const;
    [[nodiscard]] double apply(const SparsePoly& p) const { return apply(p.coeffs); }
};

[[nodiscard]] std::vector<double> moments_of(const FamilySpec& family, const AtomicMeasure& mu);

// Hankel criteria for power moment sequences.

enum class HankelVariant { hamburger, stieltjes, hausdorff, svenco };
[[nodiscard]] const char* hankel_variant_name(HankelVariant v) noexcept;
[[nodiscard]] HankelVariant parse_hankel_variant(const std::string& s);

struct HankelMatrixVerdict {
    std::string label;  ///< "H(s)", "H(Xs)", ...
    Mat matrix;
    double min_eigenvalue = 0.0;
    bool psd = true;
};

struct HankelVerdict {
    HankelVariant variant = HankelVariant::hamburger;
    std::vector<HankelMatrixVerdict> matrices;
    bool psd = true;
};

/// PSD means min eigenvalue >= -tol * max(1, max |entry|).
[[nodiscard]] HankelVerdict hankel_check(std::span<const double> s, HankelVariant v, double tol = 1e-10);

// Extremal polynomials with zero sets of index n.

enum class Pattern {
    interior_doubles,       ///< n = 2m: m interior double zeros
    endpoints_and_doubles,  ///< n = 2m on [a,b]: a, b and m-1 doubles
    left_and_doubles,       ///< n = 2m+1: a and m doubles
    doubles_and_right,      ///< n = 2m+1 on [a,b]: m doubles and b
    doubles_at_infinity,    ///< n = 2m+1 on a half-line: m doubles, f_n coefficient 0
    left_doubles_at_infinity,  ///< n = 2m on a half-line: a, m-1 doubles, f_n coefficient 0
};
[[nodiscard]] const char* pattern_name(Pattern p) noexcept;
[[nodiscard]] Pattern parse_pattern(const std::string& s);

/// The index-n patterns available for the family's size and domain.
[[nodiscard]] std::vector<Pattern> patterns_for(const FamilySpec& family);
/// Number of interior double zeros the pattern takes.
[[nodiscard]] int pattern_doubles(const FamilySpec& family, Pattern p);

/// Nonnegative polynomial with the pattern's zeros; theta holds the increasing interior zeros.
[[nodiscard]] SparsePoly extremal_test_poly(const FamilySpec& family, Pattern p, std::span<const double> theta);

// Truncated moment feasibility.

enum class Feasibility { feasible, infeasible, undecided };
[[nodiscard]] const char* feasibility_name(Feasibility f) noexcept;

struct FeasibilityOptions {
    std::size_t grid = 2001;
    int refinements = 2;
    int starts = 24;
    std::uint64_t seed = 20240917;
    double tol = 1e-8;
    int jobs = 1;
};

struct FeasibilityVerdict {
    Feasibility status = Feasibility::undecided;
    std::optional<AtomicMeasure> witness;
    std::optional<SparsePoly> certificate;  ///< nonnegative on the domain with L(p) < 0
    double certificate_value = 0.0;          ///< L(p) for the normalized certificate
    double witness_residual = 0.0;           ///< max |s - moments(witness)| / max |s|
    double gap = 0.0;                        ///< phase-1 infeasibility of the grid LP
    double window = 0.0;                     ///< truncation point on unbounded domains
    double determinacy_sum = 0.0;            ///< sum 1/|alpha_i| over nonzero exponents
    std::string note;
};

[[nodiscard]] FeasibilityVerdict sparse_feasibility(const MomentFunctional& L, const FeasibilityOptions& opt = {});

struct RecoveryResult {
    AtomicMeasure measure;
    double residual = 0.0;  ///< max |s - moments| / max |s|
    bool polished = true;
};

[[nodiscard]] RecoveryResult recover_atoms(const MomentFunctional& L, const FeasibilityOptions& opt = {});

}  // namespace tsys
