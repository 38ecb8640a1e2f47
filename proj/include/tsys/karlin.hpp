#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "tsys/family.hpp"
#include "tsys/zerocalc.hpp"

namespace tsys {

enum class SolverPath { newton, fixed_point };
[[nodiscard]] const char* solver_path_name(SolverPath p) noexcept;

enum class KarlinInit { chebyshev, equispaced };
enum class PositivityMode { positive, nonneg };

/// Gap vector of the double zeros of f_* and the per-segment ratios used by the equalization map.
struct SolverState {
    std::vector<double> xi;
    std::vector<double> deltas;
    std::vector<double> F;
};

struct KarlinOptions {
    KarlinInit init = KarlinInit::chebyshev;
    double tol = 1e-10;      ///< scaled tangency residual
    int max_iter = 100;
    std::size_t check_points = 5000;
    bool force_fixed_point = false;  ///< skip the first Newton attempt
};

struct KarlinDecomposition {
    SparsePoly f_lower;   ///< f_*
    SparsePoly f_upper;   ///< f^*
    ZeroConfig zeros_lower;
    ZeroConfig zeros_upper;
    std::vector<Zero> shared;  ///< zeros of f inherited by both parts
    double residual_sup = 0.0;
    double tangency_residual = 0.0;
    double min_lower = 0.0;  ///< grid minimum relative to the grid scale of f
    double min_upper = 0.0;
    int iterations = 0;
    bool converged = false;
    SolverPath path = SolverPath::newton;
    bool endpoint_forced = false;
    SolverState state;
    std::string note;
};

[[nodiscard]] KarlinDecomposition decompose_pos_ab(const SparsePoly& f, const KarlinOptions& opt = {});
[[nodiscard]] KarlinDecomposition decompose_nonneg_ab(const SparsePoly& f, const KarlinOptions& opt = {});
[[nodiscard]] KarlinDecomposition decompose_halfline(const SparsePoly& f, PositivityMode mode,
                                                     const KarlinOptions& opt = {});
[[nodiscard]] KarlinDecomposition decompose_realline(const SparsePoly& f, PositivityMode mode,
                                                     const KarlinOptions& opt = {});

/// Dispatches on the domain kind of f's family.
[[nodiscard]] KarlinDecomposition decompose(const SparsePoly& f, PositivityMode mode,
                                            const KarlinOptions& opt = {});

// Dense algebraic polynomials, coefficients ascending.

/// Closed product form of a nonnegative polynomial on [a,b], [a,inf) or R.
///   [a,b], even:  Z (alpha prod (x-x_i)^2 + beta (x-a)(b-x) prod (x-y_i)^2)
///   [a,b], odd:   Z (alpha (x-a) prod (x-x_i)^2 + beta (b-x) prod (x-y_i)^2)
///   [a,inf):      Z (alpha prod (x-x_i)^2 + beta (x-a) prod (x-y_i)^2)
///   R:            Z (alpha prod (x-x_i)^2 + beta prod (x-y_i)^2)
struct LukacsForm {
    DomainKind kind = DomainKind::real_line;
    std::vector<Zero> zfactors;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> x;
    std::vector<double> y;
    bool odd = false;  ///< parity of the degree left after removing zfactors
    /// The two terms (times Z) as dense coefficients, arranged as Karlin's f_* and f^*.
    std::vector<double> lower;
    std::vector<double> upper;
    double reconstruction_error = 0.0;  ///< relative to max |p_k|
};

/// degree is the nominal degree n (only relevant on [a,b], where p may have lower degree); -1 means deg p.
[[nodiscard]] LukacsForm lukacs_decompose(std::span<const double> p, const Domain& d, int degree = -1);

/// Roots via companion-matrix eigenvalues with a Newton polish.
[[nodiscard]] std::vector<std::complex<double>> poly_roots(std::span<const double> coeffs);

}  // namespace tsys
