#pragma once

#include "tsys/linalg.hpp"

namespace tsys {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::iteration_limit;
    Vec x;          ///< primal, length N
    Vec y;          ///< dual: optimal duals, or the Farkas ray when infeasible
    double objective = 0.0;
    double infeasibility = 0.0;  ///< phase-1 optimum (sum of artificials, scaled units)
    int iterations = 0;
};

struct LpOptions {
    int max_iterations = 20000;
    double tol = 1e-10;
};

/// min c'x  s.t.  A x = b, x >= 0.  Dense revised simplex with explicit basis inverse,
/// meant for few rows and many columns.
///
/// When infeasible, y satisfies y'A_j <= 0 for all columns and y'b > 0.
[[nodiscard]] LpResult solve_lp(const Mat& A, const Vec& b, const Vec& c, const LpOptions& opt = {});

}  // namespace tsys
