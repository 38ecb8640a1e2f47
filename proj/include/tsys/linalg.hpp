#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace tsys {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MatLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

/// Largest dimension accepted by the certifying determinant.
inline constexpr int kDetDimCap = 12;

/// Partial-pivot LU determinant accumulated in long double.
[[nodiscard]] long double det_ld(const Mat& m);
[[nodiscard]] long double det_ld(const MatLd& m);
[[nodiscard]] inline double det(const Mat& m) { return static_cast<double>(det_ld(m)); }

/// Product of row max-norms; the scale in the nonvanishing test.
[[nodiscard]] double row_norm_product(const Mat& m);

/// |det| > rel * row_norm_product
[[nodiscard]] bool det_nonvanishing(const Mat& m, double rel = 1e-12);

/// Signed cofactors along a symbolic first row: c_i = (-1)^i det(rows with column i removed).
/// rows is n x (n+1).
[[nodiscard]] std::vector<double> bordered_cofactors(const Mat& rows);

/// Dense solve with full pivoting.
[[nodiscard]] Vec solve(const Mat& a, const Vec& b);

}  // namespace tsys
