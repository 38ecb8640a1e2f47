#include "tsys/linalg.hpp"

#include <cmath>
#include <utility>

#include "tsys/error.hpp"

namespace tsys {

long double det_ld(const Mat& m) { return det_ld(MatLd(m.cast<long double>())); }

long double det_ld(const MatLd& m) {
    if (m.rows() != m.cols()) throw Error(Errc::DimensionMismatch, "determinant of a non-square matrix");
    const int n = static_cast<int>(m.rows());
    if (n > kDetDimCap) throw Error(Errc::DimensionMismatch, "determinant dimension above cap 12");
    if (n == 0) return 1.0L;
    long double a[kDetDimCap][kDetDimCap];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i][j] = m(i, j);
    long double d = 1.0L;
    for (int k = 0; k < n; ++k) {
        int p = k;
        long double best = std::fabs(a[k][k]);
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a[i][k]) > best) {
                best = std::fabs(a[i][k]);
                p = i;
            }
        if (best == 0.0L) return 0.0L;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a[k][j], a[p][j]);
            d = -d;
        }
        d *= a[k][k];
        for (int i = k + 1; i < n; ++i) {
            const long double f = a[i][k] / a[k][k];
            for (int j = k + 1; j < n; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return d;
}

double row_norm_product(const Mat& m) {
    double p = 1.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) p *= m.row(i).cwiseAbs().maxCoeff();
    return p;
}

bool det_nonvanishing(const Mat& m, double rel) {
    return std::fabs(det(m)) > rel * row_norm_product(m);
}

std::vector<double> bordered_cofactors(const Mat& rows) {
    const Eigen::Index n = rows.rows();
    if (rows.cols() != n + 1) throw Error(Errc::DimensionMismatch, "bordered rows must be n x (n+1)");
    std::vector<double> c(static_cast<std::size_t>(n + 1));
    Mat minor(n, n);
    for (Eigen::Index i = 0; i <= n; ++i) {
        for (Eigen::Index j = 0, jj = 0; j <= n; ++j) {
            if (j == i) continue;
            minor.col(jj++) = rows.col(j);
        }
        const double s = (i % 2 == 0) ? 1.0 : -1.0;
        c[static_cast<std::size_t>(i)] = s * det(minor);
    }
    return c;
}

Vec solve(const Mat& a, const Vec& b) { return a.fullPivLu().solve(b); }

}  // namespace tsys
