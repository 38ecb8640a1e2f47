#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracle {

/// Leibniz expansion over all permutations, long double accumulation.
inline long double leibniz_det(const std::vector<std::vector<double>>& a) {
    const std::size_t n = a.size();
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    long double total = 0.0L;
    do {
        long double term = 1.0L;
        for (std::size_t i = 0; i < n; ++i) term *= a[i][p[i]];
        int inv = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (p[i] > p[j]) ++inv;
        total += (inv % 2 ? -term : term);
    } while (std::next_permutation(p.begin(), p.end()));
    return total;
}

inline long double vandermonde(const std::vector<double>& x) {
    long double p = 1.0L;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) p *= static_cast<long double>(x[j]) - x[i];
    return p;
}

/// Eigenvalues of a symmetric matrix by Sturm-count bisection on the tridiagonal-free
/// inertia: count of negative pivots in LDL' of (A - t I).
inline int count_below(const std::vector<std::vector<double>>& a, double t) {
    const std::size_t n = a.size();
    std::vector<std::vector<long double>> m(n, std::vector<long double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = a[i][j] - (i == j ? t : 0.0);
    int neg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        long double d = m[k][k];
        if (d == 0.0L) d = 1e-300L;
        if (d < 0) ++neg;
        for (std::size_t i = k + 1; i < n; ++i) {
            const long double f = m[i][k] / d;
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] -= f * m[k][j];
        }
    }
    return neg;
}

inline double min_eigenvalue(const std::vector<std::vector<double>>& a) {
    double r = 0.0;
    for (const auto& row : a) {
        double s = 0.0;
        for (double v : row) s += std::fabs(v);
        r = std::max(r, s);
    }
    double lo = -r - 1.0, hi = r + 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(a, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Minimises c'x over Ax = b, x >= 0 by enumerating every basis (tiny problems only).
inline bool brute_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                     const std::vector<double>& c, double& best) {
    const std::size_t m = A.size(), n = c.size();
    std::vector<int> sel(n, 0);
    std::fill(sel.end() - static_cast<std::ptrdiff_t>(m), sel.end(), 1);
    bool found = false;
    best = INFINITY;
    do {
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < n; ++j)
            if (sel[j]) cols.push_back(j);
        // Gaussian elimination on the m x m basis
        std::vector<std::vector<double>> M(m, std::vector<double>(m + 1));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < m; ++k) M[i][k] = A[i][cols[k]];
            M[i][m] = b[i];
        }
        bool singular = false;
        for (std::size_t k = 0; k < m && !singular; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < m; ++i)
                if (std::fabs(M[i][k]) > std::fabs(M[p][k])) p = i;
            if (std::fabs(M[p][k]) < 1e-12) {
                singular = true;
                break;
            }
            std::swap(M[p], M[k]);
            for (std::size_t i = 0; i < m; ++i) {
                if (i == k) continue;
                const double f = M[i][k] / M[k][k];
                for (std::size_t j = k; j <= m; ++j) M[i][j] -= f * M[k][j];
            }
        }
        if (singular) continue;
        double obj = 0.0;
        bool feas = true;
        for (std::size_t k = 0; k < m; ++k) {
            const double xk = M[k][m] / M[k][k];
            if (xk < -1e-10) feas = false;
            obj += c[cols[k]] * xk;
        }
        if (feas && obj < best) {
            best = obj;
            found = true;
        }
    } while (std::next_permutation(sel.begin(), sel.end()));
    return found;
}

}  // namespace oracle
