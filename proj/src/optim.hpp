#pragma once

// Small derivative-free helpers shared by the solvers.

#include <cmath>
#include <functional>
#include <vector>

namespace tsys::detail {

/// Golden-section search for a maximum of f on [l, r].
template <class F>
double golden_max(const F& f, double l, double r, int iters = 60) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double m1 = r - g * (r - l), m2 = l + g * (r - l);
    double v1 = f(m1), v2 = f(m2);
    for (int it = 0; it < iters && r - l > 1e-15 * (1.0 + std::abs(l)); ++it) {
        if (v1 < v2) {
            l = m1;
            m1 = m2;
            v1 = v2;
            m2 = l + g * (r - l);
            v2 = f(m2);
        } else {
            r = m2;
            m2 = m1;
            v2 = v1;
            m1 = r - g * (r - l);
            v1 = f(m1);
        }
    }
    return v1 > v2 ? m1 : m2;
}

/// Nelder-Mead minimization (GSL nmsimplex2). Non-finite values are treated as +huge.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                                double step, int iters);

}  // namespace tsys::detail
