#pragma once

#include <functional>
#include <vector>

namespace tsys {

struct GaussRule {
    std::vector<double> x;  ///< nodes on [-1, 1]
    std::vector<double> w;
};

/// n-point Gauss-Legendre rule, cached.
[[nodiscard]] const GaussRule& gauss_legendre(int n);

/// Composite Gauss-Legendre over [a, b] with equal panels.
[[nodiscard]] double integrate(const std::function<double(double)>& f, double a, double b, int panels,
                               int order = 8);

}  // namespace tsys
