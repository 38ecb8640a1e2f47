#include "tsys/grid.hpp"

#include <cmath>
#include <numbers>

#include "tsys/error.hpp"
#include "tsys/kernels.hpp"

namespace tsys {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> x(n);
    if (n == 1) {
        x[0] = a;
        return x;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    if (n > 1) x[n - 1] = b;
    return x;
}

std::vector<double> chebyshev_interior(double a, double b, std::size_t m) {
    std::vector<double> x(m);
    if (m == 0) return x;
    const double w = b - a;
    const double lo = a + w / (2.0 * m + 2.0);
    const double hi = b - w / (2.0 * m + 2.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = std::cos(std::numbers::pi * (2.0 * (m - 1 - i) + 1.0) / (2.0 * m));
        x[i] = m == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * 0.5 * (1.0 + t / std::cos(std::numbers::pi / (2.0 * m)));
    }
    return x;
}

std::vector<double> equispaced_interior(double a, double b, std::size_t m) {
    std::vector<double> x(m);
    for (std::size_t i = 0; i < m; ++i) x[i] = a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(m + 1);
    return x;
}

BasisTable tabulate(const FamilySpec& family, std::span<const double> xs, int order) {
    BasisTable t;
    t.nfun = family.size();
    t.npts = xs.size();
    t.x.assign(xs.begin(), xs.end());
    t.data.resize(t.nfun * t.npts);
    std::vector<double> v(t.nfun);
    for (std::size_t j = 0; j < t.npts; ++j) {
        family.eval_raw(xs[j], order, v.data());
        for (std::size_t i = 0; i < t.nfun; ++i) t.data[i * t.npts + j] = v[i];
    }
    return t;
}

std::vector<double> eval_table(const BasisTable& t, std::span<const double> coeffs) {
    if (coeffs.size() != t.nfun) throw Error(Errc::DimensionMismatch, "coefficients vs table");
    std::vector<double> out(t.npts);
    kernels::gemv_t(t.data.data(), t.nfun, t.npts, coeffs.data(), out.data());
    return out;
}

}  // namespace tsys
