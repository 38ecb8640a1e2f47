#include "tsys/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "tsys/error.hpp"

namespace tsys {

namespace {

GaussRule build(int n) {
    GaussRule r;
    r.x.resize(static_cast<std::size_t>(n));
    r.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[static_cast<std::size_t>(i)] = -z;
        r.x[static_cast<std::size_t>(n - 1 - i)] = z;
        r.w[static_cast<std::size_t>(i)] = w;
        r.w[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw Error(Errc::InvalidArgument, "Gauss rule needs at least one node");
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build(n)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels, int order) {
    const GaussRule& g = gauss_legendre(order);
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        double ps = 0.0;
        for (std::size_t k = 0; k < g.x.size(); ++k) ps += g.w[k] * f(c + 0.5 * h * g.x[k]);
        s += 0.5 * h * ps;
    }
    return s;
}

}  // namespace tsys
