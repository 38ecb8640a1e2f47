#include "tsys/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "tsys/error.hpp"
#include "tsys/linalg.hpp"
#include "tsys/quadrature.hpp"

namespace tsys {

namespace {

constexpr int kRule = 8;
constexpr long kMaxNodes = 1L << 20;

// Probabilists' Hermite polynomial He_k(u).
double hermite(int k, double u) {
    double h0 = 1.0, h1 = u;
    if (k == 0) return h0;
    for (int j = 1; j < k; ++j) {
        const double h2 = u * h1 - j * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

double gauss_density(double u) {
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

void check_kernel(const KernelSpec& k) {
    if (k.kind == KernelKind::custom && !k.custom) throw Error(Errc::InvalidArgument, "custom kernel without evaluator");
    if (k.kind == KernelKind::gaussian) {
        if (!(k.sigma > 0.0)) throw Error(Errc::InvalidArgument, fmt::format("sigma must be positive, got {}", k.sigma));
        if (!(k.truncation >= 4.0))
            throw Error(Errc::InvalidArgument, fmt::format("truncation must be >= 4 sigma, got {}", k.truncation));
        if (k.panels < 1) throw Error(Errc::InvalidArgument, "need at least one panel");
        if (static_cast<long>(k.panels) * kRule > kMaxNodes)
            throw Error(Errc::QuadratureBudgetExceeded,
                        fmt::format("{} panels exceed the node budget of {}", k.panels, kMaxNodes));
    }
}

}  // namespace

double KernelSpec::operator()(double x, double y, int dy) const {
    if (kind == KernelKind::custom) return custom(x, y, dy);
    const double u = (x - y) / sigma;
    return std::pow(sigma, -dy) * hermite(dy, u) * gauss_density(u) / sigma;
}

FamilySpec gaussian_smooth(const FamilySpec& family, const KernelSpec& kernel) {
    check_kernel(kernel);
    if (kernel.kind != KernelKind::gaussian) throw Error(Errc::InvalidArgument, "smoothing needs a gaussian kernel");
    const Domain& d = family.domain();
    if (d.kind != DomainKind::closed_interval) throw Error(Errc::InvalidArgument, "smoothing needs a closed interval");
    const FamilySpec base = family;
    const double s = kernel.sigma, T = kernel.truncation;
    const int panels = kernel.panels;
    const std::size_t N = family.size();
    const int order_cap = std::max(1, family.n());
    auto eval = [base, s, T, panels, N](double x, int order, double* out) {
        const Domain& dd = base.domain();
        const GaussRule& g = gauss_legendre(kRule);
        std::fill(out, out + N, 0.0);
        std::vector<double> fv(N);
        const double lo = x - T * s, hi = x + T * s;
        // pieces split at the kinks of the constant continuation
        std::vector<double> cuts{lo};
        for (double c : {dd.a, dd.b})
            if (c > lo && c < hi) cuts.push_back(c);
        cuts.push_back(hi);
        const double sign = order % 2 ? -1.0 : 1.0;
        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            const double l = cuts[p], r = cuts[p + 1];
            const int np = std::max(1, static_cast<int>(std::ceil(panels * (r - l) / (hi - lo))));
            const double h = (r - l) / np;
            for (int q = 0; q < np; ++q) {
                const double c0 = l + q * h;
                for (std::size_t k = 0; k < g.x.size(); ++k) {
                    const double y = c0 + 0.5 * h * (g.x[k] + 1.0);
                    const double w = 0.5 * h * g.w[k];
                    const double u = (x - y) / s;
                    const double kv = sign * std::pow(s, -order) * hermite(order, u) * gauss_density(u) / s;
                    base.eval_raw(std::clamp(y, dd.a, dd.b), 0, fv.data());
                    for (std::size_t i = 0; i < N; ++i) out[i] += w * kv * fv[i];
                }
            }
        }
    };
    return FamilySpec::custom(N, order_cap, eval, d,
                              fmt::format("{}*gauss({:g})", family.label(), kernel.sigma));
}

double smoothing_error_estimate(const FamilySpec& family, const KernelSpec& kernel, std::span<const double> xs) {
    KernelSpec fine = kernel;
    fine.panels *= 2;
    const FamilySpec a = gaussian_smooth(family, kernel), b = gaussian_smooth(family, fine);
    double e = 0.0;
    std::vector<double> va(family.size()), vb(family.size());
    for (double x : xs)
        for (int k = 0; k <= a.max_order(); ++k) {
            a.eval_raw(x, k, va.data());
            b.eval_raw(x, k, vb.data());
            for (std::size_t i = 0; i < va.size(); ++i) e = std::max(e, std::abs(va[i] - vb[i]));
        }
    return e;
}

namespace {

bool next_combination(std::vector<std::size_t>& c, std::size_t n, bool repeat) {
    const std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
        const std::size_t limit = repeat ? n - 1 : n - k + i;
        if (c[i] < limit) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j) c[j] = repeat ? c[i] : c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

double count_tuples(std::size_t n, std::size_t k, bool repeat) {
    const double m = repeat ? static_cast<double>(n + k - 1) : static_cast<double>(n);
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) c = c * (m - static_cast<double>(i)) / static_cast<double>(i + 1);
    return c;
}

std::vector<std::size_t> random_tuple(std::size_t n, std::size_t k, bool repeat, std::mt19937_64& rng) {
    std::vector<std::size_t> c(k);
    if (repeat) {
        std::uniform_int_distribution<std::size_t> u(0, n - 1);
        for (auto& v : c) v = u(rng);
        std::sort(c.begin(), c.end());
    } else {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        std::copy(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), c.begin());
        std::sort(c.begin(), c.end());
    }
    return c;
}

}  // namespace

TpVerdict kernel_tp_check(const KernelSpec& kernel, std::span<const double> xgrid, std::span<const double> ygrid, int k,
                          const TpOptions& opt) {
    check_kernel(kernel);
    if (k < 1) throw Error(Errc::InvalidArgument, "order must be positive");
    const auto K = static_cast<std::size_t>(k);
    if (K > xgrid.size() || (!opt.extended && K > ygrid.size()) || ygrid.empty())
        throw Error(Errc::InvalidArgument, fmt::format("order {} exceeds grid sizes", k));
    for (auto g : {xgrid, ygrid})
        for (std::size_t i = 1; i < g.size(); ++i)
            if (!(g[i] > g[i - 1])) throw Error(Errc::InvalidArgument, "grids must be strictly increasing");

    TpVerdict v;
    v.order = k;
    v.extended = opt.extended;
    v.min_det = INFINITY;
    Mat M(k, k);
    auto visit = [&](const std::vector<std::size_t>& xi, const std::vector<std::size_t>& yi) {
        for (std::size_t r = 0; r < K; ++r) {
            int rep = 0;
            for (std::size_t c = 0; c < K; ++c) {
                rep = (c && yi[c] == yi[c - 1]) ? rep + 1 : 0;
                M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = kernel(xgrid[xi[r]], ygrid[yi[c]], rep);
            }
        }
        const double det = static_cast<double>(det_ld(M));
        ++v.tuples_checked;
        if (det < v.min_det) {
            v.min_det = det;
            v.counter_x.clear();
            v.counter_y.clear();
            for (auto i : xi) v.counter_x.push_back(xgrid[i]);
            for (auto i : yi) v.counter_y.push_back(ygrid[i]);
        }
    };
    const double total = count_tuples(xgrid.size(), K, false) * count_tuples(ygrid.size(), K, opt.extended);
    if (total <= static_cast<double>(opt.budget)) {
        std::vector<std::size_t> xi(K);
        for (std::size_t i = 0; i < K; ++i) xi[i] = i;
        do {
            std::vector<std::size_t> yi(K);
            for (std::size_t i = 0; i < K; ++i) yi[i] = opt.extended ? 0 : i;
            do visit(xi, yi);
            while (next_combination(yi, ygrid.size(), opt.extended));
        } while (next_combination(xi, xgrid.size(), false));
    } else {
        v.exhaustive = false;
        std::mt19937_64 rng(opt.seed);
        for (std::size_t t = 0; t < opt.budget; ++t)
            visit(random_tuple(xgrid.size(), K, false, rng), random_tuple(ygrid.size(), K, opt.extended, rng));
    }
    v.pass = v.min_det > 0.0;
    return v;
}

}  // namespace tsys
