#include "tsys/zerocalc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "tsys/error.hpp"
#include "tsys/grid.hpp"

namespace tsys {

const char* zero_kind_name(ZeroKind k) noexcept { return k == ZeroKind::nodal ? "nodal" : "non_nodal"; }

int index_of(const ZeroConfig& config) {
    int s = 0;
    for (const Zero& z : config.zeros) s += config.domain.is_endpoint(z.x) ? z.mult : std::max(2, z.mult);
    return s;
}

std::pair<int, int> nodal_counts(const ZeroConfig& config) {
    int k = 0, l = 0;
    for (const Zero& z : config.zeros) (z.kind == ZeroKind::nodal ? l : k) += 1;
    return {k, l};
}

std::vector<double> check_grid(const Domain& d, std::size_t n) {
    switch (d.kind) {
        case DomainKind::closed_interval: return linspace(d.a, d.b, n);
        case DomainKind::left_closed_halfline: {
            std::vector<double> t = linspace(0.0, 0.999, n);
            for (double& v : t) v = d.a + std::tan(std::numbers::pi * v / 2.0);
            t[0] = d.a;
            return t;
        }
        case DomainKind::real_line: {
            std::vector<double> t = linspace(-0.999, 0.999, n);
            for (double& v : t) v = std::tan(std::numbers::pi * v / 2.0);
            return t;
        }
    }
    return {};
}

SparsePoly poly_from_zeros(const FamilySpec& family, const NodeSet& nodes, SignMode sign) {
    check_nodes(family, nodes);
    const int total = total_multiplicity(nodes);
    const int n = family.n();
    if (total > n)
        throw Error(Errc::IndexTooLarge, fmt::format("total multiplicity {} exceeds n = {}", total, n));
    if (total < n)
        throw Error(Errc::DimensionMismatch, fmt::format("total multiplicity {} but n = {}", total, n));
    Mat rows(n, n + 1);
    std::vector<double> v(family.size());
    int r = 0;
    for (const Node& nd : nodes)
        for (int k = 0; k < nd.mult; ++k, ++r) {
            family.eval_raw(nd.x, k, v.data());
            for (int i = 0; i <= n; ++i) rows(r, i) = v[static_cast<std::size_t>(i)];
        }
    SparsePoly p{family, bordered_cofactors(rows)};
    double cmax = 0.0;
    for (double c : p.coeffs) cmax = std::max(cmax, std::fabs(c));
    if (!(cmax > 0.0) || !std::isfinite(cmax))
        throw Error(Errc::CertificationRequired, "bordered determinant vanishes identically at these nodes");
    if (sign == SignMode::raw) return p;

    for (double& c : p.coeffs) c /= cmax;
    const std::vector<double> probe = check_grid(family.domain(), 2001);
    double lo = 0.0, hi = 0.0;
    for (double x : probe) {
        const double y = p.eval(x);
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    if (-lo > hi) {
        for (double& c : p.coeffs) c = -c;
        std::swap(lo, hi);
        lo = -lo;
        hi = -hi;
    }
    return p;
}

namespace {

struct Evaluator {
    const SparsePoly& f;
    int max_order;
    double operator()(double x, int k) const { return f.eval(x, k); }
    bool has(int k) const { return k <= max_order; }
};

double bisect_root(const Evaluator& F, double lo, double hi, double flo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = F(mid, 0);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double golden_min_abs(const Evaluator& F, double lo, double hi) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = std::fabs(F(c, 0)), fd = std::fabs(F(d, 0));
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::fabs(lo)); ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = std::fabs(F(c, 0));
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = std::fabs(F(d, 0));
        }
    }
    return fc < fd ? c : d;
}

/// Newton on F^{(k)} kept inside [lo, hi]; returns x unchanged when the derivative is unavailable.
double newton_on(const Evaluator& F, int k, double x, double lo, double hi) {
    if (!F.has(k + 1)) return x;
    for (int it = 0; it < 80; ++it) {
        double fk, fk1;
        try {
            fk = F(x, k);
            fk1 = F(x, k + 1);
        } catch (const Error&) {
            return x;
        }
        if (fk == 0.0 || fk1 == 0.0 || !std::isfinite(fk1)) break;
        double nx = x - fk / fk1;
        if (!(nx > lo)) nx = 0.5 * (x + lo);
        if (!(nx < hi)) nx = 0.5 * (x + hi);
        if (std::fabs(nx - x) <= 1e-16 * (1.0 + std::fabs(x))) {
            x = nx;
            break;
        }
        x = nx;
    }
    return x;
}

}  // namespace

ZeroConfig count_zeros(const SparsePoly& f, const ZeroOptions& opt) {
    const FamilySpec& fam = f.family;
    const Domain& dom = fam.domain();
    const int n = fam.n();
    const Evaluator F{f, std::min(fam.max_order(), n + 1)};
    const std::vector<double> xs = check_grid(dom, opt.grid);
    const BasisTable tab = tabulate(fam, xs, 0);
    const std::vector<double> y = eval_table(tab, f.coeffs);
    double scale = 0.0;
    for (double v : y) scale = std::max(scale, std::fabs(v));
    if (!(scale > 0.0)) throw Error(Errc::ZeroPolynomial, "polynomial vanishes on the check grid");
    const double ztol = opt.tol * scale;
    const double width = xs.back() - xs.front();

    // Per-order magnitude for the derivative-vanishing test.
    std::vector<double> dscale(static_cast<std::size_t>(F.max_order + 1), 0.0);
    dscale[0] = scale;
    for (int k = 1; k <= F.max_order; ++k) {
        for (std::size_t j = 0; j < xs.size(); j += 4) {
            try {
                dscale[static_cast<std::size_t>(k)] = std::max(dscale[static_cast<std::size_t>(k)], std::fabs(F(xs[j], k)));
            } catch (const Error&) {
            }
        }
    }

    std::vector<double> cand;
    const std::size_t N = xs.size();
    for (std::size_t j = 0; j + 1 < N; ++j) {
        if (y[j] == 0.0) cand.push_back(xs[j]);
        if (y[j] * y[j + 1] < 0.0) cand.push_back(bisect_root(F, xs[j], xs[j + 1], y[j]));
    }
    if (y[N - 1] == 0.0) cand.push_back(xs[N - 1]);
    for (std::size_t j = 0; j < N; ++j) {
        const double aj = std::fabs(y[j]);
        const bool left = j == 0 || aj <= std::fabs(y[j - 1]);
        const bool right = j + 1 == N || aj <= std::fabs(y[j + 1]);
        if (!(left && right) || y[j] == 0.0) continue;
        if (j > 0 && y[j - 1] * y[j] < 0) continue;
        if (j + 1 < N && y[j] * y[j + 1] < 0) continue;
        const double lo = xs[j == 0 ? 0 : j - 1];
        const double hi = xs[j + 1 == N ? N - 1 : j + 1];
        double x = golden_min_abs(F, lo, hi);
        const double snap = 1e-9 * width;
        if (j == 0 && (x - xs[0] <= snap || std::fabs(F(xs[0], 0)) <= std::fabs(F(x, 0)))) x = xs[0];
        if (j + 1 == N && (xs[N - 1] - x <= snap || std::fabs(F(xs[N - 1], 0)) <= std::fabs(F(x, 0)))) x = xs[N - 1];
        if (x != xs.front() && x != xs.back()) {
            const double xn = newton_on(F, 1, x, lo, hi);
            if (std::fabs(F(xn, 0)) <= std::fabs(F(x, 0))) x = xn;
        }
        if (std::fabs(F(x, 0)) <= ztol) cand.push_back(x);
    }
    std::sort(cand.begin(), cand.end());

    ZeroConfig cfg;
    cfg.domain = dom;
    const double merge = 1e-6 * width;
    for (double x : cand) {
        if (!cfg.zeros.empty() && x - cfg.zeros.back().x <= merge) {
            if (std::fabs(F(x, 0)) < std::fabs(F(cfg.zeros.back().x, 0))) cfg.zeros.back().x = x;
            continue;
        }
        cfg.zeros.push_back({x, 1, ZeroKind::nodal});
    }
    // Snap to endpoints that are zeros themselves.
    for (Zero& z : cfg.zeros) {
        for (double e : {dom.lower(), dom.upper()}) {
            if (std::isfinite(e) && std::fabs(z.x - e) <= merge && std::fabs(F(e, 0)) <= ztol) z.x = e;
        }
    }

    for (Zero& z : cfg.zeros) {
        const bool endpoint = dom.is_endpoint(z.x);
        const double lo = std::max(dom.lower(), z.x - 1e-3 * width);
        const double hi = std::min(dom.upper(), z.x + 1e-3 * width);
        int m = 1;
        double x = z.x;
        while (m <= n - 1 && F.has(m + 1)) {
            double dm;
            try {
                dm = F(x, m);
            } catch (const Error&) {
                break;
            }
            const double dsc = dscale[static_cast<std::size_t>(m)];
            if (!(std::fabs(dm) <= 1e-3 * dsc)) break;
            const double xp = endpoint ? x : newton_on(F, m, x, lo, hi);
            bool ok = true;
            for (int j = 0; j <= m && ok; ++j) {
                double v;
                try {
                    v = F(xp, j);
                } catch (const Error&) {
                    ok = false;
                    break;
                }
                ok = std::fabs(v) <= (j == 0 ? ztol : 1e-7 * dscale[static_cast<std::size_t>(j)]);
            }
            if (!ok) break;
            x = xp;
            ++m;
        }
        z.x = x;
        z.mult = m;
        if (endpoint) {
            z.kind = ZeroKind::nodal;
            continue;
        }
        // Sign probe: halve delta until the side signs stop changing.
        double delta = 1e-4 * width;
        int sl = 0, sr = 0;
        while (delta >= 1e-9) {
            const double xl = std::max(dom.lower(), x - delta), xr = std::min(dom.upper(), x + delta);
            const double fl = F(xl, 0), fr = F(xr, 0);
            const int nl = fl > 0 ? 1 : (fl < 0 ? -1 : 0);
            const int nr = fr > 0 ? 1 : (fr < 0 ? -1 : 0);
            if (nl != 0 && nr != 0 && nl == sl && nr == sr) break;
            sl = nl;
            sr = nr;
            delta *= 0.5;
        }
        z.kind = (sl != 0 && sr != 0 && sl == sr) ? ZeroKind::non_nodal : ZeroKind::nodal;
    }

    // Distinct candidates can polish onto the same high-order zero.
    std::vector<Zero> merged;
    for (const Zero& z : cfg.zeros) {
        if (!merged.empty() && z.x - merged.back().x <= std::max(merge, 1e-4 * width * (z.mult > 2 ? 1.0 : 0.0))) {
            if (z.mult > merged.back().mult) merged.back() = z;
            continue;
        }
        merged.push_back(z);
    }
    cfg.zeros = std::move(merged);

    const auto [k, l] = nodal_counts(cfg);
    cfg.bound_ok = 2 * k + l <= n;
    if (!cfg.bound_ok) {
        cfg.diagnostic = fmt::format("2k + l = {} exceeds n = {}", 2 * k + l, n);
        if (opt.enforce_bound) throw Error(Errc::InvariantViolation, cfg.diagnostic);
    }
    return cfg;
}

}  // namespace tsys
