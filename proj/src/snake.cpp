#include "tsys/snake.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "tsys/colloc.hpp"
#include "tsys/error.hpp"
#include "tsys/grid.hpp"
#include "tsys/lp.hpp"
#include "optim.hpp"

namespace tsys {

using detail::golden_max;
using detail::nelder_mead;

Curve constant_curve(double c) {
    return [c](double) { return c; };
}

Curve tabulated_curve(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.empty()) throw Error(Errc::DimensionMismatch, "table sizes differ");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw Error(Errc::InvalidArgument, "table abscissae must increase");
    return [xs = std::move(xs), ys = std::move(ys)](double x) {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - xs.begin());
        const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return ys[j - 1] + t * (ys[j] - ys[j - 1]);
    };
}

Curve poly_curve(SparsePoly p) {
    return [p = std::move(p)](double x) { return p.eval(x); };
}

const char* snake_which_name(SnakeWhich w) noexcept {
    return w == SnakeWhich::f_star ? "f_star" : "f_upper_star";
}

namespace {

void require_interval(const FamilySpec& family) {
    if (family.domain().kind != DomainKind::closed_interval)
        throw Error(Errc::InvalidArgument, "needs a closed interval");
    if (family.size() == 0) throw Error(Errc::InvalidArgument, "empty family");
}

std::vector<double> reference_init(double a, double b, std::size_t k, bool cheb) {
    std::vector<double> x(k);
    if (k == 1) {
        x[0] = b;
        return x;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(k - 1);
        x[i] = cheb ? 0.5 * (a + b) - 0.5 * (b - a) * std::cos(std::numbers::pi * t) : a + (b - a) * t;
    }
    x.front() = a;
    x.back() = b;
    return x;
}

// Interpolant in lin F through (x_k, y_k).
bool interpolate(const FamilySpec& fam, const std::vector<double>& x, const std::vector<double>& y,
                 std::vector<double>& c) {
    const auto N = static_cast<Eigen::Index>(fam.size());
    Mat M(N, N);
    Vec r(N);
    std::vector<double> buf(fam.size());
    for (Eigen::Index k = 0; k < N; ++k) {
        fam.eval_raw(x[static_cast<std::size_t>(k)], 0, buf.data());
        for (Eigen::Index i = 0; i < N; ++i) M(k, i) = buf[static_cast<std::size_t>(i)];
        r(k) = y[static_cast<std::size_t>(k)];
    }
    Eigen::FullPivLU<Mat> lu(M);
    if (!lu.isInvertible()) return false;
    const Vec sol = lu.solve(r);
    if (!sol.allFinite()) return false;
    c.assign(sol.data(), sol.data() + sol.size());
    return true;
}

double poly_at(const FamilySpec& fam, const std::vector<double>& c, double x, std::vector<double>& buf) {
    fam.eval_raw(x, 0, buf.data());
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * buf[i];
    return s;
}

// max t subject to g1 + t <= p <= g2 - t on the grid, through the dual standard form.
double separation_margin(const BasisTable& B, const std::vector<double>& lo, const std::vector<double>& hi) {
    const auto N = static_cast<Eigen::Index>(B.nfun);
    const auto M = static_cast<Eigen::Index>(B.npts);
    Mat A = Mat::Zero(N + 1, 2 * M);
    Vec c(2 * M);
    for (Eigen::Index j = 0; j < M; ++j) {
        for (Eigen::Index i = 0; i < N; ++i) {
            const double v = B.data[static_cast<std::size_t>(i) * B.npts + static_cast<std::size_t>(j)];
            A(i, j) = v;
            A(i, M + j) = -v;
        }
        A(N, j) = 1.0;
        A(N, M + j) = 1.0;
        c(j) = hi[static_cast<std::size_t>(j)];
        c(M + j) = -lo[static_cast<std::size_t>(j)];
    }
    Vec b = Vec::Zero(N + 1);
    b(N) = 1.0;
    const LpResult r = solve_lp(A, b, c);
    if (r.status != LpStatus::optimal) return -std::numeric_limits<double>::infinity();
    return r.objective;
}

}  // namespace

SnakeSolution snake(const FamilySpec& family, const Curve& g1, const Curve& g2, SnakeWhich which,
                    const SnakeOptions& opt) {
    require_interval(family);
    const double a = family.domain().a, b = family.domain().b;
    const std::vector<double> xs = linspace(a, b, opt.grid);
    std::vector<double> lo(xs.size()), hi(xs.size());
    double scale = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        lo[j] = g1(xs[j]);
        hi[j] = g2(xs[j]);
        scale = std::max({scale, std::abs(lo[j]), std::abs(hi[j])});
    }
    if (scale == 0.0) scale = 1.0;
    const BasisTable B = tabulate(family, xs);
    SnakeSolution out;
    out.which = which;
    out.margin = separation_margin(B, lo, hi);
    if (!(out.margin > 1e-12 * scale))
        throw Error(Errc::NoSeparator, fmt::format("no g in lin F strictly between g1 and g2 (margin {:.3g})", out.margin));

    const std::size_t K = family.size();
    const int n = family.n();
    std::vector<SnakeSide> sides(K);
    for (std::size_t k = 0; k < K; ++k) {
        const bool upper_last = which == SnakeWhich::f_star;
        const bool even = (n - static_cast<int>(k)) % 2 == 0;
        sides[k] = (even == upper_last) ? SnakeSide::upper : SnakeSide::lower;
    }
    std::vector<double> x = reference_init(a, b, K, true);
    std::vector<double> buf(K), c, best_c;
    std::vector<double> best_x;
    double best_v = std::numeric_limits<double>::infinity();
    auto gside = [&](SnakeSide s, double t) { return s == SnakeSide::upper ? g2(t) : g1(t); };

    for (int it = 0; it < opt.max_iter; ++it) {
        std::vector<double> y(K);
        for (std::size_t k = 0; k < K; ++k) y[k] = gside(sides[k], x[k]);
        if (!interpolate(family, x, y, c)) break;
        out.iterations = it + 1;
        const std::vector<double> pv = eval_table(B, c);
        double viol = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j) viol = std::max({viol, pv[j] - hi[j], lo[j] - pv[j]});
        // move each reference point to the largest excursion of its side within its cell
        std::vector<double> nx(K);
        for (std::size_t k = 0; k < K; ++k) {
            const double cl = k ? 0.5 * (x[k - 1] + x[k]) : a;
            const double cr = k + 1 < K ? 0.5 * (x[k] + x[k + 1]) : b;
            const bool up = sides[k] == SnakeSide::upper;
            auto psi = [&](double t) {
                const double p = poly_at(family, c, t, buf);
                return up ? p - g2(t) : g1(t) - p;
            };
            double bv = psi(x[k]), bx = x[k];
            for (std::size_t j = 0; j < xs.size(); ++j) {
                if (xs[j] < cl || xs[j] > cr) continue;
                const double v = up ? pv[j] - hi[j] : lo[j] - pv[j];
                if (v > bv) {
                    bv = v;
                    bx = xs[j];
                }
            }
            for (double e : {cl, cr})
                if (psi(e) > bv) {
                    bv = psi(e);
                    bx = e;
                }
            {
                const double h = (b - a) / static_cast<double>(xs.size() - 1);
                const double l = std::max(cl, bx - h), r = std::min(cr, bx + h);
                const double t = golden_max(psi, l, r);
                if (const double v = psi(t); v > bv) {
                    bv = v;
                    bx = t;
                }
            }
            nx[k] = bx;
            viol = std::max(viol, bv);
        }
        if (viol < best_v) {
            best_v = viol;
            best_c = c;
            best_x = x;
        }
        if (viol <= opt.tol * scale) break;
        double move = 0.0;
        for (std::size_t k = 0; k < K; ++k) move = std::max(move, std::abs(nx[k] - x[k]));
        for (std::size_t k = 1; k < K; ++k)
            if (!(nx[k] > nx[k - 1])) nx[k] = std::min(b, nx[k - 1] + 1e-12 * (b - a));
        x = std::move(nx);
        if (move <= 1e-15 * (b - a)) break;
    }
    if (best_c.empty()) throw Error(Errc::NoConvergence, "snake interpolation singular");

    // final violation on the grid plus golden refinement around grid maxima
    std::vector<double> finebuf(K);
    auto phi = [&](double t) {
        const double p = poly_at(family, best_c, t, finebuf);
        return std::max(p - g2(t), g1(t) - p);
    };
    const std::vector<double> pv = eval_table(B, best_c);
    double viol = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double v = std::max(pv[j] - hi[j], lo[j] - pv[j]);
        viol = std::max(viol, v);
        if (j && j + 1 < xs.size() && v >= std::max(pv[j - 1] - hi[j - 1], lo[j - 1] - pv[j - 1]) &&
            v >= std::max(pv[j + 1] - hi[j + 1], lo[j + 1] - pv[j + 1]) && v > -1e-6 * scale)
            viol = std::max(viol, phi(golden_max(phi, xs[j - 1], xs[j + 1])));
    }
    out.poly = {family, best_c};
    out.max_violation = std::max(0.0, viol);
    for (std::size_t k = 0; k < K; ++k) out.touch_points.push_back({best_x[k], sides[k]});
    out.converged = out.max_violation <= 1e-9 * scale;
    return out;
}

BestApproximation best_approx(const FamilySpec& family, const Curve& f, const RemezOptions& opt) {
    require_interval(family);
    const double a = family.domain().a, b = family.domain().b;
    const std::size_t K = family.size() + 1;
    const std::vector<double> xs = linspace(a, b, opt.grid);
    const BasisTable B = tabulate(family, xs);
    std::vector<double> fv(xs.size());
    double fscale = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        fv[j] = f(xs[j]);
        fscale = std::max(fscale, std::abs(fv[j]));
    }
    if (fscale == 0.0) fscale = 1.0;

    std::vector<double> ref = reference_init(a, b, K, opt.init == RemezInit::chebyshev);
    BestApproximation out;
    std::vector<double> buf(family.size()), c;
    std::vector<std::vector<double>> seen;
    double best_dev = std::numeric_limits<double>::infinity();

    for (int it = 0; it < opt.max_iter; ++it) {
        const auto N = static_cast<Eigen::Index>(K);
        Mat M(N, N);
        Vec r(N);
        for (Eigen::Index k = 0; k < N; ++k) {
            family.eval_raw(ref[static_cast<std::size_t>(k)], 0, buf.data());
            for (Eigen::Index i = 0; i + 1 < N; ++i) M(k, i) = buf[static_cast<std::size_t>(i)];
            M(k, N - 1) = k % 2 ? -1.0 : 1.0;
            r(k) = f(ref[static_cast<std::size_t>(k)]);
        }
        Eigen::FullPivLU<Mat> lu(M);
        if (!lu.isInvertible()) {
            out.stalled = true;
            break;
        }
        const Vec sol = lu.solve(r);
        std::vector<double> cc(sol.data(), sol.data() + N - 1);
        const double E = sol(N - 1);
        out.levels.push_back(std::abs(E));
        out.iterations = it + 1;

        // error extrema on sign-consistent runs
        const std::vector<double> pv = eval_table(B, cc);
        auto err = [&](double t) { return f(t) - poly_at(family, cc, t, buf); };
        std::vector<std::pair<double, double>> ext;  // (x, e)
        std::size_t j = 0;
        double emax = 0.0;
        while (j < xs.size()) {
            const double e0 = fv[j] - pv[j];
            if (e0 == 0.0) {
                ++j;
                continue;
            }
            const int s = e0 > 0 ? 1 : -1;
            std::size_t best = j;
            std::size_t k = j;
            while (k < xs.size() && (fv[k] - pv[k]) * s >= 0.0) {
                if ((fv[k] - pv[k]) * s > (fv[best] - pv[best]) * s) best = k;
                ++k;
            }
            double bx = xs[best], be = fv[best] - pv[best];
            if (best > 0 && best + 1 < xs.size()) {
                const double t = golden_max([&](double u) { return s * err(u); }, xs[best - 1], xs[best + 1]);
                const double et = err(t);
                if (et * s > be * s) {
                    bx = t;
                    be = et;
                }
            }
            ext.push_back({bx, be});
            emax = std::max(emax, std::abs(be));
            j = k;
        }
        if (emax < best_dev) {
            best_dev = emax;
            c = cc;
            out.alternation_points = ref;
            out.deviation = emax;
            out.sign = E >= 0 ? 1 : -1;
        }
        if (emax <= 1e-14 * fscale || emax - std::abs(E) <= opt.tol * emax) break;
        // a zero of the error at an end can still carry the opposite sign
        auto sgn = [](double v) { return v >= 0 ? 1 : -1; };
        std::vector<int> es;
        for (const auto& e : ext) es.push_back(sgn(e.second));
        if (!ext.empty() && ext.front().first > a && fv.front() == pv.front()) {
            ext.insert(ext.begin(), {a, 0.0});
            es.insert(es.begin(), -es.front());
        }
        if (!ext.empty() && ext.back().first < b && fv.back() == pv.back()) {
            ext.push_back({b, 0.0});
            es.push_back(-es.back());
        }
        if (ext.size() < K) break;
        // trim to n+2 points, dropping small excursions while keeping alternation
        while (ext.size() > K) {
            const std::size_t last = ext.size() - 1;
            std::size_t i = 0;
            if (ext.size() - K >= 2) {
                for (std::size_t q = 1; q <= last; ++q)
                    if (std::abs(ext[q].second) < std::abs(ext[i].second)) i = q;
                if (i != 0 && i != last) {
                    const std::size_t j = std::abs(ext[i - 1].second) < std::abs(ext[i + 1].second) ? i - 1 : i + 1;
                    const std::size_t f0 = std::min(i, j);
                    ext.erase(ext.begin() + static_cast<std::ptrdiff_t>(f0),
                              ext.begin() + static_cast<std::ptrdiff_t>(f0 + 2));
                    es.erase(es.begin() + static_cast<std::ptrdiff_t>(f0), es.begin() + static_cast<std::ptrdiff_t>(f0 + 2));
                    continue;
                }
            } else {
                i = std::abs(ext.front().second) <= std::abs(ext.back().second) ? 0 : last;
            }
            ext.erase(ext.begin() + static_cast<std::ptrdiff_t>(i));
            es.erase(es.begin() + static_cast<std::ptrdiff_t>(i));
        }
        std::vector<double> next;
        for (const auto& e : ext) next.push_back(e.first);
        if (std::find(seen.begin(), seen.end(), next) != seen.end()) {
            out.stalled = true;
            break;
        }
        seen.push_back(next);
        ref = std::move(next);
    }
    if (c.empty()) throw Error(Errc::ExchangeStall, "reference system singular at the start");
    out.poly = {family, c};
    // report the true sup-norm of the final iterate
    double dev = 0.0;
    const std::vector<double> pv = eval_table(B, c);
    for (std::size_t j = 0; j < xs.size(); ++j) dev = std::max(dev, std::abs(fv[j] - pv[j]));
    out.deviation = std::max(out.deviation, dev);
    if (!out.alternation_points.empty())
        out.sign = f(out.alternation_points[0]) - out.poly.eval(out.alternation_points[0]) >= 0 ? 1 : -1;
    return out;
}

namespace {

// Interior points from unconstrained parameters: increasing, inside (lo, hi).
std::vector<double> to_theta(const std::vector<double>& z, std::size_t k, const Domain& d) {
    std::vector<double> w(k + 1);
    double zm = *std::max_element(z.begin(), z.end()), tot = 0.0;
    for (std::size_t i = 0; i <= k; ++i) tot += (w[i] = std::exp(z[i] - zm));
    std::vector<double> th(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        acc += w[i] / tot;
        th[i] = d.kind == DomainKind::closed_interval ? d.a + (d.b - d.a) * acc
                : d.kind == DomainKind::left_closed_halfline ? d.a + std::tan(std::numbers::pi * acc / 2.0)
                                                               : std::tan(std::numbers::pi * (acc - 0.5));
    }
    return th;
}

}  // namespace

RatioResult optimize_ratio(const FamilySpec& family, const MomentFunctional& L, const MomentFunctional& S,
                           Sense sense, const RatioOptions& opt) {
    if (L.values.size() != family.size() || S.values.size() != family.size())
        throw Error(Errc::DimensionMismatch, "functional length differs from family size");
    const double sg = sense == Sense::maximize ? -1.0 : 1.0;
    const Domain& d = family.domain();
    std::vector<RatioCandidate> cands;
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd(0.0, 1.0);

    auto ratio = [&](Pattern p, const std::vector<double>& th, double& out) {
        SparsePoly q;
        try {
            q = extremal_test_poly(family, p, th);
        } catch (const Error&) {
            return false;
        }
        const double sv = S.apply(q);
        double nq = 0.0;
        for (double v : q.coeffs) nq = std::max(nq, std::abs(v));
        if (nq == 0.0) return false;
        if (!(sv > 1e-14 * nq))
            throw Error(Errc::SNotStrictlyPositive, fmt::format("S(p) = {} for pattern {}", sv, pattern_name(p)));
        out = L.apply(q) / sv;
        return true;
    };

    for (Pattern p : patterns_for(family)) {
        const auto k = static_cast<std::size_t>(pattern_doubles(family, p));
        if (k == 0) {
            double v;
            if (ratio(p, {}, v)) cands.push_back({p, {}, v});
            continue;
        }
        std::vector<std::pair<double, std::vector<double>>> pool;
        for (int t = 0; t < opt.coarse; ++t) {
            std::vector<double> z(k + 1);
            for (double& e : z) e = nd(rng);
            double v;
            if (ratio(p, to_theta(z, k, d), v)) pool.push_back({sg * v, z});
        }
        std::sort(pool.begin(), pool.end(), [](const auto& u, const auto& w) { return u.first < w.first; });
        for (std::size_t s = 0; s < std::min<std::size_t>(3, pool.size()); ++s) {
            auto obj = [&](const std::vector<double>& z) {
                double v;
                try {
                    if (!ratio(p, to_theta(z, k, d), v)) return std::numeric_limits<double>::infinity();
                } catch (const Error&) {
                    return std::numeric_limits<double>::infinity();
                }
                return sg * v;
            };
            const std::vector<double> z = nelder_mead(obj, pool[s].second, 0.3, 400);
            const double v = obj(z);
            if (std::isfinite(v)) cands.push_back({p, to_theta(z, k, d), sg * v});
        }
    }
    if (cands.empty()) throw Error(Errc::NoConvergence, "no admissible extremal polynomial");
    std::sort(cands.begin(), cands.end(),
              [&](const RatioCandidate& u, const RatioCandidate& w) { return sg * u.value < sg * w.value; });
    RatioResult out;
    out.value = cands.front().value;
    out.argbest = extremal_test_poly(family, cands.front().pattern, cands.front().theta);
    cands.resize(std::min<std::size_t>(5, cands.size()));
    out.top = std::move(cands);
    return out;
}

}  // namespace tsys
