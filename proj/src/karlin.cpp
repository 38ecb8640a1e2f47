#include "tsys/karlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "tsys/error.hpp"
#include "tsys/grid.hpp"
#include "tsys/linalg.hpp"

namespace tsys {

const char* solver_path_name(SolverPath p) noexcept {
    return p == SolverPath::newton ? "newton" : "fixed_point";
}

namespace {

constexpr int kLower = 0;
constexpr int kUpper = 1;
constexpr int kPinned = 2;

// A single interpolation condition on p = f_*.
struct Row {
    bool coeff = false;  // p's coefficient `index` instead of a point condition
    int index = 0;
    double x = 0.0;
    int order = 0;
    int side = kLower;  // lower: p = 0, upper: p = f, pinned: p = 0 and f = 0
};

// Interior reference points are parametrized by s in (s_lo, s_hi).
struct Chart {
    enum Kind { identity, halfline, realline } kind = identity;
    double a = 0.0;
    double s_lo = 0.0;
    double s_hi = 1.0;

    [[nodiscard]] double x(double s) const {
        switch (kind) {
            case identity: return s;
            case halfline: return a + std::tan(std::numbers::pi * s / 2.0);
            case realline: return std::tan(std::numbers::pi * s / 2.0);
        }
        return s;
    }
    [[nodiscard]] double dx(double s) const {
        if (kind == identity) return 1.0;
        const double t = std::tan(std::numbers::pi * s / 2.0);
        return std::numbers::pi / 2.0 * (1.0 + t * t);
    }
    [[nodiscard]] bool at_infinity(double s) const {
        return (kind == halfline && s >= s_hi) || (kind == realline && std::abs(s) >= 1.0);
    }
};

struct Problem {
    FamilySpec family;
    std::vector<double> a;
    std::vector<Row> fixed;
    std::vector<int> sides;
    Chart chart;
    std::vector<double> pinned;
};

std::size_t dim(const Problem& p) { return p.a.size(); }

struct State {
    bool ok = false;
    Vec c;
    std::vector<double> x;
    std::vector<double> R;
    std::vector<double> scale;
    Eigen::FullPivLU<Mat> lu;
    Vec rowscale;
    double merit = std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
};

State evaluate(const Problem& p, const std::vector<double>& s) {
    const std::size_t N = dim(p);
    const std::size_t F = p.fixed.size();
    State st;
    Mat M = Mat::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    Vec r = Vec::Zero(static_cast<Eigen::Index>(N));
    std::vector<double> buf(N);
    auto point_row = [&](Eigen::Index row, double x, int order, int side) {
        p.family.eval_raw(x, order, buf.data());
        double rhs = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            M(row, static_cast<Eigen::Index>(i)) = buf[i];
            rhs += p.a[i] * buf[i];
        }
        r(row) = side == kUpper ? rhs : 0.0;
    };
    for (std::size_t k = 0; k < F; ++k) {
        const Row& rw = p.fixed[k];
        const auto row = static_cast<Eigen::Index>(k);
        if (rw.coeff) {
            M(row, rw.index) = 1.0;
            r(row) = rw.side == kUpper ? p.a[static_cast<std::size_t>(rw.index)] : 0.0;
        } else {
            point_row(row, rw.x, rw.order, rw.side);
        }
    }
    st.x.resize(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
        st.x[j] = p.chart.x(s[j]);
        point_row(static_cast<Eigen::Index>(F + j), st.x[j], 0, p.sides[j]);
    }
    st.rowscale.resize(static_cast<Eigen::Index>(N));
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        const double m = M.row(i).cwiseAbs().maxCoeff();
        if (!(m > 0.0) || !std::isfinite(m)) return st;
        st.rowscale(i) = 1.0 / m;
    }
    const Mat Ms = st.rowscale.asDiagonal() * M;
    st.lu.compute(Ms);
    if (!st.lu.isInvertible()) return st;
    st.c = st.lu.solve(st.rowscale.asDiagonal() * r);
    if (!st.c.allFinite()) return st;

    st.R.resize(s.size());
    st.scale.resize(s.size());
    st.merit = 0.0;
    st.worst = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        p.family.eval_raw(st.x[j], 1, buf.data());
        double pd = 0.0, mag = 0.0, fd = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double t = st.c(static_cast<Eigen::Index>(i)) * buf[i];
            pd += t;
            mag += std::abs(t);
            fd += p.a[i] * buf[i];
        }
        const bool up = p.sides[j] == kUpper;
        st.R[j] = pd - (up ? fd : 0.0);
        st.scale[j] = mag + (up ? std::abs(fd) : 0.0) + 1e-300;
        const double q = st.R[j] / st.scale[j];
        st.merit += q * q;
        st.worst = std::max(st.worst, std::abs(q));
    }
    st.ok = std::isfinite(st.merit);
    return st;
}

// d R_j / d s_k
Mat jacobian(const Problem& p, const std::vector<double>& s, const State& st) {
    const std::size_t N = dim(p);
    const std::size_t F = p.fixed.size();
    const std::size_t K = s.size();
    Mat J = Mat::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
    if (p.family.max_order() >= 2) {
        std::vector<double> b1(N), b2(N);
        Mat D1(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(N));
        std::vector<double> diag(K);
        for (std::size_t j = 0; j < K; ++j) {
            p.family.eval_raw(st.x[j], 1, b1.data());
            p.family.eval_raw(st.x[j], 2, b2.data());
            double pdd = 0.0, fdd = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                D1(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = b1[i];
                pdd += st.c(static_cast<Eigen::Index>(i)) * b2[i];
                fdd += p.a[i] * b2[i];
            }
            diag[j] = pdd - (p.sides[j] == kUpper ? fdd : 0.0);
        }
        for (std::size_t k = 0; k < K; ++k) {
            const auto row = static_cast<Eigen::Index>(F + k);
            Vec e = Vec::Zero(static_cast<Eigen::Index>(N));
            e(row) = st.rowscale(row);
            const Vec dc = -st.R[k] * st.lu.solve(e);
            const Vec col = D1 * dc;
            for (std::size_t j = 0; j < K; ++j) {
                double v = col(static_cast<Eigen::Index>(j));
                if (j == k) v += diag[j];
                J(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v * p.chart.dx(s[k]);
            }
        }
        return J;
    }
    for (std::size_t k = 0; k < K; ++k) {
        const double lo = k ? s[k - 1] : p.chart.s_lo;
        const double hi = k + 1 < K ? s[k + 1] : p.chart.s_hi;
        const double h = std::min(1e-6 * (p.chart.s_hi - p.chart.s_lo), 0.25 * std::min(s[k] - lo, hi - s[k]));
        std::vector<double> sp = s, sm = s;
        sp[k] += h;
        sm[k] -= h;
        const State a = evaluate(p, sp);
        const State b = evaluate(p, sm);
        if (!a.ok || !b.ok) continue;
        for (std::size_t j = 0; j < K; ++j)
            J(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = (a.R[j] - b.R[j]) / (2.0 * h);
    }
    return J;
}

struct Run {
    std::vector<double> s;
    State st;
    int iterations = 0;
    bool converged = false;
};

Run newton(const Problem& p, std::vector<double> s, const KarlinOptions& opt) {
    Run run;
    const std::size_t K = s.size();
    State st = evaluate(p, s);
    for (int it = 0; it < opt.max_iter && st.ok; ++it) {
        if (st.worst < opt.tol) {
            run.converged = true;
            break;
        }
        run.iterations = it + 1;
        const Mat J = jacobian(p, s, st);
        Eigen::FullPivLU<Mat> lu(J);
        if (!lu.isInvertible()) break;
        Vec R(static_cast<Eigen::Index>(K));
        for (std::size_t j = 0; j < K; ++j) R(static_cast<Eigen::Index>(j)) = st.R[j];
        const Vec d = -lu.solve(R);
        if (!d.allFinite()) break;
        // keep the reference points ordered and inside the chart
        double lam = 1.0;
        for (std::size_t j = 0; j < K; ++j) {
            const double dj = d(static_cast<Eigen::Index>(j));
            const double lo = j ? s[j - 1] : p.chart.s_lo;
            const double hi = j + 1 < K ? s[j + 1] : p.chart.s_hi;
            const double room = dj < 0 ? s[j] - lo : hi - s[j];
            if (std::abs(dj) > 0) lam = std::min(lam, 0.45 * room / std::abs(dj));
        }
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt, lam *= 0.5) {
            std::vector<double> sn = s;
            for (std::size_t j = 0; j < K; ++j) sn[j] += lam * d(static_cast<Eigen::Index>(j));
            State sn_st = evaluate(p, sn);
            if (sn_st.ok && sn_st.merit < st.merit * (1.0 - 1e-4 * lam)) {
                s = std::move(sn);
                st = std::move(sn_st);
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    if (st.ok && st.worst < opt.tol) run.converged = true;
    run.s = std::move(s);
    run.st = std::move(st);
    return run;
}

// Grid used for the nonnegativity checks, with tail points on unbounded domains.
std::vector<double> verification_grid(const Domain& d, std::size_t n) {
    std::vector<double> g = check_grid(d, n);
    if (d.kind != DomainKind::closed_interval) {
        for (double t = 1e3; t <= 1e6 * 1.0001; t *= std::sqrt(10.0)) {
            g.push_back(d.kind == DomainKind::left_closed_halfline ? d.a + t : t);
            if (d.kind == DomainKind::real_line) g.push_back(-t);
        }
        std::sort(g.begin(), g.end());
    }
    return g;
}

// Weight making values comparable across an unbounded domain.
double weight(const Problem& p, double x, std::vector<double>& buf) {
    if (p.chart.kind == Chart::identity) return 1.0;
    p.family.eval_raw(x, 0, buf.data());
    return 1.0 + std::abs(buf[dim(p) - 1]);
}

struct Check {
    double min_lower = 0.0;
    double min_upper = 0.0;
    double residual = 0.0;
};

Check check_parts(const Problem& p, const std::vector<double>& c, std::size_t npts) {
    const std::vector<double> g = verification_grid(p.family.domain(), npts);
    const std::size_t N = dim(p);
    std::vector<double> buf(N), wbuf(N);
    double S = 0.0, lo = 0.0, up = 0.0, res = 0.0;
    for (double x : g) {
        p.family.eval_raw(x, 0, buf.data());
        double fv = 0.0, lv = 0.0, uv = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            fv += p.a[i] * buf[i];
            lv += c[i] * buf[i];
            uv += (p.a[i] - c[i]) * buf[i];
        }
        const double w = weight(p, x, wbuf);
        S = std::max(S, std::abs(fv) / w);
        lo = std::min(lo, lv / w);
        up = std::min(up, uv / w);
        res = std::max(res, std::abs(fv - lv - uv) / w);
    }
    if (S == 0.0) S = 1.0;
    return {lo / S, up / S, res};
}

bool admissible(const Check& ck) { return ck.min_lower >= -1e-9 && ck.min_upper >= -1e-9; }

// f_* candidate with the given double zeros: nullvector of the lower and pinned rows.
bool lower_candidate(const Problem& p, const std::vector<double>& zs, std::vector<double>& u) {
    const std::size_t N = dim(p);
    std::vector<std::vector<double>> rows;
    std::vector<double> buf(N);
    for (const Row& rw : p.fixed) {
        if (rw.side == kUpper) continue;
        std::vector<double> row(N, 0.0);
        if (rw.coeff) {
            row[static_cast<std::size_t>(rw.index)] = 1.0;
        } else {
            p.family.eval_raw(rw.x, rw.order, row.data());
        }
        rows.push_back(std::move(row));
    }
    for (double z : zs)
        for (int k = 0; k < 2; ++k) {
            std::vector<double> row(N);
            p.family.eval_raw(z, k, row.data());
            rows.push_back(std::move(row));
        }
    if (rows.size() + 1 != N) return false;
    Mat R(static_cast<Eigen::Index>(N - 1), static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i + 1 < N; ++i) {
        double m = 0.0;
        for (double v : rows[i]) m = std::max(m, std::abs(v));
        if (!(m > 0.0)) return false;
        for (std::size_t k = 0; k < N; ++k)
            R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k] / m;
    }
    u = bordered_cofactors(R);
    double nrm = 0.0;
    for (double v : u) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) return false;
    for (double& v : u) v /= nrm;
    return true;
}

struct Ratio {
    const Problem& p;
    const std::vector<double>& u;
    mutable std::vector<double> buf;

    // u / f at chart parameter s; NaN where undefined
    double operator()(double s) const {
        const std::size_t N = dim(p);
        if (p.chart.at_infinity(s)) return u[N - 1] / p.a[N - 1];
        const double x = p.chart.x(s);
        for (double z : p.pinned)
            if (std::abs(x - z) < 1e-7 * (1.0 + std::abs(z))) return std::nan("");
        p.family.eval_raw(x, 0, buf.data());
        double fv = 0.0, uv = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            fv += p.a[i] * buf[i];
            uv += u[i] * buf[i];
        }
        if (!(fv > 0.0)) return std::nan("");
        return uv / fv;
    }
};

// max of the ratio over [lo, hi] and where it is attained
std::pair<double, double> segment_max(const Ratio& ratio, double lo, double hi) {
    constexpr int kSamples = 48;
    double best = -std::numeric_limits<double>::infinity(), arg = 0.5 * (lo + hi);
    int ib = -1;
    for (int k = 0; k <= kSamples; ++k) {
        const double s = lo + (hi - lo) * k / kSamples;
        const double v = ratio(s);
        if (std::isfinite(v) && v > best) {
            best = v;
            arg = s;
            ib = k;
        }
    }
    if (ib > 0 && ib < kSamples) {
        const double h = (hi - lo) / kSamples;
        double l = arg - h, r = arg + h;
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 40; ++it) {
            const double m1 = r - g * (r - l), m2 = l + g * (r - l);
            const double v1 = ratio(m1), v2 = ratio(m2);
            if (!(std::isfinite(v1) && std::isfinite(v2))) break;
            if (v1 < v2) l = m1;
            else r = m2;
        }
        const double s = 0.5 * (l + r);
        const double v = ratio(s);
        if (std::isfinite(v) && v > best) {
            best = v;
            arg = s;
        }
    }
    return {best, arg};
}

// Equalizes the per-segment maxima of u/f by moving the double zeros of u.
// Returns starting reference points for Newton.
std::vector<double> equalize(const Problem& p, SolverState& state, int& iterations) {
    const std::size_t K = p.sides.size();
    const std::size_t mL = static_cast<std::size_t>(std::count(p.sides.begin(), p.sides.end(), kLower));
    const double lo = p.chart.s_lo, hi = p.chart.s_hi, len = hi - lo;
    std::vector<double> fallback = chebyshev_interior(lo, hi, K);
    if (mL == 0) return fallback;

    const std::size_t nseg = mL + 1;
    std::vector<double> xi(nseg, len / static_cast<double>(nseg));
    std::vector<double> zs_s(mL), zs(mL), u;
    std::vector<double> deltas(nseg), args(nseg);
    double kappa = 0.5, prev = std::numeric_limits<double>::infinity();
    bool have = false;
    for (int it = 0; it < 400; ++it) {
        double acc = lo;
        for (std::size_t i = 0; i < mL; ++i) {
            acc += xi[i];
            zs_s[i] = acc;
            zs[i] = p.chart.x(acc);
        }
        if (!lower_candidate(p, zs, u)) break;
        Ratio ratio{p, u, std::vector<double>(dim(p))};
        // orient u to be nonnegative
        double pos = 0.0, neg = 0.0;
        for (int k = 0; k <= 400; ++k) {
            const double v = ratio(lo + len * k / 400.0);
            if (std::isfinite(v)) {
                pos = std::max(pos, v);
                neg = std::min(neg, v);
            }
        }
        if (-neg > pos) {
            for (double& v : u) v = -v;
        }
        bool bad = false;
        for (std::size_t i = 0; i < nseg; ++i) {
            const double a = i ? zs_s[i - 1] : lo;
            const double b = i < mL ? zs_s[i] : hi;
            const auto [d, s] = segment_max(ratio, a, b);
            if (!(d > 0.0) || !std::isfinite(d)) bad = true;
            deltas[i] = d;
            args[i] = s;
        }
        if (bad) break;
        have = true;
        iterations = it + 1;
        const double dmin = *std::min_element(deltas.begin(), deltas.end());
        const double dmax = *std::max_element(deltas.begin(), deltas.end());
        const double spread = dmax / dmin - 1.0;
        state.xi = xi;
        state.deltas = deltas;
        state.F.resize(nseg);
        for (std::size_t i = 0; i < nseg; ++i) state.F[i] = deltas[i] - dmin;
        if (spread < 1e-6) break;
        if (spread > prev) kappa = std::max(kappa * 0.5, 1.0 / 64.0);
        prev = spread;
        double tot = 0.0;
        for (std::size_t i = 0; i < nseg; ++i) {
            xi[i] *= std::pow(dmin / deltas[i], kappa);
            xi[i] = std::max(xi[i], 1e-12 * len);
            tot += xi[i];
        }
        for (double& v : xi) v *= len / tot;
    }
    if (!have) return fallback;

    // interleave zeros of u with the touch points found on each segment
    std::vector<double> s0;
    std::size_t l = 0;
    for (int side : p.sides) {
        if (side == kLower) {
            s0.push_back(zs_s[l++]);
        } else {
            const double a = l ? zs_s[l - 1] : lo;
            const double b = l < mL ? zs_s[l] : hi;
            const double m = 1e-3 * (b - a);
            s0.push_back(std::clamp(args[l], a + m, b - m));
        }
    }
    for (std::size_t j = 1; j < s0.size(); ++j)
        if (!(s0[j] > s0[j - 1])) return fallback;
    return s0;
}

struct Solved {
    std::vector<double> c;
    std::vector<double> s;
    std::vector<double> x;
    int iterations = 0;
    bool converged = false;
    SolverPath path = SolverPath::newton;
    double tangency = 0.0;
    Check check;
    SolverState state;
};

Solved solve(const Problem& p, const KarlinOptions& opt) {
    const std::size_t K = p.sides.size();
    if (p.fixed.size() + K != dim(p))
        throw Error(Errc::InvariantViolation,
                    fmt::format("{} conditions for {} coefficients", p.fixed.size() + K, dim(p)));
    auto finish = [&](const Run& r, SolverPath path, int extra) {
        Solved out;
        out.c.assign(r.st.c.data(), r.st.c.data() + r.st.c.size());
        out.s = r.s;
        out.x = r.st.x;
        out.iterations = r.iterations + extra;
        out.path = path;
        out.tangency = K ? r.st.worst : 0.0;
        out.check = check_parts(p, out.c, opt.check_points);
        out.converged = r.converged && admissible(out.check);
        return out;
    };
    const std::vector<double> s0 = opt.init == KarlinInit::chebyshev
                                       ? chebyshev_interior(p.chart.s_lo, p.chart.s_hi, K)
                                       : equispaced_interior(p.chart.s_lo, p.chart.s_hi, K);
    Solved first;
    bool tried = false;
    if (!opt.force_fixed_point) {
        const Run r = newton(p, s0, opt);
        if (r.st.ok) {
            first = finish(r, SolverPath::newton, 0);
            tried = true;
            if (first.converged) return first;
        }
    }
    SolverState state;
    int fp_iters = 0;
    const std::vector<double> s1 = equalize(p, state, fp_iters);
    const Run r = newton(p, s1, opt);
    if (r.st.ok) {
        Solved second = finish(r, SolverPath::fixed_point, fp_iters + (tried ? first.iterations : 0));
        second.state = std::move(state);
        if (second.converged || !tried) return second;
    }
    if (tried) return first;
    throw Error(Errc::NoConvergence, "interpolation system singular at every starting point");
}

void sort_zeros(std::vector<Zero>& z) {
    std::sort(z.begin(), z.end(), [](const Zero& u, const Zero& v) { return u.x < v.x; });
}

// Adds multiplicity at x, merging with an existing entry.
void add_zero(std::vector<Zero>& z, double x, int mult, const Domain& d) {
    for (Zero& e : z)
        if (e.x == x) {
            e.mult += mult;
            e.kind = d.is_endpoint(x) || e.mult % 2 ? ZeroKind::nodal : ZeroKind::non_nodal;
            return;
        }
    z.push_back({x, mult, d.is_endpoint(x) || mult % 2 ? ZeroKind::nodal : ZeroKind::non_nodal});
}

KarlinDecomposition assemble(const Problem& p, const Solved& sv, const std::vector<Zero>& shared) {
    KarlinDecomposition out;
    const Domain& d = p.family.domain();
    out.f_lower = {p.family, sv.c};
    std::vector<double> up(dim(p));
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = p.a[i] - sv.c[i];
    out.f_upper = {p.family, std::move(up)};
    out.shared = shared;
    std::vector<Zero> lz = shared, uz = shared;
    for (const Row& rw : p.fixed) {
        if (rw.coeff || rw.side == kPinned) continue;
        add_zero(rw.side == kLower ? lz : uz, rw.x, 1, d);
    }
    for (std::size_t j = 0; j < sv.x.size(); ++j)
        add_zero(p.sides[j] == kLower ? lz : uz, sv.x[j], 2, d);
    sort_zeros(lz);
    sort_zeros(uz);
    out.zeros_lower = {std::move(lz), d, true, {}};
    out.zeros_upper = {std::move(uz), d, true, {}};
    out.residual_sup = sv.check.residual;
    out.tangency_residual = sv.tangency;
    out.min_lower = sv.check.min_lower;
    out.min_upper = sv.check.min_upper;
    out.iterations = sv.iterations;
    out.converged = sv.converged;
    out.path = sv.path;
    out.state = sv.state;
    if (!sv.converged)
        out.note = fmt::format("tangency residual {:.3g}, grid minima {:.3g} / {:.3g}", sv.tangency,
                               sv.check.min_lower, sv.check.min_upper);
    return out;
}

KarlinDecomposition trivial(const SparsePoly& f, std::vector<Zero> shared) {
    KarlinDecomposition out;
    const Domain& d = f.family.domain();
    out.f_lower = f;
    out.f_upper = {f.family, std::vector<double>(f.coeffs.size(), 0.0)};
    out.shared = shared;
    out.zeros_lower = {shared, d, true, {}};
    out.zeros_upper = {std::move(shared), d, true, {}};
    out.converged = true;
    return out;
}

void check_coeffs(const SparsePoly& f) {
    if (f.coeffs.size() != f.family.size())
        throw Error(Errc::DimensionMismatch,
                    fmt::format("{} coefficients for a family of size {}", f.coeffs.size(), f.family.size()));
    if (f.family.size() == 0) throw Error(Errc::InvalidArgument, "empty family");
}

// Grid minimum of f, refined by golden section around each local minimum of the grid.
std::pair<double, double> refined_min(const SparsePoly& f, const std::vector<double>& g) {
    std::vector<double> v(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) v[j] = f.eval(g[j]);
    double best = v[0], arg = g[0];
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (v[j] < best) {
            best = v[j];
            arg = g[j];
        }
        if (j == 0 || j + 1 == g.size() || v[j] > v[j - 1] || v[j] > v[j + 1]) continue;
        double l = g[j - 1], r = g[j + 1];
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 60; ++it) {
            const double m1 = r - gr * (r - l), m2 = l + gr * (r - l);
            if (f.eval(m1) < f.eval(m2)) r = m2;
            else l = m1;
        }
        const double x = 0.5 * (l + r), y = f.eval(x);
        if (y < best) {
            best = y;
            arg = x;
        }
    }
    return {best, arg};
}

void require_positive(const SparsePoly& f, std::size_t npts) {
    const std::vector<double> g = verification_grid(f.family.domain(), npts);
    const auto [v, x] = refined_min(f, g);
    // weighted scale so the threshold is meaningful on unbounded domains
    auto w = [&](double t) {
        return f.family.domain().kind == DomainKind::closed_interval ? 1.0
                                                                      : 1.0 + std::abs(f.family.eval_basis(t, 0).back());
    };
    double S = 0.0;
    for (double t : g) S = std::max(S, std::abs(f.eval(t)) / w(t));
    if (!(v > 1e-12 * S * w(x))) throw Error(Errc::NotPositive, fmt::format("f({}) = {} is not positive", x, v));
}

// Zeros of f for the nonnegative modes. Interior zeros need even multiplicity.
std::vector<Zero> pinned_zeros(const SparsePoly& f) {
    ZeroOptions zo;
    zo.enforce_bound = false;
    const ZeroConfig zc = count_zeros(f, zo);
    const Domain& d = f.family.domain();
    for (const Zero& z : zc.zeros)
        if (!d.is_endpoint(z.x) && z.mult % 2)
            throw Error(Errc::OddInteriorMultiplicity,
                        fmt::format("zero at {} has odd multiplicity {}", z.x, z.mult));
    // a sign change without a detected odd zero still means f < 0 somewhere
    const std::vector<double> g = verification_grid(d, 2001);
    std::vector<double> v(g.size());
    double m = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) m = std::max(m, std::abs(v[j] = f.eval(g[j])));
    for (std::size_t j = 0; j < g.size(); ++j)
        if (v[j] < -1e-9 * m) throw Error(Errc::NotPositive, fmt::format("f({}) = {} is negative", g[j], v[j]));
    return zc.zeros;
}

int total_mult(const std::vector<Zero>& z) {
    int r = 0;
    for (const Zero& e : z) r += e.mult;
    return r;
}

int mult_at(const std::vector<Zero>& z, double x) {
    for (const Zero& e : z)
        if (e.x == x) return e.mult;
    return 0;
}

// Pinned rows for the zeros of f.
void add_pinned(Problem& p, const std::vector<Zero>& zeros) {
    for (const Zero& z : zeros) {
        for (int k = 0; k < z.mult; ++k) p.fixed.push_back({false, 0, z.x, k, kPinned});
        p.pinned.push_back(z.x);
    }
}

// Reference sides p_0..p_m alternate and end on the upper side.
int side_of(int m, int j) { return (m - j) % 2 == 0 ? kUpper : kLower; }

KarlinDecomposition solve_ab(const SparsePoly& f, const std::vector<Zero>& zeros, const KarlinOptions& opt) {
    const Domain& d = f.family.domain();
    const int n = f.family.n();
    const int r = total_mult(zeros);
    const int m = n - r;
    Problem p{f.family, f.coeffs, {}, {}, {Chart::identity, d.a, d.a, d.b}, {}};
    add_pinned(p, zeros);
    const int ma = mult_at(zeros, d.a), mb = mult_at(zeros, d.b);
    if (m >= 1) p.fixed.push_back({false, 0, d.a, ma, side_of(m, 0)});
    p.fixed.push_back({false, 0, d.b, mb, kUpper});
    for (int j = 1; j < m; ++j) p.sides.push_back(side_of(m, j));
    // endpoint rows of order > 0 sit on a zero of f: the touching part gets one more
    Solved sv = solve(p, opt);
    KarlinDecomposition out = assemble(p, sv, zeros);
    out.endpoint_forced = m % 2 == 0 && ((ma > 0) != (mb > 0));
    if (out.endpoint_forced) out.note += (out.note.empty() ? "" : "; ") + std::string("one endpoint prescribed");
    return out;
}

}  // namespace

KarlinDecomposition decompose_pos_ab(const SparsePoly& f, const KarlinOptions& opt) {
    check_coeffs(f);
    if (f.family.domain().kind != DomainKind::closed_interval)
        throw Error(Errc::InvalidArgument, "decompose_pos_ab needs a closed interval");
    require_positive(f, opt.check_points);
    if (f.family.n() == 0) return trivial(f, {});
    return solve_ab(f, {}, opt);
}

KarlinDecomposition decompose_nonneg_ab(const SparsePoly& f, const KarlinOptions& opt) {
    check_coeffs(f);
    if (f.family.domain().kind != DomainKind::closed_interval)
        throw Error(Errc::InvalidArgument, "decompose_nonneg_ab needs a closed interval");
    const std::vector<Zero> zeros = pinned_zeros(f);
    const int r = total_mult(zeros);
    if (r == 0) return decompose_pos_ab(f, opt);
    if (r >= f.family.n())
        throw Error(Errc::TooManyZeros, fmt::format("zeros of total multiplicity {} with n = {}", r, f.family.n()));
    return solve_ab(f, zeros, opt);
}

namespace {

bool power_like(const FamilySpec& fam) {
    return fam.variant() == Variant::power || fam.variant() == Variant::monomial;
}

// Drops f_0 and divides by x^{alpha_1}; only valid when a_0 = 0 and alpha_0 = 0.
SparsePoly factor_out(const SparsePoly& f) {
    const std::vector<double>& al = f.family.params();
    std::vector<double> coeffs(f.coeffs.begin() + 1, f.coeffs.end());
    FamilySpec fam;
    if (f.family.variant() == Variant::monomial) {
        std::vector<int> deg;
        for (std::size_t i = 1; i < al.size(); ++i) deg.push_back(static_cast<int>(std::lround(al[i] - al[1])));
        fam = FamilySpec::monomial(std::move(deg), f.family.domain());
    } else {
        std::vector<double> ex;
        for (std::size_t i = 1; i < al.size(); ++i) ex.push_back(al[i] - al[1]);
        fam = FamilySpec::power(std::move(ex), f.family.domain());
    }
    return {fam, std::move(coeffs)};
}

KarlinDecomposition lift(const KarlinDecomposition& d, const SparsePoly& f, int steps, double x0) {
    KarlinDecomposition out = d;
    auto pad = [&](const SparsePoly& q) {
        std::vector<double> c(static_cast<std::size_t>(steps), 0.0);
        c.insert(c.end(), q.coeffs.begin(), q.coeffs.end());
        return SparsePoly{f.family, std::move(c)};
    };
    out.f_lower = pad(d.f_lower);
    out.f_upper = pad(d.f_upper);
    const Domain& dom = f.family.domain();
    add_zero(out.shared, x0, steps, dom);
    add_zero(out.zeros_lower.zeros, x0, steps, dom);
    add_zero(out.zeros_upper.zeros, x0, steps, dom);
    sort_zeros(out.shared);
    sort_zeros(out.zeros_lower.zeros);
    sort_zeros(out.zeros_upper.zeros);
    return out;
}

}  // namespace

KarlinDecomposition decompose_halfline(const SparsePoly& f, PositivityMode mode, const KarlinOptions& opt) {
    check_coeffs(f);
    const FamilySpec& fam = f.family;
    const Domain& d = fam.domain();
    if (d.kind != DomainKind::left_closed_halfline)
        throw Error(Errc::InvalidArgument, "decompose_halfline needs a half-line domain");
    if (!power_like(fam) || fam.params().front() != 0.0)
        throw Error(Errc::InvalidArgument, "half-line decomposition needs a power family with alpha_0 = 0");
    if (const Verdict v = validate(fam); !v.ok) throw Error(Errc::InvalidArgument, v.violation);
    if (!(f.coeffs.back() > 0.0))
        throw Error(Errc::LeadingCoefficientNonpositive, fmt::format("a_n = {}", f.coeffs.back()));

    if (mode == PositivityMode::positive) {
        require_positive(f, opt.check_points);
        if (fam.n() == 0) return trivial(f, {});
        const int n = fam.n();
        Problem p{fam, f.coeffs, {}, {}, {Chart::halfline, d.a, 0.0, 1.0}, {}};
        p.fixed.push_back({false, 0, d.a, 0, side_of(n, 0)});
        p.fixed.push_back({true, n, 0.0, 0, kUpper});
        for (int j = 1; j < n; ++j) p.sides.push_back(side_of(n, j));
        return assemble(p, solve(p, opt), {});
    }

    // nonneg: strip x^{alpha_1} factors at 0, then pin the remaining zeros
    SparsePoly g = f;
    int steps = 0;
    double scale = 0.0;
    for (double c : f.coeffs) scale = std::max(scale, std::abs(c));
    while (d.a == 0.0 && g.family.size() > 1 && std::abs(g.coeffs.front()) <= 1e-14 * scale) {
        g = factor_out(g);
        ++steps;
    }
    if (!(g.eval(d.a) > 0.0))
        throw Error(Errc::ValueAtZeroNonpositive, fmt::format("f({}) = {} after factoring", d.a, g.eval(d.a)));
    const std::vector<Zero> zeros = pinned_zeros(g);
    const int r = total_mult(zeros);
    const int n = g.family.n();
    if (r > n) throw Error(Errc::TooManyZeros, fmt::format("zeros of total multiplicity {} with n = {}", r, n));
    KarlinDecomposition res;
    if (n == 0 || r == n) {
        res = trivial(g, zeros);
    } else {
        const int m = n - r;
        Problem p{g.family, g.coeffs, {}, {}, {Chart::halfline, d.a, 0.0, 1.0}, {}};
        add_pinned(p, zeros);
        p.fixed.push_back({false, 0, d.a, 0, side_of(m, 0)});
        p.fixed.push_back({true, n, 0.0, 0, kUpper});
        for (int j = 1; j < m; ++j) p.sides.push_back(side_of(m, j));
        res = assemble(p, solve(p, opt), zeros);
    }
    return steps ? lift(res, f, steps, d.a) : res;
}

KarlinDecomposition decompose_realline(const SparsePoly& f, PositivityMode mode, const KarlinOptions& opt) {
    check_coeffs(f);
    const FamilySpec& fam = f.family;
    if (fam.domain().kind != DomainKind::real_line)
        throw Error(Errc::InvalidArgument, "decompose_realline needs the real line");
    if (fam.variant() != Variant::monomial)
        throw Error(Errc::InvalidArgument, "real-line decomposition needs a monomial family");
    const std::vector<double>& deg = fam.params();
    for (std::size_t i = 0; i < deg.size(); ++i)
        if (deg[i] != static_cast<double>(i))
            throw Error(Errc::InvalidArgument, "real-line decomposition needs the degrees 0..2m");
    const int top = fam.n();
    if (top % 2) throw Error(Errc::OddDegree, fmt::format("top degree {} is odd", top));
    if (!(f.coeffs.back() > 0.0)) throw Error(Errc::NegativeLeading, fmt::format("a_{} = {}", top, f.coeffs.back()));

    std::vector<Zero> zeros;
    if (mode == PositivityMode::positive) require_positive(f, opt.check_points);
    else zeros = pinned_zeros(f);
    const int r = total_mult(zeros);
    if (top - r == 0) return trivial(f, zeros);
    const int m = (top - r) / 2;
    Problem p{fam, f.coeffs, {}, {}, {Chart::realline, 0.0, -1.0, 1.0}, {}};
    add_pinned(p, zeros);
    // f^* has degree below 2m - 1: the point at infinity is a double touch
    p.fixed.push_back({true, top, 0.0, 0, kUpper});
    p.fixed.push_back({true, top - 1, 0.0, 0, kUpper});
    for (int j = 0; j < 2 * m - 1; ++j) p.sides.push_back(j % 2 == 0 ? kLower : kUpper);
    return assemble(p, solve(p, opt), zeros);
}

KarlinDecomposition decompose(const SparsePoly& f, PositivityMode mode, const KarlinOptions& opt) {
    switch (f.family.domain().kind) {
        case DomainKind::closed_interval:
            return mode == PositivityMode::positive ? decompose_pos_ab(f, opt) : decompose_nonneg_ab(f, opt);
        case DomainKind::left_closed_halfline: return decompose_halfline(f, mode, opt);
        case DomainKind::real_line: return decompose_realline(f, mode, opt);
    }
    throw Error(Errc::InvalidArgument, "unknown domain kind");
}

}  // namespace tsys
