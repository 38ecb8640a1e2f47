#include "tsys/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "tsys/error.hpp"
#include "tsys/grid.hpp"
#include "tsys/lp.hpp"
#include "tsys/zerocalc.hpp"
#include "optim.hpp"

namespace tsys {

double MomentFunctional::apply(std::span<const double> coeffs) const {
    if (coeffs.size() != values.size())
        throw Error(Errc::DimensionMismatch, fmt::format("{} coefficients for {} moments", coeffs.size(), values.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * values[i];
    return s;
}

std::vector<double> moments_of(const FamilySpec& family, const AtomicMeasure& mu) {
    std::vector<double> s(family.size(), 0.0), buf(family.size());
    for (const Atom& at : mu.atoms) {
        family.eval_basis_into(at.x, 0, buf);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += at.w * buf[i];
    }
    return s;
}

// ---- Hankel ----

const char* hankel_variant_name(HankelVariant v) noexcept {
    switch (v) {
        case HankelVariant::hamburger: return "hamburger";
        case HankelVariant::stieltjes: return "stieltjes";
        case HankelVariant::hausdorff: return "hausdorff";
        case HankelVariant::svenco: return "svenco";
    }
    return "?";
}

HankelVariant parse_hankel_variant(const std::string& s) {
    for (HankelVariant v : {HankelVariant::hamburger, HankelVariant::stieltjes, HankelVariant::hausdorff,
                            HankelVariant::svenco})
        if (s == hankel_variant_name(v)) return v;
    throw Error(Errc::Parse, fmt::format("unknown Hankel variant '{}'", s));
}

namespace {

void add_hankel(HankelVerdict& out, std::string label, const std::vector<double>& seq, double tol) {
    if (seq.empty()) return;
    const auto d = static_cast<Eigen::Index>((seq.size() - 1) / 2 + 1);
    HankelMatrixVerdict m;
    m.label = std::move(label);
    m.matrix.resize(d, d);
    double big = 1.0;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            m.matrix(i, j) = seq[static_cast<std::size_t>(i + j)];
            big = std::max(big, std::abs(m.matrix(i, j)));
        }
    Eigen::SelfAdjointEigenSolver<Mat> es(m.matrix, Eigen::EigenvaluesOnly);
    m.min_eigenvalue = es.eigenvalues().minCoeff();
    m.psd = m.min_eigenvalue >= -tol * big;
    out.psd = out.psd && m.psd;
    out.matrices.push_back(std::move(m));
}

}  // namespace

HankelVerdict hankel_check(std::span<const double> s, HankelVariant v, double tol) {
    if (s.empty()) throw Error(Errc::TooShort, "empty moment sequence");
    HankelVerdict out;
    out.variant = v;
    const std::vector<double> seq(s.begin(), s.end());
    auto shifted = [&](auto&& f, std::size_t drop) {
        std::vector<double> r;
        for (std::size_t i = 0; i + drop < seq.size(); ++i) r.push_back(f(i));
        return r;
    };
    add_hankel(out, "H(s)", seq, tol);
    const auto xs = shifted([&](std::size_t i) { return seq[i + 1]; }, 1);
    switch (v) {
        case HankelVariant::hamburger: break;
        case HankelVariant::stieltjes: add_hankel(out, "H(Xs)", xs, tol); break;
        case HankelVariant::hausdorff:
            add_hankel(out, "H(Xs)", xs, tol);
            add_hankel(out, "H((1-X)s)", shifted([&](std::size_t i) { return seq[i] - seq[i + 1]; }, 1), tol);
            break;
        case HankelVariant::svenco:
            add_hankel(out, "H((X^2-X)s)", shifted([&](std::size_t i) { return seq[i + 2] - seq[i + 1]; }, 2), tol);
            break;
    }
    return out;
}

// ---- extremal polynomials ----

const char* pattern_name(Pattern p) noexcept {
    switch (p) {
        case Pattern::interior_doubles: return "interior_doubles";
        case Pattern::endpoints_and_doubles: return "endpoints_and_doubles";
        case Pattern::left_and_doubles: return "left_and_doubles";
        case Pattern::doubles_and_right: return "doubles_and_right";
        case Pattern::doubles_at_infinity: return "doubles_at_infinity";
        case Pattern::left_doubles_at_infinity: return "left_doubles_at_infinity";
    }
    return "?";
}

Pattern parse_pattern(const std::string& s) {
    for (Pattern p : {Pattern::interior_doubles, Pattern::endpoints_and_doubles, Pattern::left_and_doubles,
                      Pattern::doubles_and_right, Pattern::doubles_at_infinity, Pattern::left_doubles_at_infinity})
        if (s == pattern_name(p)) return p;
    throw Error(Errc::Parse, fmt::format("unknown zero pattern '{}'", s));
}

std::vector<Pattern> patterns_for(const FamilySpec& family) {
    const int n = family.n();
    if (n < 0) throw Error(Errc::InvalidArgument, "empty family");
    const bool even = n % 2 == 0;
    switch (family.domain().kind) {
        case DomainKind::closed_interval:
            if (even) {
                if (n == 0) return {Pattern::interior_doubles};
                return {Pattern::interior_doubles, Pattern::endpoints_and_doubles};
            }
            return {Pattern::left_and_doubles, Pattern::doubles_and_right};
        case DomainKind::left_closed_halfline:
            if (even) {
                if (n == 0) return {Pattern::interior_doubles};
                return {Pattern::interior_doubles, Pattern::left_doubles_at_infinity};
            }
            return {Pattern::left_and_doubles, Pattern::doubles_at_infinity};
        case DomainKind::real_line:
            if (even) return {Pattern::interior_doubles};
            return {Pattern::doubles_at_infinity};
    }
    return {};
}

int pattern_doubles(const FamilySpec& family, Pattern p) {
    const int n = family.n();
    switch (p) {
        case Pattern::interior_doubles: return n / 2;
        case Pattern::endpoints_and_doubles: return n / 2 - 1;
        case Pattern::left_and_doubles:
        case Pattern::doubles_and_right:
        case Pattern::doubles_at_infinity: return (n - 1) / 2;
        case Pattern::left_doubles_at_infinity: return n / 2 - 1;
    }
    return 0;
}

SparsePoly extremal_test_poly(const FamilySpec& family, Pattern p, std::span<const double> theta) {
    const auto allowed = patterns_for(family);
    if (std::find(allowed.begin(), allowed.end(), p) == allowed.end())
        throw Error(Errc::InvalidArgument,
                    fmt::format("pattern {} does not apply to n = {} on this domain", pattern_name(p), family.n()));
    const auto k = static_cast<std::size_t>(pattern_doubles(family, p));
    if (theta.size() != k)
        throw Error(Errc::DimensionMismatch, fmt::format("pattern {} takes {} points, got {}", pattern_name(p), k,
                                                         theta.size()));
    const Domain& d = family.domain();
    for (double t : theta)
        if (!d.contains(t) || d.is_endpoint(t))
            throw Error(Errc::InvalidNodes, fmt::format("double zero {} is not interior", t));
    NodeSet nodes;
    const bool left = p == Pattern::endpoints_and_doubles || p == Pattern::left_and_doubles ||
                      p == Pattern::left_doubles_at_infinity;
    const bool right = p == Pattern::endpoints_and_doubles || p == Pattern::doubles_and_right;
    if (left) nodes.push_back({d.a, 1});
    for (double t : theta) nodes.push_back({t, 2});
    if (right) nodes.push_back({d.b, 1});
    const bool at_inf = p == Pattern::doubles_at_infinity || p == Pattern::left_doubles_at_infinity;
    if (!at_inf) return poly_from_zeros(family, nodes);
    SparsePoly q = poly_from_zeros(family.prefix(family.size() - 1), nodes);
    SparsePoly out{family, q.coeffs};
    out.coeffs.push_back(0.0);
    return out;
}

// ---- feasibility ----

const char* feasibility_name(Feasibility f) noexcept {
    switch (f) {
        case Feasibility::feasible: return "feasible";
        case Feasibility::infeasible: return "infeasible";
        case Feasibility::undecided: return "undecided";
    }
    return "?";
}

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Right end of the sampling window; the domain itself when bounded.
double window_end(const FamilySpec& fam) {
    const Domain& d = fam.domain();
    if (d.kind == DomainKind::closed_interval) return d.b;
    const double base = d.kind == DomainKind::real_line ? 0.0 : d.a;
    std::vector<double> buf(fam.size());
    auto fn = [&](double x) {
        fam.eval_raw(x, 0, buf.data());
        return std::abs(buf.back());
    };
    const double ref = fn(base + 1.0);
    double x = base + 1.0;
    while (x - base < 1e12 && !(fn(x) > 1e6 * ref)) x = base + 2.0 * (x - base);
    return std::max(base + 10.0, x);
}

std::vector<double> sample_grid(const FamilySpec& fam, double X, std::size_t m) {
    const Domain& d = fam.domain();
    std::vector<double> g;
    if (d.kind == DomainKind::closed_interval) {
        g = linspace(d.a, d.b, m);
        // extra resolution next to a
        const std::vector<double> t = linspace(0.0, 1.0, m / 8 + 2);
        for (double u : t) g.push_back(d.a + (d.b - d.a) * 0.05 * u * u);
    } else {
        const double lo = d.kind == DomainKind::real_line ? -X : d.a;
        const double mid_lo = d.kind == DomainKind::real_line ? -10.0 : d.a;
        const double mid_hi = d.kind == DomainKind::real_line ? 10.0 : d.a + 10.0;
        g = linspace(mid_lo, std::min(mid_hi, X), m / 2);
        if (X > mid_hi) {
            const std::size_t q = m / 4;
            for (std::size_t i = 1; i <= q; ++i) {
                const double r = std::pow(X / (mid_hi - mid_lo), static_cast<double>(i) / static_cast<double>(q));
                g.push_back(mid_lo + (mid_hi - mid_lo) * r);
                if (d.kind == DomainKind::real_line) g.push_back(-(mid_lo + (mid_hi - mid_lo) * r) + 0.0);
            }
        }
        (void)lo;
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

// Some function extending the family; the minimizing LP then prefers lower principal representations.
std::function<double(double)> next_function(const FamilySpec& fam) {
    const auto& p = fam.params();
    switch (fam.variant()) {
        case Variant::power:
        case Variant::monomial: {
            const double e = std::floor(*std::max_element(p.begin(), p.end())) + 1.0;
            return [e](double x) { return std::pow(std::abs(x), e); };
        }
        case Variant::exponential: {
            const double r = *std::max_element(p.begin(), p.end()) + 1.0;
            return [r](double x) { return std::exp(r * x); };
        }
        default: return [](double) { return 0.0; };
    }
}

struct GridLp {
    Mat A;  // scaled columns
    Vec b;
    std::vector<double> colscale;
    std::vector<double> rowscale;
};

GridLp build_lp(const FamilySpec& fam, const std::vector<double>& s, const std::vector<double>& xs) {
    const auto N = static_cast<Eigen::Index>(fam.size());
    const auto M = static_cast<Eigen::Index>(xs.size());
    GridLp g;
    g.A.resize(N, M);
    g.colscale.resize(xs.size());
    std::vector<double> buf(fam.size());
    for (Eigen::Index j = 0; j < M; ++j) {
        fam.eval_raw(xs[static_cast<std::size_t>(j)], 0, buf.data());
        const double cs = std::max(max_abs(buf), 1e-300);
        g.colscale[static_cast<std::size_t>(j)] = cs;
        for (Eigen::Index i = 0; i < N; ++i) g.A(i, j) = buf[static_cast<std::size_t>(i)] / cs;
    }
    g.b.resize(N);
    g.rowscale.resize(fam.size());
    for (Eigen::Index i = 0; i < N; ++i) {
        const double r = std::max(g.A.row(i).cwiseAbs().maxCoeff(), 1e-300);
        g.rowscale[static_cast<std::size_t>(i)] = 1.0 / r;
        g.A.row(i) /= r;
        g.b(i) = s[static_cast<std::size_t>(i)] / r;
    }
    return g;
}

// min |A w - b|_1 over w >= 0. Its dual is the best certificate with coefficients in a box.
LpResult l1_fit(const GridLp& g) {
    const auto N = g.A.rows();
    const auto M = g.A.cols();
    Mat A2(N, M + 2 * N);
    A2 << g.A, Mat::Identity(N, N), -Mat::Identity(N, N);
    Vec c2 = Vec::Zero(M + 2 * N);
    c2.tail(2 * N).setOnes();
    return solve_lp(A2, g.b, c2);
}

// -y in the original basis; nonnegative on the grid with L < 0 when y is a Farkas ray or an l1_fit dual.
std::vector<double> dual_coeffs(const LpResult& r, const GridLp& g) {
    std::vector<double> coef(g.rowscale.size());
    for (std::size_t i = 0; i < coef.size(); ++i) coef[i] = -r.y(static_cast<Eigen::Index>(i)) * g.rowscale[i];
    return coef;
}

double residual_of(const FamilySpec& fam, const std::vector<double>& s, const AtomicMeasure& mu) {
    const std::vector<double> m = moments_of(fam, mu);
    double r = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) r = std::max(r, std::abs(s[i] - m[i]));
    const double sc = max_abs(s);
    return sc > 0 ? r / sc : r;
}

// Support points at most `reach` grid cells apart become one atom at the weighted mean.
AtomicMeasure cluster(const std::vector<double>& xs, const std::vector<double>& w, std::size_t reach) {
    AtomicMeasure mu;
    std::size_t j = 0;
    while (j < xs.size()) {
        if (w[j] <= 0.0) {
            ++j;
            continue;
        }
        double tw = 0.0, tx = 0.0;
        std::size_t k = j, last = j;
        while (k < xs.size() && k <= last + reach) {
            if (w[k] > 0.0) {
                tw += w[k];
                tx += w[k] * xs[k];
                last = k;
            }
            ++k;
        }
        mu.atoms.push_back({tx / tw, tw});
        j = last + 1;
    }
    return mu;
}

// Least-squares fit of positions and weights to the moments. Endpoint atoms keep their position.
struct AtomFunctor : Eigen::DenseFunctor<double> {
    const FamilySpec* fam;
    const std::vector<double>* s;
    std::vector<double> rs;
    std::vector<double> fixed_x;  // NaN = free
    double lo, hi;

    AtomFunctor(const FamilySpec& f, const std::vector<double>& sv, std::vector<double> fx, int inputs)
        : Eigen::DenseFunctor<double>(inputs, static_cast<int>(sv.size())), fam(&f), s(&sv), fixed_x(std::move(fx)) {
        lo = f.domain().lower();
        hi = f.domain().upper();
        rs.resize(sv.size());
        const double sc = std::max(max_abs(sv), 1e-300);
        for (std::size_t i = 0; i < sv.size(); ++i) rs[i] = 1.0 / std::max(std::abs(sv[i]), 1e-3 * sc);
    }

    void unpack(const InputType& v, std::vector<Atom>& atoms) const {
        atoms.resize(fixed_x.size());
        Eigen::Index p = 0;
        for (std::size_t j = 0; j < fixed_x.size(); ++j) {
            atoms[j].x = std::isnan(fixed_x[j]) ? std::clamp(v(p++), lo, hi) : fixed_x[j];
            atoms[j].w = v(p++);
        }
    }

    int operator()(const InputType& v, ValueType& fv) const {
        std::vector<Atom> atoms;
        unpack(v, atoms);
        std::vector<double> buf(fam->size());
        for (std::size_t i = 0; i < s->size(); ++i) fv(static_cast<Eigen::Index>(i)) = -(*s)[i];
        for (const Atom& at : atoms) {
            fam->eval_raw(at.x, 0, buf.data());
            for (std::size_t i = 0; i < buf.size(); ++i) fv(static_cast<Eigen::Index>(i)) += at.w * buf[i];
        }
        for (std::size_t i = 0; i < s->size(); ++i) fv(static_cast<Eigen::Index>(i)) *= rs[i];
        return 0;
    }

    int df(const InputType& v, JacobianType& J) const {
        std::vector<Atom> atoms;
        unpack(v, atoms);
        J.setZero(values(), inputs());
        std::vector<double> f0(fam->size()), f1(fam->size());
        Eigen::Index p = 0;
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            fam->eval_raw(atoms[j].x, 0, f0.data());
            const bool free = std::isnan(fixed_x[j]);
            if (free) {
                fam->eval_raw(atoms[j].x, 1, f1.data());
                for (std::size_t i = 0; i < f1.size(); ++i)
                    J(static_cast<Eigen::Index>(i), p) = atoms[j].w * f1[i] * rs[i];
                ++p;
            }
            for (std::size_t i = 0; i < f0.size(); ++i) J(static_cast<Eigen::Index>(i), p) = f0[i] * rs[i];
            ++p;
        }
        return 0;
    }
};

bool polish_once(const FamilySpec& fam, const std::vector<double>& s, AtomicMeasure& mu, bool& dropped) {
    dropped = false;
    if (mu.atoms.empty()) return true;
    std::vector<double> fixed;
    std::vector<double> init;
    const Domain& d = fam.domain();
    const double width = d.kind == DomainKind::closed_interval ? d.b - d.a : 1.0;
    for (const Atom& at : mu.atoms) {
        const bool endpoint = d.has_lower() && std::abs(at.x - d.a) <= 1e-12 * width;
        const bool endpoint_b = d.has_upper() && std::abs(at.x - d.b) <= 1e-12 * width;
        if (endpoint || endpoint_b) {
            fixed.push_back(endpoint ? d.a : d.b);
        } else {
            fixed.push_back(std::numeric_limits<double>::quiet_NaN());
            init.push_back(at.x);
        }
        init.push_back(at.w);
    }
    const int nin = static_cast<int>(init.size());
    AtomFunctor fn(fam, s, fixed, nin);
    Vec v = Eigen::Map<const Vec>(init.data(), nin);
    try {
        Eigen::LevenbergMarquardt<AtomFunctor> lm(fn);
        lm.setMaxfev(400);
        lm.setXtol(1e-15);
        lm.setFtol(1e-15);
        lm.minimize(v);
    } catch (const Error&) {
        return false;
    }
    if (!v.allFinite()) return false;
    std::vector<Atom> atoms;
    fn.unpack(v, atoms);
    AtomicMeasure out;
    for (const Atom& at : atoms) {
        if (at.w > 0.0) out.atoms.push_back(at);
        else dropped = true;
    }
    std::sort(out.atoms.begin(), out.atoms.end(), [](const Atom& p, const Atom& q) { return p.x < q.x; });
    if (dropped) {
        // refit without the atoms that went negative, starting from the original positions
        AtomicMeasure keep;
        for (std::size_t j = 0; j < atoms.size(); ++j)
            if (atoms[j].w > 0.0) keep.atoms.push_back(mu.atoms[j]);
        mu = std::move(keep);
        return true;
    }
    mu = std::move(out);
    return true;
}

bool polish(const FamilySpec& fam, const std::vector<double>& s, AtomicMeasure& mu) {
    for (int round = 0; round < 8; ++round) {
        bool dropped = false;
        if (!polish_once(fam, s, mu, dropped)) return false;
        if (!dropped) return true;
        if (mu.atoms.empty()) return false;
    }
    return false;
}

struct Primal {
    AtomicMeasure mu;
    double residual = std::numeric_limits<double>::infinity();
    double gap = 0.0;
    bool grid_feasible = false;
    bool polished = false;
    std::optional<std::vector<double>> farkas;  // coefficient vector, nonneg on the grid with L < 0
    std::optional<std::vector<double>> l1_dual;  // same, from the least-|residual| fit
};

Primal primal(const FamilySpec& fam, const std::vector<double>& s, const std::vector<double>& xs) {
    Primal out;
    GridLp g = build_lp(fam, s, xs);
    const auto N = g.A.rows();
    const auto M = g.A.cols();
    const auto next = next_function(fam);
    Vec c(M);
    for (Eigen::Index j = 0; j < M; ++j) {
        const double v = next(xs[static_cast<std::size_t>(j)]) / g.colscale[static_cast<std::size_t>(j)];
        c(j) = std::isfinite(v) ? v : 0.0;
    }
    if (c.cwiseAbs().maxCoeff() > 0) c /= c.cwiseAbs().maxCoeff();
    LpResult r = solve_lp(g.A, g.b, c);
    if (r.status == LpStatus::unbounded) r = solve_lp(g.A, g.b, Vec::Zero(M));
    std::vector<double> w(xs.size(), 0.0);
    if (r.status == LpStatus::optimal) {
        out.grid_feasible = true;
        for (Eigen::Index j = 0; j < M; ++j) w[static_cast<std::size_t>(j)] = std::max(0.0, r.x(j));
    } else {
        out.gap = r.infeasibility;
        if (r.status == LpStatus::infeasible && r.y.size() == N) out.farkas = dual_coeffs(r, g);
        // least-|residual| fit: A w + u - v = s
        const LpResult r2 = l1_fit(g);
        if (r2.status != LpStatus::optimal) return out;
        if (r2.y.size() == N) out.l1_dual = dual_coeffs(r2, g);
        for (Eigen::Index j = 0; j < M; ++j) w[static_cast<std::size_t>(j)] = std::max(0.0, r2.x(j));
    }
    for (std::size_t j = 0; j < w.size(); ++j) w[j] /= g.colscale[j];
    for (std::size_t j = 0; j < w.size(); ++j)
        if (w[j] > 0.0) out.mu.atoms.push_back({xs[j], w[j]});
    out.residual = residual_of(fam, s, out.mu);
    if (!out.mu.atoms.empty()) {
        // re-solve the weights on the support; the simplex leaves ~1e-10 relative error
        AtomicMeasure ls = out.mu;
        const auto N2 = static_cast<Eigen::Index>(fam.size());
        const auto K = static_cast<Eigen::Index>(ls.atoms.size());
        Mat B(N2, K);
        Vec rhs(N2);
        std::vector<double> buf(fam.size());
        for (Eigen::Index k = 0; k < K; ++k) {
            fam.eval_raw(ls.atoms[static_cast<std::size_t>(k)].x, 0, buf.data());
            for (Eigen::Index i = 0; i < N2; ++i) B(i, k) = buf[static_cast<std::size_t>(i)] * g.rowscale[static_cast<std::size_t>(i)];
        }
        for (Eigen::Index i = 0; i < N2; ++i) rhs(i) = s[static_cast<std::size_t>(i)] * g.rowscale[static_cast<std::size_t>(i)];
        const Vec wk = B.colPivHouseholderQr().solve(rhs);
        if (wk.allFinite() && wk.minCoeff() > 0.0) {
            for (Eigen::Index k = 0; k < K; ++k) ls.atoms[static_cast<std::size_t>(k)].w = wk(k);
            const double rl = residual_of(fam, s, ls);
            if (rl < out.residual) {
                out.mu = std::move(ls);
                out.residual = rl;
            }
        }
    }
    // merged neighbours, then a local fit; kept only if it does not lose accuracy
    for (std::size_t reach : {1, 4}) {
        AtomicMeasure pol = cluster(xs, w, reach);
        if (!polish(fam, s, pol)) continue;
        const double rp = residual_of(fam, s, pol);
        if (rp <= std::max(out.residual, 1e-13)) {
            out.mu = std::move(pol);
            out.residual = rp;
            out.polished = true;
        }
    }
    return out;
}

std::vector<double> refine_around(const FamilySpec& fam, std::vector<double> xs, const AtomicMeasure& mu) {
    const Domain& d = fam.domain();
    for (const Atom& at : mu.atoms) {
        const auto it = std::lower_bound(xs.begin(), xs.end(), at.x);
        const double l = it == xs.begin() ? at.x : *std::prev(it);
        const double r = it == xs.end() ? at.x : *it;
        const double h = std::max(r - l, 1e-12);
        for (int k = -20; k <= 20; ++k) {
            const double t = at.x + h * k / 10.0;
            if (d.contains(t)) xs.push_back(t);
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

// xs is replaced by the last refined grid.
Primal refined_primal(const FamilySpec& fam, const std::vector<double>& s, std::vector<double>& xs,
                      const FeasibilityOptions& opt) {
    Primal pr = primal(fam, s, xs);
    for (int r = 0; r < opt.refinements && pr.residual > opt.tol; ++r) {
        xs = refine_around(fam, xs, pr.mu);
        Primal nx = primal(fam, s, xs);
        if (nx.residual <= pr.residual) {
            if (pr.farkas && !nx.farkas) nx.farkas = pr.farkas;
            if (pr.l1_dual && !nx.l1_dual) nx.l1_dual = pr.l1_dual;
            pr = std::move(nx);
        }
    }
    return pr;
}

// Smallest value over the domain window, with golden refinement of grid minima.
double certificate_min(const SparsePoly& p, const std::vector<double>& xs, double* where) {
    const std::vector<double> v = p.eval_grid(xs);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < xs.size(); ++j) {
        double val = v[j], at = xs[j];
        if (j && j + 1 < xs.size() && v[j] <= v[j - 1] && v[j] <= v[j + 1]) {
            const double t = detail::golden_max([&](double u) { return -p.eval(u); }, xs[j - 1], xs[j + 1]);
            const double pt = p.eval(t);
            if (pt < val) {
                val = pt;
                at = t;
            }
        }
        if (val < best) {
            best = val;
            if (where) *where = at;
        }
    }
    return best;
}

std::vector<double> normalized(std::vector<double> c) {
    const double m = max_abs(c);
    if (m > 0)
        for (double& x : c) x /= m;
    return c;
}

}  // namespace

FeasibilityVerdict sparse_feasibility(const MomentFunctional& L, const FeasibilityOptions& opt) {
    const FamilySpec& fam = L.family;
    const std::vector<double>& s = L.values;
    if (s.size() != fam.size()) throw Error(Errc::DimensionMismatch, "moment vector length differs from family size");
    if (const Verdict v = validate(fam); !v.ok) throw Error(Errc::InvalidArgument, v.violation);
    FeasibilityVerdict out;
    if (fam.variant() == Variant::power || fam.variant() == Variant::monomial)
        for (double e : fam.params())
            if (e != 0.0) out.determinacy_sum += 1.0 / std::abs(e);
    const double scale = max_abs(s);
    if (scale == 0.0) {
        out.status = Feasibility::feasible;
        out.witness = AtomicMeasure{};
        out.note = "zero functional";
        return out;
    }
    const double X = window_end(fam);
    out.window = X;
    std::vector<double> xs = sample_grid(fam, X, opt.grid);

    // primal: grid LP with local refinement around the support
    Primal pr = refined_primal(fam, s, xs, opt);
    out.gap = pr.gap;
    if (pr.residual <= opt.tol) {
        out.status = Feasibility::feasible;
        out.witness = pr.mu;
        out.witness_residual = pr.residual;
        out.note = pr.grid_feasible ? "grid LP feasible" : "boundary functional, polished support";
        return out;
    }

    // dual: nonnegative polynomial with L(p) < 0
    std::optional<std::vector<double>> best;
    double best_val = -opt.tol * scale;
    // basis elements positive on the grid; a ray dipping slightly below zero is lifted by one of them
    std::vector<std::pair<std::size_t, double>> positive;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        std::vector<double> e(fam.size(), 0.0);
        e[i] = 1.0;
        const double m = certificate_min(SparsePoly{fam, e}, xs, nullptr);
        if (m > 0.0) positive.push_back({i, m});
    }
    // points past the window where a certificate must stay nonnegative as well
    std::vector<double> tail;
    if (!fam.domain().has_upper() || !fam.domain().has_lower()) {
        for (double t = 2.0; t <= 1e8; t *= 2.0) {
            if (!fam.domain().has_upper()) tail.push_back(X * t);
            if (!fam.domain().has_lower()) tail.push_back(-X * t);
        }
    }
    auto tail_ok = [&](const std::vector<double>& c) {
        std::vector<double> buf(fam.size());
        for (double x : tail) {
            fam.eval_raw(x, 0, buf.data());
            double v = 0.0, mag = 0.0;
            for (std::size_t i = 0; i < buf.size(); ++i) {
                v += c[i] * buf[i];
                mag += std::abs(c[i] * buf[i]);
            }
            if (std::isfinite(mag) && v < -1e-10 * mag) return false;
        }
        return true;
    };
    auto consider = [&](const std::vector<double>& coef) {
        std::vector<double> c = normalized(coef);
        if (!(L.apply(c) < best_val)) return;
        const double m = certificate_min(SparsePoly{fam, c}, xs, nullptr);
        if (m < 0.0 && !positive.empty()) {
            // cheapest lift in terms of L
            std::size_t pick = 0;
            double cost = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < positive.size(); ++k) {
                const double ck = s[positive[k].first] / positive[k].second;
                if (ck < cost) {
                    cost = ck;
                    pick = k;
                }
            }
            c[positive[pick].first] += 2.0 * (-m) / positive[pick].second;
            c = normalized(c);
        }
        if (certificate_min(SparsePoly{fam, c}, xs, nullptr) < -1e-10 * scale) return;
        const double val = L.apply(c);
        if (!(val < best_val) || !tail_ok(c)) return;
        best_val = val;
        best = c;
    };
    // cutting planes: add the minimizer of the ray to the grid and re-solve until it is nonnegative
    auto cutting_planes = [&](std::vector<double> ray, bool farkas) {
        std::vector<double> cut = xs;
        for (int round = 0; round < 8; ++round) {
            const SparsePoly p{fam, normalized(ray)};
            double at = 0.0;
            if (certificate_min(p, cut, &at) >= -1e-12) {
                consider(ray);
                return;
            }
            cut.push_back(at);
            std::sort(cut.begin(), cut.end());
            const GridLp g = build_lp(fam, s, cut);
            const LpResult r = farkas ? solve_lp(g.A, g.b, Vec::Zero(g.A.cols())) : l1_fit(g);
            if (r.status != (farkas ? LpStatus::infeasible : LpStatus::optimal) || r.y.size() != g.A.rows()) return;
            ray = dual_coeffs(r, g);
        }
        consider(ray);
    };
    if (pr.farkas) cutting_planes(*pr.farkas, true);
    if (pr.l1_dual) cutting_planes(*pr.l1_dual, false);
    for (std::size_t i = 0; i < fam.size(); ++i) {
        std::vector<double> e(fam.size(), 0.0);
        e[i] = 1.0;
        consider(e);
    }
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const Domain& d = fam.domain();
    const double lo = d.kind == DomainKind::real_line ? -X : d.a;
    const double hi = d.kind == DomainKind::closed_interval ? d.b : X;
    auto theta_of = [&](const std::vector<double>& z, std::size_t k) {
        std::vector<double> w(k + 1), th(k);
        const double zm = *std::max_element(z.begin(), z.end());
        double tot = 0.0;
        for (std::size_t i = 0; i <= k; ++i) tot += (w[i] = std::exp(z[i] - zm));
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            acc += w[i] / tot;
            th[i] = lo + (hi - lo) * acc;
        }
        return th;
    };
    for (Pattern pat : patterns_for(fam)) {
        const auto k = static_cast<std::size_t>(pattern_doubles(fam, pat));
        auto value = [&](const std::vector<double>& z) {
            try {
                const SparsePoly p = extremal_test_poly(fam, pat, theta_of(z, k));
                return L.apply(normalized(p.coeffs));
            } catch (const Error&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        if (k == 0) {
            try {
                consider(extremal_test_poly(fam, pat, {}).coeffs);
            } catch (const Error&) {
            }
            continue;
        }
        std::vector<std::pair<double, std::vector<double>>> starts;
        for (int t = 0; t < opt.starts; ++t) {
            std::vector<double> z(k + 1);
            for (double& e : z) e = nd(rng);
            starts.push_back({value(z), z});
        }
        std::stable_sort(starts.begin(), starts.end(), [](const auto& u, const auto& w) { return u.first < w.first; });
        for (std::size_t t = 0; t < std::min<std::size_t>(4, starts.size()); ++t) {
            const std::vector<double> z = detail::nelder_mead(value, starts[t].second, 0.5, 600);
            try {
                consider(extremal_test_poly(fam, pat, theta_of(z, k)).coeffs);
            } catch (const Error&) {
            }
        }
    }
    if (best) {
        out.status = Feasibility::infeasible;
        out.certificate = SparsePoly{fam, *best};
        out.certificate_value = best_val;
        out.note = "nonnegative polynomial with negative value";
        return out;
    }
    out.status = Feasibility::undecided;
    out.note = fmt::format("grid LP infeasible (gap {:.3g}), no certificate below -tol", pr.gap);
    return out;
}

RecoveryResult recover_atoms(const MomentFunctional& L, const FeasibilityOptions& opt) {
    const FamilySpec& fam = L.family;
    const std::vector<double>& s = L.values;
    if (s.size() != fam.size()) throw Error(Errc::DimensionMismatch, "moment vector length differs from family size");
    RecoveryResult out;
    if (max_abs(s) == 0.0) return out;
    std::vector<double> xs = sample_grid(fam, window_end(fam), opt.grid);
    const Primal pr = refined_primal(fam, s, xs, opt);
    if (!pr.grid_feasible && pr.residual > opt.tol)
        throw Error(Errc::NotFeasible, fmt::format("no representing measure found (residual {:.3g})", pr.residual));
    out.measure = pr.mu;
    out.residual = pr.residual;
    out.polished = pr.polished;
    return out;
}

}  // namespace tsys
