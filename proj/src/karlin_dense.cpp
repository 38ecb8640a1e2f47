#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "tsys/error.hpp"
#include "tsys/karlin.hpp"
#include "tsys/zerocalc.hpp"

namespace tsys {

namespace {

using cd = std::complex<double>;
using Poly = std::vector<double>;

cd horner(std::span<const double> c, cd x) {
    cd v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
}

cd horner_d(std::span<const double> c, cd x) {
    cd v = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) v = v * x + static_cast<double>(i) * c[i];
    return v;
}

double eval(const Poly& c, double x) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
}

Poly mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// c * prod (x - r_i)^2
Poly squares(double c, const std::vector<double>& r) {
    Poly p{c};
    for (double v : r) p = mul(p, {v * v, -2.0 * v, 1.0});
    return p;
}

std::vector<cd> from_roots(const std::vector<cd>& w) {
    std::vector<cd> q{1.0};
    for (const cd& r : w) {
        std::vector<cd> n(q.size() + 1, 0.0);
        for (std::size_t i = 0; i < q.size(); ++i) {
            n[i + 1] += q[i];
            n[i] -= r * q[i];
        }
        q = std::move(n);
    }
    return q;
}

std::size_t degree_of(std::span<const double> p) {
    double m = 0.0;
    for (double v : p) m = std::max(m, std::abs(v));
    std::size_t d = p.size();
    while (d > 1 && std::abs(p[d - 1]) <= 1e-14 * m) --d;
    return d - 1;
}

std::vector<double> real_roots(const Poly& p) {
    std::vector<double> r;
    for (const cd& z : poly_roots(p)) r.push_back(z.real());
    std::sort(r.begin(), r.end());
    return r;
}

Poly resize(Poly p, std::size_t n) {
    p.resize(n, 0.0);
    return p;
}

struct Split {
    Poly even;  // coefficients of y^0, y^2, ...
    Poly odd;   // coefficients of y^1, y^3, ...
};

Split split(const std::vector<double>& c) {
    Split s;
    for (std::size_t i = 0; i < c.size(); ++i) (i % 2 ? s.odd : s.even).push_back(c[i]);
    if (s.odd.empty()) s.odd.push_back(0.0);
    return s;
}

// P > 0 on [0, inf) with roots rho, leading coefficient lc and degree N:
// P(t) = lc (A(t)^2 + t B(t)^2) for N even, lc (t A(t)^2 + B(t)^2) for N odd, A monic.
struct HalfForm {
    Poly A;
    Poly B;
};

HalfForm half_form(const std::vector<cd>& rho) {
    std::vector<cd> w;
    for (const cd& r : rho) {
        cd s = std::sqrt(r);
        if (s.imag() < 0) s = -s;
        w.push_back(s);
    }
    const std::vector<cd> q = from_roots(w);
    std::vector<double> re(q.size()), im(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        re[i] = q[i].real();
        im[i] = q[i].imag();
    }
    const bool even = rho.size() % 2 == 0;
    const Split a = split(re), b = split(im);
    return {even ? a.even : a.odd, even ? b.odd : b.even};
}

}  // namespace

std::vector<std::complex<double>> poly_roots(std::span<const double> coeffs) {
    const std::size_t d = degree_of(coeffs);
    if (d == 0) return {};
    const double lead = coeffs[d];
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        if (i) C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
        C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d - 1)) = -coeffs[i] / lead;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    std::vector<cd> out;
    const std::span<const double> p = coeffs.first(d + 1);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        cd z = es.eigenvalues()(i);
        for (int it = 0; it < 6; ++it) {
            const cd v = horner(p, z), dv = horner_d(p, z);
            if (dv == 0.0) break;
            const cd zn = z - v / dv;
            if (!(std::abs(horner(p, zn)) < std::abs(v))) break;
            z = zn;
        }
        if (std::abs(z.imag()) <= 1e-14 * (1.0 + std::abs(z))) z = z.real();
        out.push_back(z);
    }
    std::sort(out.begin(), out.end(), [](const cd& a, const cd& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

LukacsForm lukacs_decompose(std::span<const double> pin, const Domain& d, int degree) {
    if (const std::string bad = d.check(); !bad.empty()) throw Error(Errc::InvalidArgument, bad);
    double pm = 0.0;
    for (double v : pin) pm = std::max(pm, std::abs(v));
    if (pm == 0.0) throw Error(Errc::ZeroPolynomial, "p = 0");
    const std::size_t deg = degree_of(pin);
    const std::size_t N = degree < 0 ? deg : static_cast<std::size_t>(degree);
    if (N < deg) throw Error(Errc::DimensionMismatch, fmt::format("nominal degree {} below deg p = {}", N, deg));
    const Poly p(pin.begin(), pin.begin() + static_cast<std::ptrdiff_t>(deg + 1));
    const double lc = p[deg];

    LukacsForm out;
    out.kind = d.kind;
    if (d.kind != DomainKind::closed_interval && N != deg)
        throw Error(Errc::DimensionMismatch, "nominal degree must equal deg p on unbounded domains");
    if (d.kind == DomainKind::real_line && (deg % 2 || lc <= 0.0))
        throw Error(Errc::NegativeSomewhere, "odd degree or negative leading coefficient on R");
    if (d.kind == DomainKind::left_closed_halfline && lc <= 0.0)
        throw Error(Errc::NegativeSomewhere, "negative leading coefficient on a half-line");

    // zeros on the domain become the factor Z; (b - x) is used at the right endpoint
    std::vector<cd> roots = poly_roots(p);
    std::vector<cd> rest;
    std::vector<double> real;
    for (const cd& z : roots) {
        const double tol = 1e-6 * (1.0 + std::abs(z));
        const double x = z.real();
        const bool on = std::abs(z.imag()) <= tol && x >= d.lower() - tol && x <= d.upper() + tol;
        if (on) real.push_back(x);
        else rest.push_back(z);
    }
    std::sort(real.begin(), real.end());
    for (std::size_t i = 0; i < real.size();) {
        std::size_t j = i + 1;
        while (j < real.size() && real[j] - real[j - 1] <= 1e-4 * (1.0 + std::abs(real[i]))) ++j;
        double z = 0.0;
        for (std::size_t k = i; k < j; ++k) z += real[k];
        z /= static_cast<double>(j - i);
        const int m = static_cast<int>(j - i);
        if (d.has_lower() && std::abs(z - d.a) <= 1e-6 * (1.0 + std::abs(d.a))) z = d.a;
        if (d.has_upper() && std::abs(z - d.b) <= 1e-6 * (1.0 + std::abs(d.b))) z = d.b;
        if (!d.is_endpoint(z) && m % 2)
            throw Error(Errc::NegativeSomewhere, fmt::format("sign change at {}", z));
        out.zfactors.push_back({z, m, d.is_endpoint(z) || m % 2 ? ZeroKind::nodal : ZeroKind::non_nodal});
        i = j;
    }
    Poly Z{1.0};
    double qlc = lc;
    int r = 0;
    for (const Zero& z : out.zfactors) {
        const bool right = d.has_upper() && z.x == d.b;
        for (int k = 0; k < z.mult; ++k) Z = mul(Z, right ? Poly{z.x, -1.0} : Poly{-z.x, 1.0});
        if (right && z.mult % 2) qlc = -qlc;
        r += z.mult;
    }
    if (!(qlc > 0.0) && !(d.kind == DomainKind::closed_interval))
        throw Error(Errc::NegativeSomewhere, "negative after removing zeros");
    const std::size_t Nq = N - static_cast<std::size_t>(r);
    out.odd = Nq % 2 == 1;

    Poly lower, upper;
    switch (d.kind) {
        case DomainKind::real_line: {
            std::vector<cd> w;
            for (const cd& z : rest)
                if (z.imag() > 0) w.push_back(z);
            if (w.size() * 2 != rest.size()) throw Error(Errc::NegativeSomewhere, "unpaired complex roots");
            const std::vector<cd> q = from_roots(w);
            Poly A(q.size()), B(q.size());
            for (std::size_t i = 0; i < q.size(); ++i) {
                A[i] = q[i].real();
                B[i] = q[i].imag();
            }
            out.alpha = qlc;
            out.x = real_roots(A);
            const std::size_t db = degree_of(B);
            out.beta = w.empty() ? 0.0 : qlc * B[db] * B[db];
            out.y = w.empty() ? std::vector<double>{} : real_roots(B);
            lower = mul(Z, squares(out.alpha, out.x));
            upper = w.empty() ? Poly{0.0} : mul(Z, squares(out.beta, out.y));
            break;
        }
        case DomainKind::left_closed_halfline: {
            std::vector<cd> rho;
            for (const cd& z : rest) rho.push_back(z - d.a);
            const HalfForm h = half_form(rho);
            const std::size_t db = degree_of(h.B);
            const double bl = h.B[db];
            std::vector<double> ra = real_roots(h.A), rb = real_roots(h.B);
            for (double& v : ra) v += d.a;
            for (double& v : rb) v += d.a;
            const Poly t{-d.a, 1.0};
            if (!out.odd) {
                out.alpha = qlc;
                out.x = ra;
                out.beta = Nq == 0 ? 0.0 : qlc * bl * bl;
                out.y = Nq == 0 ? std::vector<double>{} : rb;
                lower = mul(Z, squares(out.alpha, out.x));
                upper = Nq == 0 ? Poly{0.0} : mul(Z, mul(t, squares(out.beta, out.y)));
            } else {
                out.alpha = qlc * bl * bl;
                out.x = rb;
                out.beta = qlc;
                out.y = ra;
                lower = mul(Z, mul(t, squares(out.beta, out.y)));
                upper = mul(Z, squares(out.alpha, out.x));
            }
            break;
        }
        case DomainKind::closed_interval: {
            const double a = d.a, b = d.b, L = b - a;
            // P(s) = (1+s)^Nq q((a + b s)/(1 + s)) has roots (rho - a)/(b - rho) and -1 for the degree deficit
            std::vector<cd> rho;
            cd lcP = qlc;
            for (const cd& z : rest) {
                rho.push_back((z - a) / (b - z));
                lcP *= (b - z);
            }
            while (rho.size() < Nq) rho.push_back(-1.0);
            if (!(lcP.real() > 0.0)) throw Error(Errc::NegativeSomewhere, "negative on the interval");
            const HalfForm h = half_form(rho);
            const std::size_t db = degree_of(h.B);
            const double bl = h.B[db];
            const std::vector<double> sa = real_roots(h.A);
            const std::vector<double> sb = Nq == 0 ? std::vector<double>{} : real_roots(h.B);
            auto map = [&](const std::vector<double>& s, double& fac) {
                std::vector<double> x;
                fac = 1.0;
                for (double v : s) {
                    x.push_back((a + b * v) / (1.0 + v));
                    fac *= (1.0 + v) * (1.0 + v);
                }
                return x;
            };
            double fa = 1.0, fb = 1.0;
            const std::vector<double> xa = map(sa, fa), xb = map(sb, fb);
            const double scale = lcP.real() / std::pow(L, static_cast<double>(Nq));
            const double ca = scale * fa, cb = Nq == 0 ? 0.0 : scale * bl * bl * fb;
            const Poly left{-a, 1.0}, right{b, -1.0};
            if (!out.odd) {
                out.alpha = ca;
                out.x = xa;
                out.beta = cb;
                out.y = xb;
                lower = mul(Z, squares(ca, xa));
                upper = Nq == 0 ? Poly{0.0} : mul(Z, mul(mul(left, right), squares(cb, xb)));
            } else {
                out.alpha = ca;
                out.x = xa;
                out.beta = cb;
                out.y = xb;
                lower = mul(Z, mul(left, squares(ca, xa)));
                upper = mul(Z, mul(right, squares(cb, xb)));
            }
            break;
        }
    }
    out.lower = resize(lower, N + 1);
    out.upper = resize(upper, N + 1);
    double err = 0.0;
    for (std::size_t i = 0; i <= N; ++i) {
        const double pi = i < p.size() ? p[i] : 0.0;
        err = std::max(err, std::abs(out.lower[i] + out.upper[i] - pi));
    }
    out.reconstruction_error = err / pm;
    (void)eval;
    return out;
}

}  // namespace tsys
