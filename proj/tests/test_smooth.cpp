#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "tsys/colloc.hpp"
#include "tsys/error.hpp"
#include "tsys/grid.hpp"
#include "tsys/smooth.hpp"

using namespace tsys;

TEST_CASE("smoothing constants and lines") {
    const auto fam = FamilySpec::monomials(1, Domain::interval(0, 1));
    const FamilySpec s = gaussian_smooth(fam, KernelSpec::gaussian(0.01));
    for (double x : {0.3, 0.5, 0.77}) {
        const auto v = s.eval_basis(x, 0);
        CHECK(std::abs(v[0] - 1.0) < 1e-12);
        CHECK(std::abs(v[1] - x) < 1e-12);
        const auto d = s.eval_basis(x, 1);
        CHECK(std::abs(d[0]) < 1e-10);
        CHECK(std::abs(d[1] - 1.0) < 1e-10);
    }
    // near an end the constant continuation pulls the line towards f(a)
    CHECK(s.eval_basis(0.0, 0)[1] > 0.0);
    CHECK(smoothing_error_estimate(fam, KernelSpec::gaussian(0.01), std::vector<double>{0.2, 0.5}) < 1e-12);
}

TEST_CASE("smoothed derivatives match finite differences") {
    const auto fam = FamilySpec::power({0, 1, 3}, Domain::interval(0, 1));
    const FamilySpec s = gaussian_smooth(fam, KernelSpec::gaussian(0.05));
    const double h = 1e-5;
    for (double x : {0.1, 0.45, 0.9})
        for (int k = 1; k <= 2; ++k) {
            const auto p = s.eval_basis(x + h, k - 1), m = s.eval_basis(x - h, k - 1), d = s.eval_basis(x, k);
            for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs((p[i] - m[i]) / (2 * h) - d[i]) < 1e-6);
        }
}

TEST_CASE("smoothing {1, x, x^3} gives an ET-system inside the interval") {
    const auto fam = FamilySpec::monomial({0, 1, 3}, Domain::interval(0, 1));
    CHECK(certify(fam, Level::ET).level == Level::T);
    const FamilySpec s = gaussian_smooth(fam, KernelSpec::gaussian(0.05)).with_domain(Domain::interval(0.1, 0.9));
    GridSpec g;
    g.points = 21;
    g.wronskian_points = 401;
    const SystemCertificate c = certify(s, Level::ET, g);
    CHECK(c.level >= Level::ET);
}

TEST_CASE("smoothing converges in the interior as sigma shrinks") {
    const auto fam = FamilySpec::power({0, 0.5, 2}, Domain::interval(0, 1));
    double prev = INFINITY;
    for (double sg : {0.1, 0.05, 0.025}) {
        const FamilySpec s = gaussian_smooth(fam, KernelSpec::gaussian(sg));
        double err = 0.0;
        for (double x : linspace(0.3, 0.7, 41)) {
            const auto a = s.eval_basis(x, 0), b = fam.eval_basis(x, 0);
            for (std::size_t i = 0; i < 3; ++i) err = std::max(err, std::abs(a[i] - b[i]));
        }
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("kernel errors") {
    const auto fam = FamilySpec::monomials(1, Domain::interval(0, 1));
    CHECK_THROWS_AS((void)gaussian_smooth(fam, KernelSpec::gaussian(0.0)), Error);
    KernelSpec k = KernelSpec::gaussian(0.1);
    k.truncation = 2.0;
    CHECK_THROWS_AS((void)gaussian_smooth(fam, k), Error);
    k = KernelSpec::gaussian(0.1);
    k.panels = 1 << 20;
    CHECK_THROWS_WITH_AS((void)gaussian_smooth(fam, k), doctest::Contains("QuadratureBudgetExceeded"), Error);
}

TEST_CASE("total positivity checks") {
    const auto g6 = linspace(-1, 1, 6);
    SUBCASE("gaussian is STP_3") {
        const TpVerdict v = kernel_tp_check(KernelSpec::gaussian(1.0), g6, g6, 3);
        CHECK(v.pass);
        CHECK(v.min_det > 0);
        CHECK(v.tuples_checked == 400);
        CHECK(v.exhaustive);
    }
    SUBCASE("gaussian is ETP_3") {
        TpOptions o;
        o.extended = true;
        const TpVerdict v = kernel_tp_check(KernelSpec::gaussian(1.0), g6, g6, 3, o);
        CHECK(v.pass);
        CHECK(v.tuples_checked == 20 * 56);
    }
    SUBCASE("y^x") {
        const KernelSpec k = KernelSpec::from([](double x, double y, int dy) {
            double c = 1.0;
            for (int j = 0; j < dy; ++j) c *= x - j;
            return c * std::pow(y, x - dy);
        });
        const std::vector<double> xs{-1.0, 0.5, 1.0, 2.5}, ys{0.2, 0.5, 0.9, 1.0};
        CHECK(kernel_tp_check(k, xs, ys, 2).pass);
        TpOptions o;
        o.extended = true;
        CHECK(kernel_tp_check(k, xs, ys, 2, o).pass);
    }
    SUBCASE("rank one") {
        const KernelSpec k = KernelSpec::from([](double, double, int dy) { return dy ? 0.0 : 1.0; });
        const TpVerdict v = kernel_tp_check(k, g6, g6, 2);
        CHECK_FALSE(v.pass);
        CHECK(v.min_det == 0.0);
        CHECK(v.counter_x.size() == 2);
    }
    SUBCASE("sampling above the budget") {
        TpOptions o;
        o.budget = 50;
        const TpVerdict v = kernel_tp_check(KernelSpec::gaussian(1.0), g6, g6, 3, o);
        CHECK_FALSE(v.exhaustive);
        CHECK(v.tuples_checked == 50);
        CHECK(v.pass);
    }
}

TEST_CASE("composition of kernels follows Cauchy-Binet") {
    // K(x, z) = sum_m L(x, y_m) M(y_m, z) mu_m with L, M gaussian
    const std::vector<double> ym{-0.7, -0.1, 0.4, 1.2}, mu{0.3, 1.0, 0.6, 0.9};
    auto L = [](double x, double y) { return std::exp(-(x - y) * (x - y)); };
    auto M = [](double y, double z) { return std::exp(-2.0 * (y - z) * (y - z)); };
    auto K = [&](double x, double z) {
        double s = 0.0;
        for (std::size_t m = 0; m < ym.size(); ++m) s += L(x, ym[m]) * M(ym[m], z) * mu[m];
        return s;
    };
    const double x1 = -0.3, x2 = 0.8, z1 = -0.5, z2 = 0.6;
    const double lhs = static_cast<double>(oracle::leibniz_det({{K(x1, z1), K(x1, z2)}, {K(x2, z1), K(x2, z2)}}));
    double rhs = 0.0;
    for (std::size_t i = 0; i < ym.size(); ++i)
        for (std::size_t j = i + 1; j < ym.size(); ++j) {
            const double dl = L(x1, ym[i]) * L(x2, ym[j]) - L(x1, ym[j]) * L(x2, ym[i]);
            const double dm = M(ym[i], z1) * M(ym[j], z2) - M(ym[i], z2) * M(ym[j], z1);
            rhs += dl * dm * mu[i] * mu[j];
        }
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
    CHECK(rhs > 0);
}
