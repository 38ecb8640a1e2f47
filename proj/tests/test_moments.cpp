#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tsys/error.hpp"
#include "tsys/grid.hpp"
#include "tsys/moments.hpp"
#include "tsys/quadrature.hpp"
#include "tsys/zerocalc.hpp"

using namespace tsys;

namespace {

std::vector<std::vector<double>> to_rows(const Mat& m) {
    std::vector<std::vector<double>> r(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(i)].push_back(m(i, j));
    return r;
}

double grid_min(const SparsePoly& p, std::size_t n = 20001) {
    double m = INFINITY;
    for (double x : check_grid(p.family.domain(), n)) m = std::min(m, p.eval(x));
    return m;
}

AtomicMeasure random_measure(const Domain& d, int atoms, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    AtomicMeasure mu;
    const double lo = d.a, hi = d.kind == DomainKind::closed_interval ? d.b : d.a + 5.0;
    for (int k = 0; k < atoms; ++k) mu.atoms.push_back({lo + (hi - lo) * (0.05 + 0.9 * u(rng)), 0.2 + u(rng)});
    return mu;
}

}  // namespace

TEST_CASE("Hankel fixtures") {
    SUBCASE("point mass at 1 on [0,1]") {
        const std::vector<double> s(7, 1.0);
        const HankelVerdict v = hankel_check(s, HankelVariant::hausdorff);
        CHECK(v.psd);
        REQUIRE(v.matrices.size() == 3);
        CHECK(v.matrices[0].label == "H(s)");
        CHECK(v.matrices[2].label == "H((1-X)s)");
        CHECK(v.matrices[2].matrix.cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::abs(v.matrices[0].min_eigenvalue) < 1e-12);
    }
    SUBCASE("negative minor") {
        const std::vector<double> s{1.0, 0.0, -1.0};
        const HankelVerdict v = hankel_check(s, HankelVariant::hamburger);
        CHECK_FALSE(v.psd);
        CHECK(v.matrices[0].min_eigenvalue == doctest::Approx(-1.0));
    }
    SUBCASE("Stieltjes indeterminate moments") {
        std::vector<double> s;
        for (int k = 0; k <= 4; ++k) s.push_back(std::exp((k + 1) * (k + 1) / 4.0));
        const HankelVerdict v = hankel_check(s, HankelVariant::stieltjes);
        CHECK(v.psd);
        REQUIRE(v.matrices.size() == 2);
        CHECK(v.matrices[1].label == "H(Xs)");
        CHECK(v.matrices[0].matrix.rows() == 3);
        CHECK(v.matrices[1].matrix.rows() == 2);
    }
    SUBCASE("svenco shift") {
        // atoms at -1 and 2 lie in (-inf,0] u [1,inf); an atom at 0.5 does not
        auto mom = [](std::vector<std::pair<double, double>> at) {
            std::vector<double> s(7, 0.0);
            for (auto [x, w] : at)
                for (int k = 0; k < 7; ++k) s[static_cast<std::size_t>(k)] += w * std::pow(x, k);
            return s;
        };
        CHECK(hankel_check(mom({{-1, 1}, {2, 0.5}}), HankelVariant::svenco).psd);
        CHECK_FALSE(hankel_check(mom({{0.5, 1}}), HankelVariant::svenco).psd);
    }
    CHECK_THROWS_WITH_AS((void)hankel_check(std::vector<double>{}, HankelVariant::hamburger),
                         doctest::Contains("TooShort"), Error);
}

TEST_CASE("Hankel eigenvalues agree with the bisection oracle") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int t = 0; t < 40; ++t) {
        std::vector<double> s(static_cast<std::size_t>(1 + t % 11));
        for (double& v : s) v = nd(rng);
        for (HankelVariant hv : {HankelVariant::hamburger, HankelVariant::stieltjes, HankelVariant::hausdorff,
                                 HankelVariant::svenco}) {
            const HankelVerdict v = hankel_check(s, hv);
            for (const auto& m : v.matrices) {
                REQUIRE(m.matrix.rows() <= 6);
                CHECK(std::abs(m.min_eigenvalue - oracle::min_eigenvalue(to_rows(m.matrix))) < 1e-10);
            }
        }
    }
}

TEST_CASE("Stieltjes densities share their moments") {
    for (double c : {-1.0, 0.0, 1.0}) {
        for (int k = 0; k <= 4; ++k) {
            // x = e^u; dx = e^u du, so the integrand is e^{(k+1)u} (1 + c sin 2 pi u) e^{-u^2} / sqrt(pi)
            const double v = integrate(
                [&](double u) {
                    return std::exp((k + 1) * u - u * u) * (1.0 + c * std::sin(2.0 * std::numbers::pi * u)) /
                           std::sqrt(std::numbers::pi);
                },
                -40.0, std::log(1e6), 2000);
            const double s = std::exp((k + 1) * (k + 1) / 4.0);
            CAPTURE(c);
            CAPTURE(k);
            CHECK(std::abs(v - s) <= 1e-4 * s);
        }
    }
}

TEST_CASE("extremal polynomials") {
    SUBCASE("interior double for three power functions matches the bordered determinant") {
        const auto fam = FamilySpec::power({0, 0.7, 2.0}, Domain::interval(0.5, 2));
        const double x1 = 1.1;
        const SparsePoly p = extremal_test_poly(fam, Pattern::interior_doubles, std::vector<double>{x1});
        const auto f1 = fam.eval_basis(x1, 0), d1 = fam.eval_basis(x1, 1);
        double ratio = 0.0;
        for (double x : {0.6, 0.9, 1.5, 1.9}) {
            const auto fx = fam.eval_basis(x, 0);
            const double det = static_cast<double>(oracle::leibniz_det({fx, f1, d1}));
            const double r = p.eval(x) / det;
            if (ratio == 0.0) ratio = r;
            CHECK(r == doctest::Approx(ratio).epsilon(1e-10));
            CHECK(p.eval(x) > 0);
        }
        CHECK(std::abs(p.eval(x1)) < 1e-12);
    }
    SUBCASE("linear patterns on an interval") {
        const auto fam = FamilySpec::monomials(1, Domain::interval(1, 3));
        const SparsePoly l = extremal_test_poly(fam, Pattern::left_and_doubles, {});
        CHECK(l.coeffs[1] > 0);
        CHECK(l.coeffs[0] / l.coeffs[1] == doctest::Approx(-1.0));
        const SparsePoly r = extremal_test_poly(fam, Pattern::doubles_and_right, {});
        CHECK(r.coeffs[1] < 0);
        CHECK(r.coeffs[0] / r.coeffs[1] == doctest::Approx(-3.0));
    }
    SUBCASE("constant patterns") {
        const auto one = FamilySpec::monomials(0, Domain::interval(0, 1));
        const SparsePoly p = extremal_test_poly(one, Pattern::interior_doubles, {});
        CHECK(p.coeffs[0] > 0);
        const auto half = FamilySpec::power({0, 1.5}, Domain::halfline(0));
        const SparsePoly q = extremal_test_poly(half, Pattern::doubles_at_infinity, {});
        CHECK(q.coeffs[0] > 0);
        CHECK(q.coeffs[1] == 0.0);
    }
    SUBCASE("random patterns are nonnegative with the prescribed zeros") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const std::vector<FamilySpec> fams{
            FamilySpec::power({0, 0.5, 1.3, 2.0, 3.1}, Domain::interval(0.2, 2)),
            FamilySpec::power({0, 1, 2.5, 3, 4.5, 5}, Domain::interval(0, 1.5)),
            FamilySpec::power({0, 0.5, 1.5, 2.0, 3.5}, Domain::halfline(0)),
            FamilySpec::power({0, 1, 1.5, 2.5}, Domain::halfline(0)),
            FamilySpec::monomials(4, Domain::real_line()),
        };
        for (const auto& fam : fams) {
            for (Pattern pat : patterns_for(fam)) {
                const auto k = static_cast<std::size_t>(pattern_doubles(fam, pat));
                for (int t = 0; t < 5; ++t) {
                    std::vector<double> th(k);
                    const Domain& d = fam.domain();
                    const double lo = d.has_lower() ? d.a : -3.0, hi = d.has_upper() ? d.b : lo + 4.0;
                    for (double& v : th) v = lo + (hi - lo) * (0.05 + 0.9 * u(rng));
                    std::sort(th.begin(), th.end());
                    const SparsePoly p = extremal_test_poly(fam, pat, th);
                    double big = 0.0;
                    for (double c : p.coeffs) big = std::max(big, std::abs(c));
                    CAPTURE(pattern_name(pat));
                    CHECK(grid_min(p) >= -1e-9 * big);
                    for (double v : th) CHECK(std::abs(p.eval(v)) <= 1e-9 * big * (1 + std::pow(std::abs(v), 6)));
                }
            }
        }
    }
    CHECK_THROWS_AS((void)extremal_test_poly(FamilySpec::monomials(2, Domain::interval(0, 1)),
                                             Pattern::left_and_doubles, std::vector<double>{0.5}),
                    Error);
    CHECK(parse_pattern("doubles_and_right") == Pattern::doubles_and_right);
}

TEST_CASE("feasibility fixtures") {
    const auto fam = FamilySpec::power({0, 0.5, 1, 2}, Domain::interval(0.1, 1));
    SUBCASE("two atoms") {
        const AtomicMeasure mu{{{0.2, 0.3}, {0.8, 0.7}}};
        const MomentFunctional L{fam, moments_of(fam, mu)};
        const FeasibilityVerdict v = sparse_feasibility(L);
        REQUIRE(v.status == Feasibility::feasible);
        REQUIRE(v.witness);
        const auto m = moments_of(fam, *v.witness);
        for (std::size_t i = 0; i < m.size(); ++i) CHECK(std::abs(m[i] - L.values[i]) < 1e-8);
        CHECK(v.witness->atoms.size() <= fam.size());
        CHECK(v.determinacy_sum == doctest::Approx(2.0 + 1.0 + 0.5));
    }
    SUBCASE("negative mass") {
        const AtomicMeasure mu{{{0.2, 0.3}, {0.8, 0.7}}};
        std::vector<double> s = moments_of(fam, mu);
        for (double& v : s) v = -v;
        const MomentFunctional L{fam, s};
        const FeasibilityVerdict v = sparse_feasibility(L);
        REQUIRE(v.status == Feasibility::infeasible);
        REQUIRE(v.certificate);
        CHECK(L.apply(*v.certificate) < -1e-8);
        CHECK(grid_min(*v.certificate) >= -1e-10);
    }
    SUBCASE("single interior atom") {
        const AtomicMeasure mu{{{0.43, 1.7}}};
        const MomentFunctional L{fam, moments_of(fam, mu)};
        const FeasibilityVerdict v = sparse_feasibility(L);
        REQUIRE(v.status == Feasibility::feasible);
        REQUIRE(v.witness->atoms.size() == 1);
        CHECK(v.witness->atoms[0].x == doctest::Approx(0.43).epsilon(1e-8));
        CHECK(v.witness_residual < 1e-8);
    }
    SUBCASE("zero functional") {
        const FeasibilityVerdict v = sparse_feasibility(MomentFunctional{fam, {0, 0, 0, 0}});
        CHECK(v.status == Feasibility::feasible);
        CHECK(v.witness->atoms.empty());
    }
}

TEST_CASE("atom recovery") {
    const auto fam = FamilySpec::monomials(3, Domain::interval(0, 1));
    SUBCASE("two atoms") {
        const AtomicMeasure mu{{{0.25, 0.5}, {0.75, 0.5}}};
        const RecoveryResult r = recover_atoms(MomentFunctional{fam, moments_of(fam, mu)});
        REQUIRE(r.measure.atoms.size() == 2);
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(std::abs(r.measure.atoms[j].x - mu.atoms[j].x) < 1e-7);
            CHECK(std::abs(r.measure.atoms[j].w - mu.atoms[j].w) < 1e-7);
        }
        CHECK(r.residual < 1e-8);
    }
    SUBCASE("off-grid pair") {
        const AtomicMeasure mu{{{0.3141, 0.2}, {0.8123, 1.1}}};
        const RecoveryResult r = recover_atoms(MomentFunctional{fam, moments_of(fam, mu)});
        REQUIRE(r.measure.atoms.size() == 2);
        for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(r.measure.atoms[j].x - mu.atoms[j].x) < 1e-7);
    }
    SUBCASE("close pair on the half-line, sparse exponents") {
        // boundary functional; the grid fit splits each atom and leaves stray mass
        const auto sparse = FamilySpec::power({0, 0.8097, 1.926, 2.6295, 3.8985, 5.7622, 7.3148}, Domain::halfline(0));
        const AtomicMeasure mu{{{1.8784050773308223, 0.767562172816155}, {2.001616941056364, 1.0147072420901573}}};
        const MomentFunctional L{sparse, moments_of(sparse, mu)};
        CHECK(sparse_feasibility(L).status == Feasibility::feasible);
        const RecoveryResult r = recover_atoms(L);
        REQUIRE(r.measure.atoms.size() == 2);
        for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(r.measure.atoms[j].x - mu.atoms[j].x) < 1e-7);
        CHECK(r.residual < 1e-12);
    }
    SUBCASE("one atom") {
        const AtomicMeasure mu{{{0.6180339, 2.0}}};
        const RecoveryResult r = recover_atoms(MomentFunctional{fam, moments_of(fam, mu)});
        REQUIRE(r.measure.atoms.size() == 1);
        CHECK(r.measure.atoms[0].x == doctest::Approx(0.6180339).epsilon(1e-8));
        CHECK(r.measure.atoms[0].w == doctest::Approx(2.0).epsilon(1e-8));
    }
    SUBCASE("zero") {
        CHECK(recover_atoms(MomentFunctional{fam, {0, 0, 0, 0}}).measure.atoms.empty());
    }
    SUBCASE("not a moment vector") {
        CHECK_THROWS_WITH_AS((void)recover_atoms(MomentFunctional{fam, {1, 0, -1, 0}}), doctest::Contains("NotFeasible"),
                             Error);
    }
}

TEST_CASE("feasible and infeasible never overlap on random instances") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int feas = 0, infeas = 0;
    for (int t = 0; t < 60; ++t) {
        const Domain d = t % 2 ? Domain::interval(0.1 + u(rng), 2.5) : Domain::halfline(0);
        std::vector<double> ex{0.0};
        const int n = 2 + t % 4;
        for (int i = 0; i < n; ++i) ex.push_back(ex.back() + 0.5 + 1.5 * u(rng));
        const auto fam = FamilySpec::power(ex, d);
        const AtomicMeasure mu = random_measure(d, 1 + t % 4, rng);
        std::vector<double> s = moments_of(fam, mu);
        double scale = 0.0;
        for (double v : s) scale = std::max(scale, std::abs(v));
        const bool perturb = t % 3 == 0;
        if (perturb) s[static_cast<std::size_t>(t) % s.size()] -= scale * (0.05 + 0.5 * u(rng));
        const FeasibilityVerdict v = sparse_feasibility(MomentFunctional{fam, s});
        CAPTURE(t);
        if (!perturb) CHECK(v.status == Feasibility::feasible);
        if (v.status == Feasibility::feasible) {
            ++feas;
            CHECK(v.witness_residual <= 1e-8);
            CHECK(v.witness->atoms.size() <= fam.size());
            CHECK_FALSE(v.certificate);
        } else if (v.status == Feasibility::infeasible) {
            ++infeas;
            double big = 0.0;
            for (double c : v.certificate->coeffs) big = std::max(big, std::abs(c));
            CHECK(grid_min(*v.certificate) >= -1e-10 * scale * big);
            CHECK(MomentFunctional{fam, s}.apply(*v.certificate) <= -1e-8 * scale);
            CHECK_FALSE(v.witness);
        }
    }
    CHECK(feas > 0);
    CHECK(infeas > 0);
}
