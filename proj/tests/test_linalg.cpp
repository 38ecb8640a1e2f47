#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tsys/linalg.hpp"
#include "tsys/lp.hpp"
#include "tsys/quadrature.hpp"

using namespace tsys;

TEST_CASE("long double LU determinant against permutation expansion") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int n = 1; n <= 7; ++n) {
        for (int rep = 0; rep < 5; ++rep) {
            Mat m(n, n);
            std::vector<std::vector<double>> a(n, std::vector<double>(n));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) a[i][j] = m(i, j) = u(rng);
            const double ref = static_cast<double>(oracle::leibniz_det(a));
            CHECK(std::fabs(det(m) - ref) <= 1e-13 * std::max(1.0, std::fabs(ref)));
        }
    }
    CHECK_THROWS((void)det(Mat::Identity(13, 13)));
}

TEST_CASE("bordered cofactors expand the determinant") {
    Mat rows(2, 3);
    rows << 1, 2, 3, 0, 1, 4;
    const auto c = bordered_cofactors(rows);
    Mat full(3, 3);
    full.row(0) << 5, -1, 2;
    full.bottomRows(2) = rows;
    CHECK(5 * c[0] - c[1] + 2 * c[2] == doctest::Approx(det(full)));
}

TEST_CASE("simplex agrees with basis enumeration") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_real_distribution<double> pos(0.1, 1);
    int compared = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const int m = 2 + rep % 2, n = 6;
        std::vector<std::vector<double>> A(m, std::vector<double>(n));
        std::vector<double> b(m), c(n);
        Mat Am(m, n);
        Vec bm(m), cm(n);
        std::vector<double> x0(n);
        for (auto& v : x0) v = pos(rng) * (u(rng) > 0 ? 1 : 0);
        for (int i = 0; i < m; ++i) {
            b[i] = 0;
            for (int j = 0; j < n; ++j) {
                A[i][j] = Am(i, j) = u(rng);
                b[i] += A[i][j] * x0[j];
            }
            bm(i) = b[i];
        }
        for (int j = 0; j < n; ++j) c[j] = cm(j) = pos(rng);
        double best = 0;
        const bool feas = oracle::brute_lp(A, b, c, best);
        const LpResult r = solve_lp(Am, bm, cm);
        if (!feas) continue;
        REQUIRE(r.status == LpStatus::optimal);
        CHECK(r.objective == doctest::Approx(best).epsilon(1e-9));
        CHECK((Am * r.x - bm).cwiseAbs().maxCoeff() < 1e-9);
        // dual feasibility and strong duality
        CHECK((cm - Am.transpose() * r.y).minCoeff() > -1e-9);
        CHECK(r.y.dot(bm) == doctest::Approx(best).epsilon(1e-9));
        ++compared;
    }
    CHECK(compared > 30);
}

TEST_CASE("infeasible LP returns a Farkas ray") {
    Mat A(2, 3);
    A << 1, 1, 1, 1, 2, 3;
    Vec b(2);
    b << 1, 5;  // x >= 0, sum 1 forces A2 x <= 3
    const LpResult r = solve_lp(A, b, Vec::Zero(3));
    REQUIRE(r.status == LpStatus::infeasible);
    CHECK((A.transpose() * r.y).maxCoeff() <= 1e-12);
    CHECK(r.y.dot(b) > 0);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    for (int n : {1, 2, 5, 8, 12}) {
        const auto& g = gauss_legendre(n);
        for (int k = 0; k < 2 * n; ++k) {
            double s = 0;
            for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * std::pow(g.x[i], k);
            const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
            CHECK(s == doctest::Approx(exact).epsilon(1e-13));
        }
    }
    CHECK(integrate([](double x) { return std::exp(x); }, 0, 1, 4) == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-14));
}
