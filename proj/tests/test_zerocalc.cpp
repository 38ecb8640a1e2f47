#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "tsys/error.hpp"
#include "tsys/grid.hpp"
#include "tsys/zerocalc.hpp"

using namespace tsys;

namespace {

// Determinant of [x^e; rows at (1,2),(2,4)] expanded symbolically (computed offline with
// exact rational arithmetic and frozen here).
const std::map<int, double> kReferenceDet = {
    {0, 1127323238400.0}, {2, -5392693493760.0}, {3, 5421403127808.0}, {5, -1264129351680.0},
    {8, 116225021568.0},  {11, -8847620160.0},   {13, 719077824.0},
};

}  // namespace

TEST_CASE("index fixtures") {
    ZeroConfig c;
    c.domain = Domain::interval(0, 1);
    CHECK(index_of(c) == 0);
    c.zeros = {{0.5, 1, ZeroKind::nodal}};
    CHECK(index_of(c) == 2);
    c.zeros = {{0.0, 1, ZeroKind::nodal}, {1.0, 1, ZeroKind::nodal}};
    CHECK(index_of(c) == 2);
    c.zeros = {{0.0, 2, ZeroKind::nodal}, {0.3, 4, ZeroKind::non_nodal}};
    CHECK(index_of(c) == 6);
}

TEST_CASE("poly_from_zeros fixtures") {
    const auto mono = FamilySpec::monomials(2, Domain::interval(0, 1));
    const auto p = poly_from_zeros(mono, {{0.5, 2}});
    CHECK(p.coeffs[2] > 0);
    CHECK(p.coeffs[1] / p.coeffs[2] == doctest::Approx(-1.0));
    CHECK(p.coeffs[0] / p.coeffs[2] == doctest::Approx(0.25));

    const auto lin = FamilySpec::monomials(1, Domain::interval(0.25, 3));
    const auto q = poly_from_zeros(lin, {{0.25, 1}});
    CHECK(q.coeffs[1] > 0);
    CHECK(q.coeffs[0] / q.coeffs[1] == doctest::Approx(-0.25));

    CHECK_THROWS_AS((void)poly_from_zeros(mono, {{0.2, 1}, {0.5, 2}}), Error);
    try {
        (void)poly_from_zeros(mono, {{0.2, 1}, {0.5, 2}});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::IndexTooLarge);
    }
}

TEST_CASE("seven-term sparse polynomial with zeros of order 2 and 4") {
    const auto fam = FamilySpec::power({0, 2, 3, 5, 8, 11, 13}, Domain::interval(0, 5));
    const auto raw = poly_from_zeros(fam, {{1, 2}, {2, 4}}, SignMode::raw);
    const std::vector<int> e = {0, 2, 3, 5, 8, 11, 13};
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double want = kReferenceDet.at(e[i]);
        CHECK(std::fabs(raw.coeffs[i] - want) <= 1e-9 * std::fabs(want));
    }
    const auto p = poly_from_zeros(fam, {{1, 2}, {2, 4}});
    const auto cfg = count_zeros(p);
    REQUIRE(cfg.zeros.size() == 2);
    CHECK(cfg.zeros[0].x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cfg.zeros[0].mult == 2);
    CHECK(cfg.zeros[0].kind == ZeroKind::non_nodal);
    CHECK(cfg.zeros[1].x == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(cfg.zeros[1].mult == 4);
    CHECK(cfg.zeros[1].kind == ZeroKind::non_nodal);
}

TEST_CASE("count_zeros fixtures") {
    const auto mono = FamilySpec::monomials(2, Domain::interval(0, 1));
    const auto sq = count_zeros(SparsePoly{mono, {0.25, -1, 1}});
    REQUIRE(sq.zeros.size() == 1);
    CHECK(sq.zeros[0].x == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sq.zeros[0].kind == ZeroKind::non_nodal);
    CHECK(sq.zeros[0].mult == 2);

    const auto ends = count_zeros(SparsePoly{mono, {0, 1, -1}});
    REQUIRE(ends.zeros.size() == 2);
    CHECK(ends.zeros[0].x == 0.0);
    CHECK(ends.zeros[1].x == 1.0);
    CHECK(ends.zeros[0].kind == ZeroKind::nodal);
    CHECK(ends.zeros[1].kind == ZeroKind::nodal);
    CHECK(index_of(ends) == 2);

    CHECK_THROWS_AS((void)count_zeros(SparsePoly{mono, {0, 0, 0}}), Error);
}

TEST_CASE("auto_nonneg output is nonnegative on a fine grid") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.55, 1.95);
    const auto fam = FamilySpec::power({0, 0.5, 1.0, 1.75, 2.5, 3.0}, Domain::interval(0.5, 2));
    for (int rep = 0; rep < 30; ++rep) {
        double x1 = u(rng), x2 = u(rng);
        if (x1 > x2) std::swap(x1, x2);
        if (x2 - x1 < 0.05) continue;
        NodeSet ns = rep % 2 ? NodeSet{{0.5, 1}, {x1, 2}, {x2, 2}} : NodeSet{{x1, 2}, {x2, 2}, {2.0, 1}};
        const auto p = poly_from_zeros(fam, ns);
        const auto vals = p.eval_grid(linspace(0.5, 2, 2000));
        double mx = 0, mn = 0;
        for (double v : vals) mx = std::max(mx, std::fabs(v)), mn = std::min(mn, v);
        CHECK(mn >= -1e-10 * mx);
    }
}

TEST_CASE("round trip through count_zeros") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0, 1);
    int done = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const int n = 2 + rep % 6;
        std::vector<double> ex = {0};
        double e = 0;
        for (int i = 1; i <= n; ++i) ex.push_back(e += 0.3 + u(rng));
        const auto fam = FamilySpec::power(ex, Domain::interval(0.5, 2));
        // random admissible pattern: optional endpoints, interior doubles and singles
        NodeSet ns;
        int left = n;
        const bool at_a = u(rng) < 0.5;
        const bool at_b = u(rng) < 0.5 && left - (at_a ? 1 : 0) >= 1;
        if (at_a) --left;
        if (at_b) --left;
        std::vector<int> mults;
        while (left > 0) {
            const int m = (left >= 2 && u(rng) < 0.6) ? 2 : 1;
            mults.push_back(m);
            left -= m;
        }
        const std::size_t k = mults.size();
        std::vector<double> pos(k);
        for (std::size_t i = 0; i < k; ++i) pos[i] = 0.5 + 1.5 * (i + 0.2 + 0.6 * u(rng)) / static_cast<double>(k);
        if (at_a) ns.push_back({0.5, 1});
        for (std::size_t i = 0; i < k; ++i) ns.push_back({pos[i], mults[i]});
        if (at_b) ns.push_back({2.0, 1});
        const auto p = poly_from_zeros(fam, ns, SignMode::raw);
        const auto cfg = count_zeros(p);
        std::string desc;
        for (const auto& nd : ns) desc += std::to_string(nd.x) + "/" + std::to_string(nd.mult) + " ";
        desc += "| ";
        for (const auto& z : cfg.zeros) desc += std::to_string(z.x) + "/" + std::to_string(z.mult) + " ";
        INFO(desc);
        REQUIRE(cfg.zeros.size() == ns.size());
        for (std::size_t i = 0; i < ns.size(); ++i) {
            CHECK(std::fabs(cfg.zeros[i].x - ns[i].x) <= 1e-7);
            CHECK(cfg.zeros[i].mult == ns[i].mult);
            const bool ep = ns[i].x == 0.5 || ns[i].x == 2.0;
            CHECK(cfg.zeros[i].kind == ((ep || ns[i].mult % 2) ? ZeroKind::nodal : ZeroKind::non_nodal));
        }
        ++done;
    }
    CHECK(done == 60);
}

TEST_CASE("zero-count bound over random coefficients") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> g;
    const auto fam = FamilySpec::exponential({-1, 0, 0.7, 1.5, 2.2}, Domain::interval(-1, 1));
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> c(fam.size());
        for (auto& v : c) v = g(rng);
        const auto cfg = count_zeros(SparsePoly{fam, c});
        const auto [k, l] = nodal_counts(cfg);
        CHECK(2 * k + l <= fam.n());
    }
}
