#include <doctest.h>

#include <cmath>

#include "tsys/error.hpp"
#include "tsys/family.hpp"
#include "tsys/grid.hpp"

using namespace tsys;

TEST_CASE("eval_basis fixtures") {
    const auto mono = FamilySpec::monomial({0, 1, 2}, Domain::interval(-5, 5));
    CHECK(mono.eval_basis(2.0, 0) == std::vector<double>{1, 2, 4});

    const auto pw = FamilySpec::power({0, 2, 3}, Domain::interval(0, 2));
    CHECK(pw.eval_basis(1.0, 1) == std::vector<double>{0, 2, 3});

    const auto ex = FamilySpec::exponential({0, 1}, Domain::interval(-1, 1));
    CHECK(ex.eval_basis(0.0, 5) == std::vector<double>{0, 1});
}

TEST_CASE("eval_basis errors") {
    const auto pw = FamilySpec::power({0, 0.5}, Domain::interval(0, 1));
    CHECK_THROWS_AS((void)pw.eval_basis(2.0, 0), Error);
    try {
        (void)pw.eval_basis(0.0, 1);
        FAIL("expected NonDifferentiable");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonDifferentiable);
    }
    CHECK(pw.eval_basis(0.0, 0) == std::vector<double>{1, 0});

    // integer exponents at 0 use the falling factorial exactly
    const auto p3 = FamilySpec::power({0, 3}, Domain::interval(0, 1));
    CHECK(p3.eval_basis(0.0, 3) == std::vector<double>{0, 6});
    CHECK(p3.eval_basis(0.0, 4) == std::vector<double>{0, 0});
}

TEST_CASE("rational derivatives") {
    const auto r = FamilySpec::rational({0.5, 2}, Domain::interval(0, 1));
    const auto v = r.eval_basis(1.0, 2);
    CHECK(v[0] == doctest::Approx(2.0 / std::pow(1.5, 3)));
    CHECK(v[1] == doctest::Approx(2.0 / 27.0));
}

TEST_CASE("validate") {
    CHECK(validate(FamilySpec::power({0, 2, 3}, Domain::interval(0, 1))).ok);
    const auto v1 = validate(FamilySpec::power({0.5, 1}, Domain::interval(0, 1)));
    CHECK_FALSE(v1.ok);
    CHECK(v1.violation == "α_0 ≠ 0 with 0 in domain");
    const auto v2 = validate(FamilySpec::rational({-2, 1}, Domain::interval(1, 3)));
    CHECK_FALSE(v2.ok);
    CHECK(v2.violation == "−α_0 = 2 ≥ a = 1");
    CHECK_FALSE(validate(FamilySpec::power({0, 2, 1}, Domain::interval(1, 2))).ok);
    CHECK_FALSE(validate(FamilySpec::power({-1, 2}, Domain::interval(0, 2))).ok);
    CHECK(validate(FamilySpec::power({-1, 2}, Domain::interval(0.5, 2))).ok);
    CHECK_FALSE(validate(FamilySpec::power({0, 0.5}, Domain::interval(-1, 1))).ok);
    CHECK(validate(FamilySpec::power({0, 0.5}, Domain::interval(0, 1))).ok);
    CHECK_FALSE(validate(FamilySpec::power({0, 1}, Domain::interval(1, 1))).ok);
    CHECK_FALSE(validate(FamilySpec::rational({0, 1}, Domain::real_line())).ok);
}

TEST_CASE("derivative matches central differences for integer powers") {
    const auto fam = FamilySpec::power({0, 1, 2, 3, 5, 7}, Domain::interval(0.2, 1.8));
    const double h = 1e-5;
    const auto xs = linspace(0.2, 1.8, 102);
    for (int k = 1; k <= 4; ++k) {
        for (std::size_t j = 1; j + 1 < xs.size(); ++j) {
            const auto d = fam.eval_basis(xs[j], k);
            const auto up = fam.eval_basis(xs[j] + h, k - 1);
            const auto dn = fam.eval_basis(xs[j] - h, k - 1);
            for (std::size_t i = 0; i < d.size(); ++i) {
                const double fd = (up[i] - dn[i]) / (2 * h);
                CHECK(std::fabs(fd - d[i]) <= 1e-6 * std::max(1.0, std::fabs(d[i])));
            }
        }
    }
}

TEST_CASE("eval_basis is deterministic") {
    const auto fam = FamilySpec::power({0, 0.3, 1.7, 2.2}, Domain::interval(0.1, 3));
    for (double x : linspace(0.1, 3, 17)) {
        const auto a = fam.eval_basis(x, 2);
        const auto b = fam.eval_basis(x, 2);
        CHECK(a == b);
    }
}

TEST_CASE("signs, prefix and extension") {
    const auto fam = FamilySpec::monomials(2, Domain::interval(0, 1));
    const auto s = fam.with_signs({1, -1, 1});
    CHECK(s.eval_basis(0.5, 0) == std::vector<double>{1, -0.5, 0.25});
    CHECK(fam.prefix(2).size() == 2);
    const auto ext = fam.extended([](double x, int k, double* out) { *out = k == 0 ? std::exp(x) : std::exp(x); }, 10);
    CHECK(ext.size() == 4);
    CHECK(ext.eval_basis(0.0, 1)[3] == 1.0);
    CHECK(ext.prefix(3).eval_basis(0.5, 0) == fam.eval_basis(0.5, 0));
}

TEST_CASE("long double evaluation matches double") {
    const std::vector<FamilySpec> fams{
        FamilySpec::power({0, 0.5, 2.25}, Domain::interval(0.5, 2)),
        FamilySpec::exponential({-1, 0, 2}, Domain::real_line()),
        FamilySpec::rational({-0.5, 1}, Domain::halfline(0.6)),
        FamilySpec::monomial({0, 1, 3}, Domain::interval(-1, 1)).with_signs({1, -1, 1}),
    };
    for (const auto& f : fams)
        for (int k = 0; k <= 2; ++k) {
            std::vector<double> d(f.size());
            std::vector<long double> ld(f.size());
            f.eval_raw(0.75, k, d.data());
            f.eval_raw_ld(0.75L, k, ld.data());
            for (std::size_t i = 0; i < d.size(); ++i) CHECK(static_cast<double>(ld[i]) == doctest::Approx(d[i]).epsilon(1e-15));
        }
    const auto custom = FamilySpec::custom(1, 0, [](double x, int, double* o) { o[0] = x; }, Domain::interval(0, 1));
    long double v = 0;
    custom.eval_raw_ld(0.5L, 0, &v);
    CHECK(v == 0.5L);
}
