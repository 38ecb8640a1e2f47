#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tsys/kernels.hpp"

using namespace tsys;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

void compare(const kernels::Table& ref, const kernels::Table& alt) {
    std::mt19937_64 rng(7);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 33u, 1000u, 4001u}) {
        const auto x = random_vec(rng, n);
        const auto y = random_vec(rng, n);
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::fabs(x[i] * y[i]);
        CHECK(std::fabs(ref.dot(x.data(), y.data(), n) - alt.dot(x.data(), y.data(), n)) <= 1e-14 * (mag + 1.0));

        auto y1 = y, y2 = y;
        ref.axpy(0.37, x.data(), y1.data(), n);
        alt.axpy(0.37, x.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(y1[i] - y2[i]) <= 1e-15 * 4.0);

        const auto r = ref.minmax(x.data(), n);
        const auto s = alt.minmax(x.data(), n);
        CHECK(r.min == s.min);
        CHECK(r.max == s.max);
        CHECK(r.argmin == s.argmin);
        CHECK(r.argmax == s.argmax);

        const std::vector<double> c = {0.5, -1.0, 0.25, 2.0, -0.75, 0.1};
        std::vector<double> h1(n), h2(n);
        ref.horner(c.data(), c.size(), x.data(), h1.data(), n);
        alt.horner(c.data(), c.size(), x.data(), h2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(h1[i] - h2[i]) <= 1e-13 * (1.0 + std::fabs(h1[i])));

        const std::size_t rows = 5;
        const auto A = random_vec(rng, rows * n);
        const auto w = random_vec(rng, rows);
        std::vector<double> g1(n), g2(n);
        ref.gemv_t(A.data(), rows, n, w.data(), g1.data());
        alt.gemv_t(A.data(), rows, n, w.data(), g2.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(g1[i] - g2[i]) <= 1e-14 * 20.0);
    }
}

}  // namespace

TEST_CASE("scalar kernels match direct loops") {
    const auto& t = kernels::scalar_table();
    const std::vector<double> x = {1, -3, 2, 5, -3, 5};
    const auto mm = t.minmax(x.data(), x.size());
    CHECK(mm.min == -3);
    CHECK(mm.argmin == 1);
    CHECK(mm.max == 5);
    CHECK(mm.argmax == 3);
    const std::vector<double> c = {1, 2, 3};
    double out = 0;
    const double two = 2.0;
    t.horner(c.data(), 3, &two, &out, 1);
    CHECK(out == 17.0);
}

TEST_CASE("avx2 kernels are equivalent to scalar") {
    const kernels::Table* avx = kernels::avx2_table();
    if (!avx) {
        MESSAGE("AVX2 variant unavailable on this build or CPU; skipped");
        return;
    }
    compare(kernels::scalar_table(), *avx);
}

TEST_CASE("minmax ties resolve to the first index") {
    std::vector<double> x(37, 1.0);
    x[13] = -4.0;
    x[29] = -4.0;
    x[5] = 9.0;
    x[30] = 9.0;
    for (const kernels::Table* t : {&kernels::scalar_table(), kernels::avx2_table()}) {
        if (!t) continue;
        const auto r = t->minmax(x.data(), x.size());
        CHECK(r.argmin == 13);
        CHECK(r.argmax == 5);
    }
}

TEST_CASE("active table is one of the variants") {
    const std::string name = kernels::active().name;
    CHECK((name == "scalar" || name == "avx2"));
}
