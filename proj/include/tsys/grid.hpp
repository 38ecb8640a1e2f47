#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsys/family.hpp"

namespace tsys {

[[nodiscard]] std::vector<double> linspace(double a, double b, std::size_t n);

/// m Chebyshev points mapped into [a + w/(2m+2), b - w/(2m+2)], w = b - a, increasing.
[[nodiscard]] std::vector<double> chebyshev_interior(double a, double b, std::size_t m);

/// m equispaced interior points a + (i+1) w/(m+1).
[[nodiscard]] std::vector<double> equispaced_interior(double a, double b, std::size_t m);

/// Basis values on a grid, stored function-major: data[i * npts + j] = f_i^{(order)}(x_j).
struct BasisTable {
    std::size_t nfun = 0;
    std::size_t npts = 0;
    std::vector<double> x;
    std::vector<double> data;

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {data.data() + i * npts, npts};
    }
};

[[nodiscard]] BasisTable tabulate(const FamilySpec& family, std::span<const double> xs, int order = 0);

/// values[j] = sum_i a_i f_i(x_j)
[[nodiscard]] std::vector<double> eval_table(const BasisTable& t, std::span<const double> coeffs);

}  // namespace tsys
