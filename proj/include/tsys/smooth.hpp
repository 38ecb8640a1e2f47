#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tsys/family.hpp"

namespace tsys {

enum class KernelKind { gaussian, custom };

/// K(x, y) and its y-derivatives, d^dy/dy^dy K(x, y).
using KernelEval = std::function<double(double x, double y, int dy)>;

struct KernelSpec {
    KernelKind kind = KernelKind::gaussian;
    double sigma = 0.05;
    int panels = 64;          ///< Gauss-Legendre panels over [x - T sigma, x + T sigma]
    double truncation = 8.0;  ///< T, in units of sigma
    KernelEval custom;        ///< used when kind == custom

    [[nodiscard]] static KernelSpec gaussian(double sigma) { return {KernelKind::gaussian, sigma, 64, 8.0, {}}; }
    [[nodiscard]] static KernelSpec from(KernelEval k) {
        KernelSpec s;
        s.kind = KernelKind::custom;
        s.custom = std::move(k);
        return s;
    }
    [[nodiscard]] double operator()(double x, double y, int dy = 0) const;
};

/// f_i * K_sigma with f_i continued by its end values outside [a, b]. Derivatives up to order n
/// come from differentiating the kernel.
[[nodiscard]] FamilySpec gaussian_smooth(const FamilySpec& family, const KernelSpec& kernel);

/// Largest change of the smoothed values when the panel count doubles, over xs and all orders <= n.
[[nodiscard]] double smoothing_error_estimate(const FamilySpec& family, const KernelSpec& kernel,
                                              std::span<const double> xs);

struct TpVerdict {
    bool pass = true;
    int order = 0;
    bool extended = false;
    double min_det = 0.0;
    std::vector<double> counter_x, counter_y;  ///< tuple attaining min_det
    std::size_t tuples_checked = 0;
    bool exhaustive = true;
};

struct TpOptions {
    bool extended = false;  ///< ETP: y tuples may repeat, repeats become y-derivative columns
    std::size_t budget = 200000;
    std::uint64_t seed = 20240917;
};

/// Signs of det K(x_i, y_j) over increasing k-tuples from the grids; pass means every one is > 0.
[[nodiscard]] TpVerdict kernel_tp_check(const KernelSpec& kernel, std::span<const double> xgrid,
                                        std::span<const double> ygrid, int k, const TpOptions& opt = {});

}  // namespace tsys
