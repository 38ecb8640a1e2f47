#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tsys/family.hpp"
#include "tsys/moments.hpp"

namespace tsys {

/// A continuous function on the domain, given by a callable.
using Curve = std::function<double(double)>;

[[nodiscard]] Curve constant_curve(double c);
/// Piecewise linear through (xs, ys); xs increasing, constant outside.
[[nodiscard]] Curve tabulated_curve(std::vector<double> xs, std::vector<double> ys);
[[nodiscard]] Curve poly_curve(SparsePoly p);

enum class SnakeSide { lower, upper };
enum class SnakeWhich { f_star, f_upper_star };
[[nodiscard]] const char* snake_which_name(SnakeWhich w) noexcept;

struct TouchPoint {
    double x = 0.0;
    SnakeSide side = SnakeSide::lower;
};

struct SnakeOptions {
    std::size_t grid = 2001;
    int max_iter = 200;
    double tol = 1e-12;  ///< violation relative to max |g1|, |g2|
};

struct SnakeSolution {
    SparsePoly poly;
    std::vector<TouchPoint> touch_points;
    SnakeWhich which = SnakeWhich::f_star;
    double max_violation = 0.0;  ///< max(g1 - poly, poly - g2, 0) over the check grid
    double margin = 0.0;         ///< separating margin found by the feasibility LP
    int iterations = 0;
    bool converged = false;
};

/// f_star ends on g2 at the right, f_upper_star ends on g1.
[[nodiscard]] SnakeSolution snake(const FamilySpec& family, const Curve& g1, const Curve& g2, SnakeWhich which,
                                  const SnakeOptions& opt = {});

enum class RemezInit { chebyshev, equispaced };

struct RemezOptions {
    std::size_t grid = 4001;
    int max_iter = 100;
    double tol = 1e-12;
    RemezInit init = RemezInit::chebyshev;
};

struct BestApproximation {
    SparsePoly poly;
    double deviation = 0.0;
    std::vector<double> alternation_points;
    int sign = 1;  ///< sign of f - poly at the first alternation point
    std::vector<double> levels;  ///< |levelled error| per iteration
    int iterations = 0;
    bool stalled = false;
};

[[nodiscard]] BestApproximation best_approx(const FamilySpec& family, const Curve& f, const RemezOptions& opt = {});

enum class Sense { minimize, maximize };

struct RatioCandidate {
    Pattern pattern = Pattern::interior_doubles;
    std::vector<double> theta;
    double value = 0.0;
};

struct RatioResult {
    double value = 0.0;
    SparsePoly argbest;
    std::vector<RatioCandidate> top;  ///< best five, best first
};

struct RatioOptions {
    int coarse = 200;  ///< samples per pattern before the local polish
    std::uint64_t seed = 20240917;
};

[[nodiscard]] RatioResult optimize_ratio(const FamilySpec& family, const MomentFunctional& L,
                                         const MomentFunctional& S, Sense sense, const RatioOptions& opt = {});

}  // namespace tsys
