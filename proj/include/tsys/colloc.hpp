#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsys/family.hpp"
#include "tsys/linalg.hpp"

namespace tsys {

struct Node {
    double x = 0.0;
    int mult = 1;
};
using NodeSet = std::vector<Node>;

[[nodiscard]] int total_multiplicity(const NodeSet& nodes);

/// Throws InvalidNodes unless points strictly increase, lie in the domain and multiplicities are positive.
void check_nodes(const FamilySpec& family, const NodeSet& nodes);

/// Rows f_i(x_j); every multiplicity must be 1.
[[nodiscard]] Mat krein_matrix(const FamilySpec& family, const NodeSet& nodes);
/// Node (x, m) contributes rows f^{(0)}(x) .. f^{(m-1)}(x).
[[nodiscard]] Mat confluent_matrix(const FamilySpec& family, const NodeSet& nodes);
/// Determinants with entries evaluated in long double (built-in variants).
[[nodiscard]] long double confluent_det(const FamilySpec& family, const NodeSet& nodes);
[[nodiscard]] long double krein_det(const FamilySpec& family, const NodeSet& nodes);
[[nodiscard]] double wronskian(const FamilySpec& family, int k, double x);

enum class Level { none = 0, T = 1, ET = 2, ECT = 3 };
[[nodiscard]] const char* level_name(Level l) noexcept;
[[nodiscard]] Level parse_level(const std::string& s);

struct GridSpec {
    std::size_t points = 41;            ///< node grid for tuple sampling
    std::size_t wronskian_points = 2001;
    std::size_t budget = 100000;        ///< exhaustive below this many tuples
    std::uint64_t seed = 20240917;
    double rel_tol = 1e-12;
    int jobs = 1;
};

struct SystemCertificate {
    Level level = Level::none;
    Level target = Level::T;
    double evidence = 0.0;           ///< smallest |det| observed
    double evidence_relative = 0.0;  ///< smallest |det| / row-norm product
    std::optional<NodeSet> counterexample;
    double counterexample_det = 0.0;
    std::vector<int> canonical_sign;
    GridSpec grid;
    double window_a = 0.0, window_b = 0.0;  ///< sampled window
    std::size_t tuples_checked = 0;
    bool exhaustive = false;
    std::string note;
};

[[nodiscard]] SystemCertificate certify(const FamilySpec& family, Level target, const GridSpec& grid = {});

/// Signs making ordered determinants of every prefix positive, computed at equispaced interior nodes.
[[nodiscard]] std::vector<int> canonical_signs(const FamilySpec& family);

/// g_i = (f_{i+1}/f_0)', i = 0..n-1, as a custom family with analytic derivatives.
[[nodiscard]] FamilySpec reduced_system(const FamilySpec& family);

struct CanonicalWeights {
    std::vector<double> x;
    std::vector<std::vector<double>> g;  ///< g[i][j] = g_i(x_j)
};

[[nodiscard]] CanonicalWeights ect_canonical_weights(const FamilySpec& family, const SystemCertificate& cert,
                                                     std::span<const double> grid);

}  // namespace tsys
