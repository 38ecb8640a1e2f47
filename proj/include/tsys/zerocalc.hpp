#pragma once

#include <string>
#include <vector>

#include "tsys/colloc.hpp"
#include "tsys/family.hpp"

namespace tsys {

enum class ZeroKind { nodal, non_nodal };
[[nodiscard]] const char* zero_kind_name(ZeroKind k) noexcept;

struct Zero {
    double x = 0.0;
    int mult = 1;
    ZeroKind kind = ZeroKind::nodal;
};

struct ZeroConfig {
    std::vector<Zero> zeros;
    Domain domain;
    bool bound_ok = true;  ///< 2k + l <= n
    std::string diagnostic;
};

/// Interior zeros count max(2, multiplicity), endpoint zeros their multiplicity.
[[nodiscard]] int index_of(const ZeroConfig& config);

/// Number of non-nodal (k) and nodal (l) zeros.
[[nodiscard]] std::pair<int, int> nodal_counts(const ZeroConfig& config);

enum class SignMode { auto_nonneg, raw };

/// Expands the bordered confluent determinant [f(x); node rows] along its symbolic first row.
/// Total multiplicity of nodes must equal n.
[[nodiscard]] SparsePoly poly_from_zeros(const FamilySpec& family, const NodeSet& nodes,
                                         SignMode sign = SignMode::auto_nonneg);

struct ZeroOptions {
    double tol = 1e-9;          ///< zero threshold relative to max grid |f|
    std::size_t grid = 2001;
    bool enforce_bound = true;  ///< throw InvariantViolation when 2k + l > n
};

[[nodiscard]] ZeroConfig count_zeros(const SparsePoly& f, const ZeroOptions& opt = {});

/// Sampling grid used for checks: equispaced on [a, b], tan-compactified on unbounded domains.
[[nodiscard]] std::vector<double> check_grid(const Domain& d, std::size_t n);

}  // namespace tsys
