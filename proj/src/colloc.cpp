#include "tsys/colloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "tsys/error.hpp"
#include "tsys/grid.hpp"

namespace tsys {

int total_multiplicity(const NodeSet& nodes) {
    int s = 0;
    for (const Node& nd : nodes) s += nd.mult;
    return s;
}

void check_nodes(const FamilySpec& family, const NodeSet& nodes) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (nodes[j].mult < 1) throw Error(Errc::InvalidNodes, "multiplicities must be positive");
        if (!family.domain().contains(nodes[j].x))
            throw Error(Errc::InvalidNodes, fmt::format("node {} outside the domain", nodes[j].x));
        if (j > 0 && !(nodes[j - 1].x < nodes[j].x))
            throw Error(Errc::InvalidNodes, "points not strictly increasing");
    }
}

Mat confluent_matrix(const FamilySpec& family, const NodeSet& nodes) {
    check_nodes(family, nodes);
    const int dim = total_multiplicity(nodes);
    if (dim != static_cast<int>(family.size()))
        throw Error(Errc::DimensionMismatch,
                    fmt::format("total multiplicity {} but family size {}", dim, family.size()));
    Mat m(dim, dim);
    std::vector<double> v(family.size());
    int r = 0;
    for (const Node& nd : nodes)
        for (int k = 0; k < nd.mult; ++k, ++r) {
            family.eval_raw(nd.x, k, v.data());
            for (int i = 0; i < dim; ++i) m(r, i) = v[static_cast<std::size_t>(i)];
        }
    return m;
}

Mat krein_matrix(const FamilySpec& family, const NodeSet& nodes) {
    for (const Node& nd : nodes)
        if (nd.mult != 1) throw Error(Errc::InvalidNodes, "Krein matrix needs simple nodes");
    return confluent_matrix(family, nodes);
}

long double confluent_det(const FamilySpec& family, const NodeSet& nodes) {
    check_nodes(family, nodes);
    const int dim = total_multiplicity(nodes);
    if (dim != static_cast<int>(family.size()))
        throw Error(Errc::DimensionMismatch,
                    fmt::format("total multiplicity {} but family size {}", dim, family.size()));
    MatLd m(dim, dim);
    std::vector<long double> v(family.size());
    int r = 0;
    for (const Node& nd : nodes)
        for (int k = 0; k < nd.mult; ++k, ++r) {
            family.eval_raw_ld(nd.x, k, v.data());
            for (int i = 0; i < dim; ++i) m(r, i) = v[static_cast<std::size_t>(i)];
        }
    return det_ld(m);
}

long double krein_det(const FamilySpec& family, const NodeSet& nodes) {
    for (const Node& nd : nodes)
        if (nd.mult != 1) throw Error(Errc::InvalidNodes, "Krein matrix needs simple nodes");
    return confluent_det(family, nodes);
}

double wronskian(const FamilySpec& family, int k, double x) {
    if (k < 0 || k > family.n()) throw Error(Errc::DimensionMismatch, "Wronskian order outside the family");
    return static_cast<double>(confluent_det(family.prefix(static_cast<std::size_t>(k + 1)), {{x, k + 1}}));
}

const char* level_name(Level l) noexcept {
    switch (l) {
        case Level::none: return "none";
        case Level::T: return "T";
        case Level::ET: return "ET";
        case Level::ECT: return "ECT";
    }
    return "?";
}

Level parse_level(const std::string& s) {
    std::string u;
    for (char c : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u == "T") return Level::T;
    if (u == "ET") return Level::ET;
    if (u == "ECT") return Level::ECT;
    if (u == "NONE") return Level::none;
    throw Error(Errc::Parse, "unknown certification level '" + s + "'");
}

namespace {

std::pair<double, double> sample_window(const Domain& d) {
    switch (d.kind) {
        case DomainKind::closed_interval: return {d.a, d.b};
        case DomainKind::left_closed_halfline: return {d.a, d.a + 10.0};
        case DomainKind::real_line: return {-10.0, 10.0};
    }
    return {0.0, 1.0};
}

double binom(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

/// Confluent determinant of a sorted (possibly repeating) tuple; equal values merge into one node.
struct TupleDet {
    double det = 0.0;
    double scale = 0.0;
};

TupleDet tuple_det(const FamilySpec& fam, std::span<const double> pts) {
    const auto dim = static_cast<Eigen::Index>(pts.size());
    Mat m(dim, dim);
    std::vector<double> v(fam.size());
    int order = 0;
    for (Eigen::Index r = 0; r < dim; ++r) {
        order = (r > 0 && pts[static_cast<std::size_t>(r)] == pts[static_cast<std::size_t>(r - 1)]) ? order + 1 : 0;
        try {
            fam.eval_raw(pts[static_cast<std::size_t>(r)], order, v.data());
        } catch (const Error&) {
            return {std::numeric_limits<double>::quiet_NaN(), 1.0};
        }
        for (Eigen::Index i = 0; i < dim; ++i) m(r, i) = v[static_cast<std::size_t>(i)];
    }
    return {det(m), row_norm_product(m)};
}

NodeSet to_nodes(std::span<const double> pts) {
    NodeSet ns;
    for (double p : pts) {
        if (!ns.empty() && ns.back().x == p)
            ++ns.back().mult;
        else
            ns.push_back({p, 1});
    }
    return ns;
}

/// Bisection along the segment between two sorted tuples whose determinants differ in sign.
std::vector<double> refine_sign_change(const FamilySpec& fam, std::vector<double> p, std::vector<double> q,
                                       double rel_tol) {
    const double sp = tuple_det(fam, p).det > 0 ? 1.0 : -1.0;
    std::vector<double> mid(p.size());
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double t = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < p.size(); ++i) mid[i] = (1.0 - t) * p[i] + t * q[i];
        const TupleDet d = tuple_det(fam, mid);
        if (!(std::fabs(d.det) > rel_tol * d.scale)) return mid;
        if ((d.det > 0 ? 1.0 : -1.0) == sp)
            lo = t;
        else
            hi = t;
        if (hi - lo < 1e-17) break;
    }
    return mid;
}

template <class F>
void parallel_for(std::size_t n, int jobs, F&& body) {
    if (jobs <= 1 || n < 1000) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> th;
    const std::size_t chunk = (n + static_cast<std::size_t>(jobs) - 1) / static_cast<std::size_t>(jobs);
    for (int t = 0; t < jobs; ++t) {
        const std::size_t lo = static_cast<std::size_t>(t) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        th.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& x : th) x.join();
}

/// Enumerates index tuples (strictly increasing for T, nondecreasing for ET).
std::vector<std::vector<std::size_t>> tuples(std::size_t g, std::size_t k, bool repeat, const GridSpec& spec,
                                             bool& exhaustive) {
    const double count = repeat ? binom(g + k - 1, k) : binom(g, k);
    std::vector<std::vector<std::size_t>> out;
    if (count <= static_cast<double>(spec.budget)) {
        exhaustive = true;
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = repeat ? 0 : i;
        if (!repeat && k > g) return out;
        while (true) {
            out.push_back(idx);
            std::size_t i = k;
            bool advanced = false;
            while (i-- > 0) {
                const std::size_t limit = repeat ? g - 1 : g - k + i;
                if (idx[i] < limit) {
                    ++idx[i];
                    for (std::size_t j = i + 1; j < k; ++j) idx[j] = repeat ? idx[i] : idx[j - 1] + 1;
                    advanced = true;
                    break;
                }
            }
            if (!advanced) break;
        }
        return out;
    }
    exhaustive = false;
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<std::size_t> pick(0, g - 1);
    out.reserve(spec.budget);
    while (out.size() < spec.budget) {
        std::vector<std::size_t> idx(k);
        for (auto& v : idx) v = pick(rng);
        std::sort(idx.begin(), idx.end());
        if (!repeat && std::adjacent_find(idx.begin(), idx.end()) != idx.end()) continue;
        out.push_back(std::move(idx));
    }
    return out;
}

bool check_tuples(const FamilySpec& fam, bool repeat, const GridSpec& spec, double wa, double wb,
                  SystemCertificate& cert) {
    const std::vector<double> grid = linspace(wa, wb, spec.points);
    const std::size_t k = fam.size();
    bool exhaustive = false;
    const auto tup = tuples(grid.size(), k, repeat, spec, exhaustive);
    cert.exhaustive = exhaustive;
    cert.tuples_checked = tup.size();
    std::vector<TupleDet> dets(tup.size());
    parallel_for(tup.size(), spec.jobs, [&](std::size_t t) {
        std::vector<double> pts(k);
        for (std::size_t i = 0; i < k; ++i) pts[i] = grid[tup[t][i]];
        dets[t] = tuple_det(fam, pts);
    });
    auto points_of = [&](std::size_t t) {
        std::vector<double> pts(k);
        for (std::size_t i = 0; i < k; ++i) pts[i] = grid[tup[t][i]];
        return pts;
    };
    cert.evidence = std::numeric_limits<double>::infinity();
    cert.evidence_relative = std::numeric_limits<double>::infinity();
    std::size_t first_pos = tup.size();
    std::size_t first_neg = tup.size();
    std::size_t weak = 0;
    for (std::size_t t = 0; t < tup.size(); ++t) {
        const TupleDet& d = dets[t];
        // a small determinant alone only marks clustered nodes; an exact zero or a sign change refutes
        if (!(std::fabs(d.det) > spec.rel_tol * d.scale)) ++weak;
        if (d.det == 0.0 || std::isnan(d.det)) {
            const auto pts = points_of(t);
            cert.counterexample = to_nodes(pts);
            cert.counterexample_det = d.det;
            cert.evidence = std::isnan(d.det) ? d.det : std::fabs(d.det);
            cert.evidence_relative = cert.evidence / d.scale;
            if (std::isnan(d.det)) cert.note = "derivatives unavailable at a sampled node";
            return false;
        }
        cert.evidence = std::min(cert.evidence, std::fabs(d.det));
        cert.evidence_relative = std::min(cert.evidence_relative, std::fabs(d.det) / d.scale);
        if (d.det > 0 && first_pos == tup.size()) first_pos = t;
        if (d.det < 0 && first_neg == tup.size()) first_neg = t;
        if (first_pos < tup.size() && first_neg < tup.size()) {
            const auto p = refine_sign_change(fam, points_of(first_pos), points_of(first_neg), spec.rel_tol);
            cert.counterexample = to_nodes(p);
            const TupleDet dd = tuple_det(fam, p);
            cert.counterexample_det = dd.det;
            cert.evidence = std::fabs(dd.det);
            cert.evidence_relative = std::fabs(dd.det) / dd.scale;
            cert.note = "determinant changes sign between ordered tuples";
            return false;
        }
    }
    if (weak)
        cert.note = fmt::format("{} sampled determinants below the relative tolerance, all of one sign", weak);
    return true;
}

bool check_wronskians(const FamilySpec& fam, const GridSpec& spec, double wa, double wb, SystemCertificate& cert) {
    const std::size_t k = fam.size();
    const std::vector<double> grid = linspace(wa, wb, spec.wronskian_points);
    auto wr = [&](double x, std::size_t order, double& scale) -> double {
        Mat m(order + 1, order + 1);
        std::vector<double> v(k);
        for (std::size_t r = 0; r <= order; ++r) {
            fam.eval_raw(x, static_cast<int>(r), v.data());
            for (std::size_t i = 0; i <= order; ++i) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = v[i];
        }
        scale = row_norm_product(m);
        return det(m);
    };
    cert.evidence = std::numeric_limits<double>::infinity();
    cert.evidence_relative = std::numeric_limits<double>::infinity();
    cert.tuples_checked = grid.size() * k;
    cert.exhaustive = true;
    for (std::size_t order = 0; order < k; ++order) {
        double prev = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            double s = 1.0, w;
            try {
                w = wr(grid[j], order, s);
            } catch (const Error&) {
                w = std::numeric_limits<double>::quiet_NaN();
            }
            if (!(std::fabs(w) > spec.rel_tol * s)) {
                cert.counterexample = NodeSet{{grid[j], static_cast<int>(order) + 1}};
                cert.counterexample_det = w;
                cert.evidence = std::fabs(w);
                cert.evidence_relative = std::fabs(w) / s;
                if (std::isnan(w)) cert.note = "derivatives unavailable at a sampled node";
                return false;
            }
            cert.evidence = std::min(cert.evidence, std::fabs(w));
            cert.evidence_relative = std::min(cert.evidence_relative, std::fabs(w) / s);
            if (j > 0 && (w > 0) != (prev > 0)) {
                double lo = grid[j - 1], hi = grid[j];
                const bool lo_pos = prev > 0;
                double x = 0.5 * (lo + hi);
                for (int it = 0; it < 200 && hi - lo > 0; ++it) {
                    x = 0.5 * (lo + hi);
                    const double v = wr(x, order, s);
                    if (!(std::fabs(v) > spec.rel_tol * s)) break;
                    if ((v > 0) == lo_pos)
                        lo = x;
                    else
                        hi = x;
                    if (x == lo && x == hi) break;
                }
                cert.counterexample = NodeSet{{x, static_cast<int>(order) + 1}};
                cert.counterexample_det = wr(x, order, s);
                cert.evidence = std::fabs(cert.counterexample_det);
                cert.evidence_relative = cert.evidence / s;
                cert.note = fmt::format("Wronskian of order {} changes sign", order);
                return false;
            }
            prev = w;
        }
    }
    return true;
}

}  // namespace

std::vector<int> canonical_signs(const FamilySpec& family) {
    auto [wa, wb] = sample_window(family.domain());
    std::vector<int> sign(family.size(), 1);
    for (std::size_t k = 0; k < family.size(); ++k) {
        const FamilySpec pre = family.prefix(k + 1).with_signs(std::vector<int>(sign.begin(), sign.begin() + static_cast<std::ptrdiff_t>(k + 1)));
        const std::vector<double> pts = equispaced_interior(wa, wb, k + 1);
        const double d = tuple_det(pre, pts).det;
        if (d < 0) sign[k] = -1;
    }
    return sign;
}

SystemCertificate certify(const FamilySpec& family, Level target, const GridSpec& grid) {
    SystemCertificate cert;
    cert.target = target;
    cert.grid = grid;
    auto [wa, wb] = sample_window(family.domain());
    cert.window_a = wa;
    cert.window_b = wb;
    cert.canonical_sign = canonical_signs(family);
    const FamilySpec fam = family.with_signs(cert.canonical_sign);
    if (target == Level::none) return cert;

    auto attempt = [&](Level l, SystemCertificate& c) {
        switch (l) {
            case Level::ECT: return check_wronskians(fam, grid, wa, wb, c);
            case Level::ET: return check_tuples(fam, true, grid, wa, wb, c);
            case Level::T: return check_tuples(fam, false, grid, wa, wb, c);
            case Level::none: return true;
        }
        return false;
    };

    if (attempt(target, cert)) {
        cert.level = target;
        return cert;
    }
    // Target refuted: keep its counterexample, report the highest lower level that passes.
    for (int l = static_cast<int>(target) - 1; l >= 1; --l) {
        SystemCertificate lower = cert;
        lower.counterexample.reset();
        if (attempt(static_cast<Level>(l), lower)) {
            cert.level = static_cast<Level>(l);
            return cert;
        }
    }
    cert.level = Level::none;
    return cert;
}

FamilySpec reduced_system(const FamilySpec& family) {
    const auto [wa, wb] = sample_window(family.domain());
    {
        std::vector<double> v(family.size());
        for (double x : linspace(wa, wb, 201)) {
            family.eval_raw(x, 0, v.data());
            if (!(v[0] > 0)) throw Error(Errc::NonPositiveLeadFunction, fmt::format("f_0({}) = {} is not positive", x, v[0]));
        }
    }
    const std::size_t n = family.size() - 1;
    const int max_order = family.max_order() == std::numeric_limits<int>::max() ? family.max_order()
                                                                                : family.max_order() - 1;
    const FamilySpec base = family;
    return FamilySpec::custom(
        n, max_order,
        [base, n](double x, int order, double* out) {
            // q_i = f_{i+1}/f_0, q^{(k)} = (u^{(k)} - sum_{j=1}^k C(k,j) v^{(j)} q^{(k-j)}) / v
            const int K = order + 1;
            std::vector<std::vector<double>> d(static_cast<std::size_t>(K + 1), std::vector<double>(n + 1));
            for (int k = 0; k <= K; ++k) base.eval_raw(x, k, d[static_cast<std::size_t>(k)].data());
            std::vector<double> q(static_cast<std::size_t>(K + 1));
            for (std::size_t i = 0; i < n; ++i) {
                for (int k = 0; k <= K; ++k) {
                    double s = d[static_cast<std::size_t>(k)][i + 1];
                    double c = 1.0;
                    for (int j = 1; j <= k; ++j) {
                        c = c * (k - j + 1) / j;
                        s -= c * d[static_cast<std::size_t>(j)][0] * q[static_cast<std::size_t>(k - j)];
                    }
                    q[static_cast<std::size_t>(k)] = s / d[0][0];
                }
                out[i] = q[static_cast<std::size_t>(K)];
            }
        },
        family.domain(), "reduced(" + family.label() + ")");
}

CanonicalWeights ect_canonical_weights(const FamilySpec& family, const SystemCertificate& cert,
                                       std::span<const double> grid) {
    if (cert.level != Level::ECT) throw Error(Errc::CertificationRequired, "canonical weights need an ECT certificate");
    const FamilySpec fam = family.with_signs(cert.canonical_sign);
    const std::size_t k = fam.size();
    CanonicalWeights cw;
    cw.x.assign(grid.begin(), grid.end());
    cw.g.assign(k, std::vector<double>(grid.size()));
    std::vector<double> w(k + 1);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        for (std::size_t i = 0; i < k; ++i) w[i] = wronskian(fam, static_cast<int>(i), grid[j]);
        for (std::size_t i = 0; i < k; ++i) {
            double g;
            if (i == 0)
                g = w[0];
            else if (i == 1)
                g = w[1] / (w[0] * w[0]);
            else
                g = w[i] * w[i - 2] / (w[i - 1] * w[i - 1]);
            if (!(g > 0)) throw Error(Errc::CertificationRequired, fmt::format("weight g_{} not positive at {}", i, grid[j]));
            cw.g[i][j] = g;
        }
    }
    return cw;
}

}  // namespace tsys
