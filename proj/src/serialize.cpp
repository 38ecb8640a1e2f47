#include "tsys/serialize.hpp"

#include <fmt/format.h>

#include "tsys/error.hpp"

namespace tsys {

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(Errc::Parse, fmt::format("missing key '{}'", key));
    return j.at(key);
}

namespace {

template <class T>
T get_as(const Json& j, const char* key) {
    try {
        return require(j, key).get<T>();
    } catch (const Json::exception& e) {
        throw Error(Errc::Parse, fmt::format("bad value for '{}': {}", key, e.what()));
    }
}

}  // namespace

void to_json(Json& j, const Domain& d) {
    j = Json{{"kind", domain_kind_name(d.kind)}};
    if (d.has_lower()) j["a"] = d.a;
    if (d.has_upper()) j["b"] = d.b;
}

void from_json(const Json& j, Domain& d) {
    const auto kind = get_as<std::string>(j, "kind");
    if (kind == "closed_interval")
        d = Domain::interval(get_as<double>(j, "a"), get_as<double>(j, "b"));
    else if (kind == "left_closed_halfline")
        d = Domain::halfline(get_as<double>(j, "a"));
    else if (kind == "real_line")
        d = Domain::real_line();
    else
        throw Error(Errc::Parse, fmt::format("unknown domain kind '{}'", kind));
}

void to_json(Json& j, const FamilySpec& f) {
    if (f.variant() == Variant::custom)
        throw Error(Errc::InvalidArgument, fmt::format("custom family '{}' is not serializable", f.label()));
    j = Json{{"variant", variant_name(f.variant())}, {"domain", f.domain()}};
    if (f.variant() == Variant::monomial) {
        std::vector<int> deg;
        for (double p : f.params()) deg.push_back(static_cast<int>(p));
        j["params"] = deg;
    } else {
        j["params"] = f.params();
    }
}

void from_json(const Json& j, FamilySpec& f) {
    const auto variant = get_as<std::string>(j, "variant");
    const auto params = get_as<std::vector<double>>(j, "params");
    const auto d = get_as<Domain>(j, "domain");
    if (variant == "power") {
        f = FamilySpec::power(params, d);
    } else if (variant == "exponential") {
        f = FamilySpec::exponential(params, d);
    } else if (variant == "rational") {
        f = FamilySpec::rational(params, d);
    } else if (variant == "monomial") {
        std::vector<int> deg;
        for (double p : params) {
            if (p != std::floor(p)) throw Error(Errc::Parse, fmt::format("monomial degree {} is not an integer", p));
            deg.push_back(static_cast<int>(p));
        }
        f = FamilySpec::monomial(deg, d);
    } else {
        throw Error(Errc::Parse, fmt::format("unknown family variant '{}'", variant));
    }
}

void to_json(Json& j, const SparsePoly& p) { j = Json{{"family", p.family}, {"coeffs", p.coeffs}}; }

void from_json(const Json& j, SparsePoly& p) {
    p.family = get_as<FamilySpec>(j, "family");
    p.coeffs = get_as<std::vector<double>>(j, "coeffs");
    if (p.coeffs.size() != p.family.size())
        throw Error(Errc::Parse, fmt::format("{} coefficients for a family of size {}", p.coeffs.size(), p.family.size()));
}

void to_json(Json& j, const Node& n) { j = Json{{"x", n.x}, {"mult", n.mult}}; }

void from_json(const Json& j, Node& n) {
    if (j.is_number()) {
        n = {j.get<double>(), 1};
        return;
    }
    n.x = get_as<double>(j, "x");
    n.mult = j.value("mult", 1);
}

void to_json(Json& j, const GridSpec& g) {
    j = Json{{"points", g.points},   {"wronskian_points", g.wronskian_points},
             {"budget", g.budget},   {"seed", g.seed},
             {"rel_tol", g.rel_tol}, {"jobs", g.jobs}};
}

void from_json(const Json& j, GridSpec& g) {
    g.points = j.value("points", g.points);
    g.wronskian_points = j.value("wronskian_points", g.wronskian_points);
    g.budget = j.value("budget", g.budget);
    g.seed = j.value("seed", g.seed);
    g.rel_tol = j.value("rel_tol", g.rel_tol);
    g.jobs = j.value("jobs", g.jobs);
}

void to_json(Json& j, const SystemCertificate& c) {
    j = Json{{"level", level_name(c.level)},
             {"target", level_name(c.target)},
             {"evidence", c.evidence},
             {"evidence_relative", c.evidence_relative},
             {"canonical_sign", c.canonical_sign},
             {"grid", c.grid},
             {"seed", c.grid.seed},
             {"window", {c.window_a, c.window_b}},
             {"tuples_checked", c.tuples_checked},
             {"exhaustive", c.exhaustive},
             {"note", c.note}};
    if (c.counterexample) {
        j["counterexample"] = *c.counterexample;
        j["counterexample_det"] = c.counterexample_det;
    } else {
        j["counterexample"] = nullptr;
    }
}

void to_json(Json& j, const Zero& z) { j = Json{{"x", z.x}, {"mult", z.mult}, {"kind", zero_kind_name(z.kind)}}; }

void to_json(Json& j, const ZeroConfig& z) {
    const auto [k, l] = nodal_counts(z);
    j = Json{{"zeros", z.zeros},  {"domain", z.domain},        {"bound_ok", z.bound_ok},
             {"index", index_of(z)}, {"non_nodal", k}, {"nodal", l}, {"diagnostic", z.diagnostic}};
}

void to_json(Json& j, const KarlinDecomposition& k) {
    j = Json{{"f_lower", k.f_lower},
             {"f_upper", k.f_upper},
             {"zeros_lower", k.zeros_lower},
             {"zeros_upper", k.zeros_upper},
             {"shared", k.shared},
             {"residual_sup", k.residual_sup},
             {"tangency_residual", k.tangency_residual},
             {"min_lower", k.min_lower},
             {"min_upper", k.min_upper},
             {"iterations", k.iterations},
             {"converged", k.converged},
             {"path", solver_path_name(k.path)},
             {"endpoint_forced", k.endpoint_forced},
             {"note", k.note}};
}

void to_json(Json& j, const SnakeSolution& s) {
    Json tp = Json::array();
    for (const auto& t : s.touch_points) tp.push_back({{"x", t.x}, {"side", t.side == SnakeSide::lower ? "g1" : "g2"}});
    j = Json{{"poly", s.poly},         {"touch_points", tp},   {"which", snake_which_name(s.which)},
             {"max_violation", s.max_violation}, {"margin", s.margin}, {"iterations", s.iterations},
             {"converged", s.converged}};
}

void to_json(Json& j, const BestApproximation& b) {
    j = Json{{"poly", b.poly},         {"deviation", b.deviation},   {"alternation_points", b.alternation_points},
             {"sign", b.sign},         {"levels", b.levels},         {"iterations", b.iterations},
             {"stalled", b.stalled}};
}

void to_json(Json& j, const Atom& a) { j = Json{{"x", a.x}, {"w", a.w}}; }

void from_json(const Json& j, Atom& a) {
    a.x = get_as<double>(j, "x");
    a.w = get_as<double>(j, "w");
}

void to_json(Json& j, const AtomicMeasure& m) { j = m.atoms; }

void from_json(const Json& j, AtomicMeasure& m) {
    if (!j.is_array()) throw Error(Errc::Parse, "measure must be an array of atoms");
    m.atoms = j.get<std::vector<Atom>>();
}

void to_json(Json& j, const MomentFunctional& m) { j = Json{{"family", m.family}, {"s", m.values}}; }

void from_json(const Json& j, MomentFunctional& m) {
    m.family = get_as<FamilySpec>(j, "family");
    m.values = get_as<std::vector<double>>(j, "s");
    if (m.values.size() != m.family.size())
        throw Error(Errc::Parse, fmt::format("{} moments for a family of size {}", m.values.size(), m.family.size()));
}

void to_json(Json& j, const HankelVerdict& h) {
    Json ms = Json::array();
    for (const auto& m : h.matrices) {
        Json rows = Json::array();
        for (Eigen::Index r = 0; r < m.matrix.rows(); ++r) {
            std::vector<double> row(static_cast<std::size_t>(m.matrix.cols()));
            for (Eigen::Index c = 0; c < m.matrix.cols(); ++c) row[static_cast<std::size_t>(c)] = m.matrix(r, c);
            rows.push_back(row);
        }
        ms.push_back({{"label", m.label}, {"matrix", rows}, {"min_eigenvalue", m.min_eigenvalue}, {"psd", m.psd}});
    }
    j = Json{{"variant", hankel_variant_name(h.variant)}, {"matrices", ms}, {"psd", h.psd}};
}

void to_json(Json& j, const FeasibilityVerdict& v) {
    j = Json{{"status", feasibility_name(v.status)},
             {"witness", v.witness ? Json(*v.witness) : Json(nullptr)},
             {"certificate", v.certificate ? Json(*v.certificate) : Json(nullptr)},
             {"certificate_value", v.certificate_value},
             {"witness_residual", v.witness_residual},
             {"gap", v.gap},
             {"window", v.window},
             {"determinacy_sum", v.determinacy_sum},
             {"note", v.note}};
}

void to_json(Json& j, const RecoveryResult& r) {
    j = Json{{"measure", r.measure}, {"residual", r.residual}, {"polished", r.polished}};
}

void to_json(Json& j, const RatioResult& r) {
    Json top = Json::array();
    for (const auto& c : r.top) top.push_back({{"pattern", pattern_name(c.pattern)}, {"theta", c.theta}, {"value", c.value}});
    j = Json{{"value", r.value}, {"argbest", r.argbest}, {"top", top}};
}

void to_json(Json& j, const TpVerdict& v) {
    j = Json{{"pass", v.pass},           {"order", v.order},           {"extended", v.extended},
             {"min_det", v.min_det},     {"counter_x", v.counter_x},   {"counter_y", v.counter_y},
             {"tuples_checked", v.tuples_checked}, {"exhaustive", v.exhaustive}};
}

Curve curve_from_json(const Json& j) {
    if (j.is_number()) return constant_curve(j.get<double>());
    if (j.is_object() && j.contains("x"))
        return tabulated_curve(get_as<std::vector<double>>(j, "x"), get_as<std::vector<double>>(j, "y"));
    if (j.is_object() && j.contains("coeffs")) return poly_curve(j.get<SparsePoly>());
    throw Error(Errc::Parse, "curve must be a number, a table {x, y} or a polynomial {family, coeffs}");
}

}  // namespace tsys
