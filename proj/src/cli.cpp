#include "tsys/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "tsys/error.hpp"
#include "tsys/grid.hpp"
#include "tsys/serialize.hpp"

namespace tsys::cli {

namespace {

const std::vector<std::string> kTasks{"certify",       "build_poly",    "decompose",
                                      "snake",         "approx",        "moments_check",
                                      "moments_recover", "smooth",      "optimize_ratio"};

struct Flags {
    std::string task;
    std::string problem;
    std::string family, domain, target, mode, out, plot;
    std::optional<std::size_t> grid;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<double> tol;
};

[[noreturn]] void parse_error(const std::string& msg) { throw Error(Errc::Parse, msg); }

std::vector<double> number_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = item.substr(item.find_first_not_of(' ') == std::string::npos ? 0 : item.find_first_not_of(' '));
        if (t == "inf" || t == "+inf") {
            v.push_back(std::numeric_limits<double>::infinity());
        } else if (t == "-inf") {
            v.push_back(-std::numeric_limits<double>::infinity());
        } else {
            std::size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(t, &used);
            } catch (const std::exception&) {
                parse_error(fmt::format("'{}' is not a number", item));
            }
            if (used != t.size()) parse_error(fmt::format("'{}' is not a number", item));
            v.push_back(x);
        }
    }
    return v;
}

Json domain_flag(const std::string& s) {
    const auto v = number_list(s);
    if (v.size() != 2) parse_error(fmt::format("--domain needs 'a,b', got '{}'", s));
    if (std::isinf(v[0]) && std::isinf(v[1])) return Domain::real_line();
    if (std::isinf(v[0])) parse_error("domains unbounded on the left only are not supported");
    if (std::isinf(v[1])) return Domain::halfline(v[0]);
    return Domain::interval(v[0], v[1]);
}

// "power:0,2,3" and friends
Json family_flag(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) parse_error(fmt::format("--family needs 'variant:p0,p1,...', got '{}'", s));
    return Json{{"variant", s.substr(0, colon)}, {"params", number_list(s.substr(colon + 1))}};
}

Json load_problem(const Flags& f) {
    Json problem = Json::object();
    if (!f.problem.empty()) {
        std::ifstream in(f.problem);
        if (!in) parse_error(fmt::format("cannot open problem file '{}'", f.problem));
        try {
            problem = Json::parse(in);
        } catch (const Json::exception& e) {
            parse_error(fmt::format("{}: {}", f.problem, e.what()));
        }
        if (!problem.is_object()) parse_error("problem file must hold a JSON object");
        if (problem.value("schema_version", std::string{}) != "1")
            parse_error("problem file needs schema_version \"1\"");
        if (problem.contains("task") && problem["task"] != f.task)
            parse_error(fmt::format("problem file is for task {}, not {}", problem["task"].dump(), f.task));
    }
    Json payload = problem.value("payload", Json::object());
    if (!payload.is_object()) parse_error("payload must be an object");
    if (!f.family.empty()) {
        Json fam = family_flag(f.family);
        if (payload.contains("family") && payload["family"].contains("domain")) fam["domain"] = payload["family"]["domain"];
        payload["family"] = fam;
    }
    if (!f.domain.empty()) {
        if (!payload.contains("family")) parse_error("--domain given without a family");
        payload["family"]["domain"] = domain_flag(f.domain);
    }
    if (!f.target.empty()) payload["target"] = f.target;
    if (!f.mode.empty()) payload["mode"] = f.mode;
    return payload;
}

template <class T>
T field(const Json& p, const char* key) {
    try {
        return require(p, key).get<T>();
    } catch (const Json::exception& e) {
        throw Error(Errc::Parse, fmt::format("bad value for '{}': {}", key, e.what()));
    }
}

template <class T>
T field_or(const Json& p, const char* key, T fallback) {
    return p.contains(key) ? field<T>(p, key) : fallback;
}

struct Outcome {
    Json result;
    int code = ok;
};

// Columns are written with shortest round-trip formatting.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
    void row(const std::vector<double>& v) { rows_.push_back(v); }
    void write(const std::string& path) const {
        std::ofstream os(path);
        if (!os) parse_error(fmt::format("cannot write plot file '{}'", path));
        for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
        os << '\n';
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt::format("{}", r[i]);
            os << '\n';
        }
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

std::vector<double> plot_grid(const Json& p, const Domain& d) {
    const auto n = field_or<std::size_t>(p, "plot_points", 401);
    double lo = 0.0, hi = 1.0;
    if (p.contains("plot_range")) {
        const auto r = field<std::vector<double>>(p, "plot_range");
        if (r.size() != 2 || !(r[1] > r[0])) parse_error("plot_range must be [lo, hi] with lo < hi");
        lo = r[0];
        hi = r[1];
    } else if (d.kind == DomainKind::closed_interval) {
        lo = d.a;
        hi = d.b;
    } else if (d.kind == DomainKind::left_closed_halfline) {
        lo = d.a;
        hi = d.a + 10.0;
    } else {
        lo = -5.0;
        hi = 5.0;
    }
    return linspace(lo, hi, std::max<std::size_t>(n, 2));
}

Outcome do_certify(const Json& p, const Flags& f) {
    const auto fam = field<FamilySpec>(p, "family");
    const Level target = parse_level(field_or<std::string>(p, "target", "ect"));
    GridSpec g = field_or<GridSpec>(p, "grid", GridSpec{});
    if (f.grid) g.points = *f.grid;
    if (f.seed) g.seed = *f.seed;
    if (f.jobs) g.jobs = *f.jobs;
    if (f.tol) g.rel_tol = *f.tol;
    const SystemCertificate c = certify(fam, target, g);
    if (!f.plot.empty()) {
        // Wronskians W(f_0..f_k) for k = 0..n
        std::vector<std::string> h{"x"};
        for (int k = 0; k <= fam.n(); ++k) h.push_back(fmt::format("W{}", k));
        Csv csv(h);
        for (double x : plot_grid(p, fam.domain())) {
            std::vector<double> r{x};
            for (int k = 0; k <= fam.n(); ++k) r.push_back(wronskian(fam, k, x));
            csv.row(r);
        }
        csv.write(f.plot);
    }
    return {Json(c), c.level >= target ? ok : infeasible};
}

Outcome do_build_poly(const Json& p, const Flags& f) {
    const auto fam = field<FamilySpec>(p, "family");
    const auto nodes = field<NodeSet>(p, "nodes");
    const std::string sign = field_or<std::string>(p, "sign", "auto_nonneg");
    if (sign != "auto_nonneg" && sign != "raw") parse_error(fmt::format("unknown sign mode '{}'", sign));
    const SparsePoly poly = poly_from_zeros(fam, nodes, sign == "raw" ? SignMode::raw : SignMode::auto_nonneg);
    ZeroOptions zo;
    if (f.grid) zo.grid = *f.grid;
    if (f.tol) zo.tol = *f.tol;
    zo.enforce_bound = false;
    const ZeroConfig z = count_zeros(poly, zo);
    if (!f.plot.empty()) {
        Csv csv({"x", "poly"});
        for (double x : plot_grid(p, fam.domain())) csv.row({x, poly.eval(x)});
        csv.write(f.plot);
    }
    return {Json{{"poly", poly}, {"zeros", z}}, ok};
}

Outcome do_decompose(const Json& p, const Flags& f) {
    const SparsePoly poly{field<FamilySpec>(p, "family"), field<std::vector<double>>(p, "coeffs")};
    if (poly.coeffs.size() != poly.family.size()) parse_error("coeffs and family differ in size");
    const std::string mode = field_or<std::string>(p, "mode", "positive");
    KarlinOptions ko;
    if (f.tol) ko.tol = *f.tol;
    if (f.grid) ko.check_points = *f.grid;
    KarlinDecomposition k;
    if (mode == "pos_ab") {
        k = decompose_pos_ab(poly, ko);
    } else if (mode == "nonneg_ab") {
        k = decompose_nonneg_ab(poly, ko);
    } else if (mode == "positive" || mode == "nonneg") {
        k = decompose(poly, mode == "positive" ? PositivityMode::positive : PositivityMode::nonneg, ko);
    } else {
        parse_error(fmt::format("unknown decomposition mode '{}' (pos_ab, nonneg_ab, positive, nonneg)", mode));
    }
    if (!f.plot.empty()) {
        Csv csv({"x", "f", "f_lower", "f_upper"});
        for (double x : plot_grid(p, poly.family.domain()))
            csv.row({x, poly.eval(x), k.f_lower.eval(x), k.f_upper.eval(x)});
        csv.write(f.plot);
    }
    return {Json(k), k.converged ? ok : undecided};
}

Outcome do_snake(const Json& p, const Flags& f) {
    const auto fam = field<FamilySpec>(p, "family");
    const Curve g1 = curve_from_json(require(p, "g1")), g2 = curve_from_json(require(p, "g2"));
    const std::string which = field_or<std::string>(p, "mode", "f_star");
    SnakeOptions so;
    if (f.grid) so.grid = *f.grid;
    if (f.tol) so.tol = *f.tol;
    Json res = Json::object();
    bool converged = true;
    std::optional<SnakeSolution> lo, up;
    if (which == "f_star" || which == "both") lo = snake(fam, g1, g2, SnakeWhich::f_star, so);
    if (which == "f_upper_star" || which == "both") up = snake(fam, g1, g2, SnakeWhich::f_upper_star, so);
    if (!lo && !up) parse_error(fmt::format("unknown snake mode '{}' (f_star, f_upper_star, both)", which));
    if (lo) {
        res["f_star"] = *lo;
        converged = converged && lo->converged;
    }
    if (up) {
        res["f_upper_star"] = *up;
        converged = converged && up->converged;
    }
    if (!f.plot.empty()) {
        std::vector<std::string> h{"x", "g1", "g2"};
        if (lo) h.emplace_back("f_star");
        if (up) h.emplace_back("f_upper_star");
        Csv csv(h);
        for (double x : plot_grid(p, fam.domain())) {
            std::vector<double> r{x, g1(x), g2(x)};
            if (lo) r.push_back(lo->poly.eval(x));
            if (up) r.push_back(up->poly.eval(x));
            csv.row(r);
        }
        csv.write(f.plot);
    }
    return {res, converged ? ok : undecided};
}

Outcome do_approx(const Json& p, const Flags& f) {
    const auto fam = field<FamilySpec>(p, "family");
    const Curve target = curve_from_json(require(p, "target"));
    RemezOptions ro;
    if (f.grid) ro.grid = *f.grid;
    if (f.tol) ro.tol = *f.tol;
    const std::string init = field_or<std::string>(p, "init", "chebyshev");
    if (init == "equispaced")
        ro.init = RemezInit::equispaced;
    else if (init != "chebyshev")
        parse_error(fmt::format("unknown init '{}'", init));
    const BestApproximation b = best_approx(fam, target, ro);
    Json res = b;
    Json pts = Json::array();
    for (double x : b.alternation_points) pts.push_back({{"x", x}, {"error", target(x) - b.poly.eval(x)}});
    res["points"] = pts;
    if (!f.plot.empty()) {
        Csv csv({"x", "f", "poly", "error"});
        for (double x : plot_grid(p, fam.domain())) {
            const double fx = target(x), px = b.poly.eval(x);
            csv.row({x, fx, px, fx - px});
        }
        csv.write(f.plot);
    }
    return {res, b.stalled ? undecided : ok};
}

FeasibilityOptions feasibility_options(const Json& p, const Flags& f) {
    FeasibilityOptions o;
    o.grid = field_or<std::size_t>(p, "grid", o.grid);
    o.seed = field_or<std::uint64_t>(p, "seed", o.seed);
    if (f.grid) o.grid = *f.grid;
    if (f.seed) o.seed = *f.seed;
    if (f.tol) o.tol = *f.tol;
    if (f.jobs) o.jobs = *f.jobs;
    return o;
}

MomentFunctional functional(const Json& p) {
    MomentFunctional m{field<FamilySpec>(p, "family"), field<std::vector<double>>(p, "s")};
    if (m.values.size() != m.family.size()) parse_error("s and family differ in size");
    return m;
}

Outcome do_moments_check(const Json& p, const Flags& f) {
    const MomentFunctional L = functional(p);
    const FeasibilityOptions o = feasibility_options(p, f);
    const FeasibilityVerdict v = sparse_feasibility(L, o);
    Json res{{"verdict", v}};
    if (p.contains("hankel")) {
        const HankelVariant hv = parse_hankel_variant(field<std::string>(p, "hankel"));
        res["hankel"] = hankel_check(L.values, hv, field_or<double>(p, "hankel_tol", 1e-10));
    }
    res["seed"] = o.seed;
    if (!f.plot.empty()) {
        Csv csv({"x", "certificate"});
        for (double x : plot_grid(p, L.family.domain()))
            csv.row({x, v.certificate ? v.certificate->eval(x) : std::nan("")});
        csv.write(f.plot);
    }
    const int code = v.status == Feasibility::feasible ? ok : v.status == Feasibility::infeasible ? infeasible : undecided;
    return {res, code};
}

Outcome do_moments_recover(const Json& p, const Flags& f) {
    const FeasibilityOptions o = feasibility_options(p, f);
    const RecoveryResult r = recover_atoms(functional(p), o);
    Json res = r;
    res["seed"] = o.seed;
    if (!f.plot.empty()) {
        Csv csv({"x", "w"});
        for (const auto& a : r.measure.atoms) csv.row({a.x, a.w});
        csv.write(f.plot);
    }
    return {res, ok};
}

Outcome do_smooth(const Json& p, const Flags& f) {
    const auto fam = field<FamilySpec>(p, "family");
    KernelSpec k = KernelSpec::gaussian(field_or<double>(p, "sigma", 0.05));
    k.panels = field_or<int>(p, "panels", k.panels);
    k.truncation = field_or<double>(p, "truncation", k.truncation);
    FamilySpec s = gaussian_smooth(fam, k);
    if (p.contains("restrict")) s = s.with_domain(field<Domain>(p, "restrict"));
    const auto probe = linspace(s.domain().a, s.domain().b, 11);
    Json res{{"label", s.label()},
             {"sigma", k.sigma},
             {"panels", k.panels},
             {"truncation", k.truncation},
             {"domain", s.domain()},
             {"error_estimate", smoothing_error_estimate(fam, k, probe)}};
    int code = ok;
    if (p.contains("target")) {
        const Level target = parse_level(field<std::string>(p, "target"));
        GridSpec g = field_or<GridSpec>(p, "grid", GridSpec{});
        if (f.grid) g.points = *f.grid;
        if (f.seed) g.seed = *f.seed;
        if (f.jobs) g.jobs = *f.jobs;
        const SystemCertificate c = certify(s, target, g);
        res["certificate"] = c;
        if (c.level < target) code = infeasible;
    }
    if (!f.plot.empty()) {
        // mesh: x, then f_i^(k) for k = 0..n
        std::vector<std::string> h{"x"};
        for (int d = 0; d <= s.max_order() && d <= fam.n(); ++d)
            for (std::size_t i = 0; i < s.size(); ++i) h.push_back(d ? fmt::format("d{}_f{}", d, i) : fmt::format("f{}", i));
        Csv csv(h);
        for (double x : plot_grid(p, s.domain())) {
            std::vector<double> r{x};
            for (int d = 0; d <= s.max_order() && d <= fam.n(); ++d) {
                const auto v = s.eval_basis(x, d);
                r.insert(r.end(), v.begin(), v.end());
            }
            csv.row(r);
        }
        csv.write(f.plot);
    }
    return {res, code};
}

Outcome do_optimize_ratio(const Json& p, const Flags& f) {
    const auto fam = field<FamilySpec>(p, "family");
    const MomentFunctional L{fam, field<std::vector<double>>(p, "L")}, S{fam, field<std::vector<double>>(p, "S")};
    if (L.values.size() != fam.size() || S.values.size() != fam.size()) parse_error("L and S must match the family size");
    const std::string sense = field_or<std::string>(p, "mode", "minimize");
    if (sense != "minimize" && sense != "maximize") parse_error(fmt::format("unknown sense '{}'", sense));
    RatioOptions ro;
    ro.coarse = field_or<int>(p, "coarse", ro.coarse);
    if (f.seed) ro.seed = *f.seed;
    const RatioResult rr = optimize_ratio(fam, L, S, sense == "minimize" ? Sense::minimize : Sense::maximize, ro);
    Json res = rr;
    if (!f.plot.empty()) {
        Csv csv({"x", "argbest"});
        for (double x : plot_grid(p, fam.domain())) csv.row({x, rr.argbest.eval(x)});
        csv.write(f.plot);
    }
    res["seed"] = ro.seed;
    res["sense"] = sense;
    return {res, ok};
}

int code_for(Errc e) {
    switch (e) {
        case Errc::NoSeparator:
        case Errc::NotFeasible: return infeasible;
        case Errc::NoConvergence:
        case Errc::ExchangeStall:
        case Errc::PolishDiverged: return undecided;
        default: return usage;
    }
}

Outcome dispatch(const Json& p, const Flags& f) {
    const std::string& t = f.task;
    if (t == "certify") return do_certify(p, f);
    if (t == "build_poly") return do_build_poly(p, f);
    if (t == "decompose") return do_decompose(p, f);
    if (t == "snake") return do_snake(p, f);
    if (t == "approx") return do_approx(p, f);
    if (t == "moments_check") return do_moments_check(p, f);
    if (t == "moments_recover") return do_moments_recover(p, f);
    if (t == "smooth") return do_smooth(p, f);
    return do_optimize_ratio(p, f);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"T-system toolkit", "tsys"};
    Flags f;
    app.add_option("task", f.task, "task to run")->required()->check(CLI::IsMember(kTasks));
    app.add_option("problem", f.problem, "problem file (JSON, schema_version \"1\")");
    app.add_option("--family", f.family, "family as variant:p0,p1,... (power, exponential, rational, monomial)");
    app.add_option("--domain", f.domain, "a,b with inf allowed on the right");
    app.add_option("--target", f.target, "certification level (t, et, ect) or approximation target");
    app.add_option("--mode", f.mode, "decomposition mode, snake side or ratio sense");
    app.add_option("--out", f.out, "write JSON here instead of stdout");
    app.add_option("--plot", f.plot, "write plot CSV here");
    app.add_option("--grid", f.grid, "grid size");
    app.add_option("--seed", f.seed, "random seed");
    app.add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tol", f.tol, "tolerance")->check(CLI::PositiveNumber);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "tsys: " << e.what() << '\n';
        return usage;
    }

    try {
        const Json payload = load_problem(f);
        Outcome o = dispatch(payload, f);
        Json doc{{"schema_version", "1"}, {"task", f.task}, {"result", o.result}, {"exit_code", o.code}};
        if (!o.result.contains("seed")) doc["seed"] = f.seed ? Json(*f.seed) : Json(nullptr);
        else doc["seed"] = o.result["seed"];
        const std::string text = doc.dump(2) + "\n";
        if (f.out.empty()) {
            out << text;
        } else {
            std::ofstream os(f.out);
            if (!os) {
                err << "tsys: cannot write '" << f.out << "'\n";
                return usage;
            }
            os << text;
        }
        return o.code;
    } catch (const Error& e) {
        err << "tsys: " << e.what() << '\n';
        return code_for(e.code());
    } catch (const Json::exception& e) {
        err << "tsys: " << e.what() << '\n';
        return usage;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace tsys::cli
