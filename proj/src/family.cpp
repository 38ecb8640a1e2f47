#include "tsys/family.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "tsys/error.hpp"

namespace tsys {

namespace {

bool is_integer(double a) { return std::floor(a) == a; }

template <class T>
T falling(T alpha, int k) {
    T c = 1;
    for (int j = 0; j < k; ++j) c *= (alpha - j);
    return c;
}

template <class T>
T power_derivative(T alpha, T x, int order) {
    if (order == 0) {
        if (alpha == 0) return 1;
        return std::pow(x, alpha);
    }
    const T c = falling(alpha, order);
    if (c == 0) return 0;
    if (x == 0) {
        if (!is_integer(static_cast<double>(alpha)) || alpha < 0)
            throw Error(Errc::NonDifferentiable,
                        fmt::format("x^{} has no derivative of order {} at 0", static_cast<double>(alpha), order));
        return alpha - order == 0 ? c : 0;
    }
    return c * std::pow(x, alpha - order);
}

}  // namespace

std::string Domain::check() const {
    switch (kind) {
        case DomainKind::closed_interval:
            if (!std::isfinite(a) || !std::isfinite(b)) return "interval endpoints must be finite";
            if (!(a < b)) return fmt::format("interval requires a < b (a = {}, b = {})", a, b);
            return {};
        case DomainKind::left_closed_halfline:
            if (!std::isfinite(a)) return "half-line requires a finite left endpoint";
            return {};
        case DomainKind::real_line:
            return {};
    }
    return "unknown domain kind";
}

const char* domain_kind_name(DomainKind k) noexcept {
    switch (k) {
        case DomainKind::closed_interval: return "closed_interval";
        case DomainKind::left_closed_halfline: return "left_closed_halfline";
        case DomainKind::real_line: return "real_line";
    }
    return "?";
}

const char* variant_name(Variant v) noexcept {
    switch (v) {
        case Variant::power: return "power";
        case Variant::exponential: return "exponential";
        case Variant::rational: return "rational";
        case Variant::monomial: return "monomial";
        case Variant::custom: return "custom";
    }
    return "?";
}

FamilySpec FamilySpec::power(std::vector<double> exponents, Domain d) {
    FamilySpec f;
    f.variant_ = Variant::power;
    f.size_ = exponents.size();
    f.params_ = std::move(exponents);
    f.domain_ = d;
    f.label_ = "power";
    return f;
}

FamilySpec FamilySpec::exponential(std::vector<double> rates, Domain d) {
    FamilySpec f = power(std::move(rates), d);
    f.variant_ = Variant::exponential;
    f.label_ = "exponential";
    return f;
}

FamilySpec FamilySpec::rational(std::vector<double> shifts, Domain d) {
    FamilySpec f = power(std::move(shifts), d);
    f.variant_ = Variant::rational;
    f.label_ = "rational";
    return f;
}

FamilySpec FamilySpec::monomial(std::vector<int> degrees, Domain d) {
    FamilySpec f = power(std::vector<double>(degrees.begin(), degrees.end()), d);
    f.variant_ = Variant::monomial;
    f.label_ = "monomial";
    return f;
}

FamilySpec FamilySpec::monomials(int n, Domain d) {
    std::vector<int> deg(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) deg[static_cast<std::size_t>(i)] = i;
    return monomial(std::move(deg), d);
}

FamilySpec FamilySpec::custom(std::size_t size, int max_order, CustomEval eval, Domain d, std::string label) {
    FamilySpec f;
    f.variant_ = Variant::custom;
    f.size_ = size;
    f.domain_ = d;
    f.max_order_ = max_order;
    f.custom_ = std::make_shared<const CustomEval>(std::move(eval));
    f.label_ = std::move(label);
    return f;
}

FamilySpec FamilySpec::with_domain(Domain d) const {
    FamilySpec f = *this;
    f.domain_ = d;
    return f;
}

FamilySpec FamilySpec::prefix(std::size_t k) const {
    if (k > size_) throw Error(Errc::DimensionMismatch, "prefix longer than family");
    if (variant_ != Variant::custom) {
        FamilySpec f = *this;
        f.size_ = k;
        f.params_.resize(k);
        if (!f.signs_.empty()) f.signs_.resize(k);
        return f;
    }
    const FamilySpec base = *this;
    return custom(
        k, max_order_,
        [base, k](double x, int order, double* out) {
            std::vector<double> tmp(base.size());
            base.eval_raw(x, order, tmp.data());
            std::copy_n(tmp.begin(), k, out);
        },
        domain_, label_);
}

FamilySpec FamilySpec::with_signs(const std::vector<int>& s) const {
    if (s.size() != size_) throw Error(Errc::DimensionMismatch, "sign vector length");
    FamilySpec f = *this;
    if (f.signs_.empty()) f.signs_.assign(size_, 1);
    for (std::size_t i = 0; i < size_; ++i) f.signs_[i] *= s[i];
    if (std::all_of(f.signs_.begin(), f.signs_.end(), [](int v) { return v == 1; })) f.signs_.clear();
    return f;
}

FamilySpec FamilySpec::extended(CustomEval g, int g_max_order) const {
    const FamilySpec base = *this;
    auto ge = std::make_shared<const CustomEval>(std::move(g));
    return custom(
        size_ + 1, std::min(max_order_, g_max_order),
        [base, ge](double x, int order, double* out) {
            base.eval_raw(x, order, out);
            (*ge)(x, order, out + base.size());
        },
        domain_, label_ + "+g");
}

namespace {

template <class T>
void eval_builtin(Variant variant, const std::vector<double>& params, T x, int order, T* out) {
    const std::size_t n = params.size();
    switch (variant) {
        case Variant::power:
        case Variant::monomial:
            if (x < 0) {
                for (std::size_t i = 0; i < n; ++i)
                    if (!is_integer(params[i]))
                        throw Error(Errc::DomainViolation,
                                    fmt::format("x^{} undefined at x = {}", params[i], static_cast<double>(x)));
            }
            for (std::size_t i = 0; i < n; ++i) out[i] = power_derivative<T>(params[i], x, order);
            break;
        case Variant::exponential:
            for (std::size_t i = 0; i < n; ++i) {
                const T r = params[i];
                out[i] = (order == 0 ? T(1) : std::pow(r, order)) * std::exp(r * x);
            }
            break;
        case Variant::rational: {
            T c = 1;
            for (int j = 1; j <= order; ++j) c *= -j;
            for (std::size_t i = 0; i < n; ++i) out[i] = c * std::pow(x + T(params[i]), -(order + 1));
            break;
        }
        case Variant::custom:
            break;
    }
}

}  // namespace

void FamilySpec::eval_raw(double x, int order, double* out) const {
    if (order > max_order_)
        throw Error(Errc::NonDifferentiable,
                    fmt::format("derivative order {} exceeds available order {}", order, max_order_));
    if (variant_ == Variant::custom)
        (*custom_)(x, order, out);
    else
        eval_builtin<double>(variant_, params_, x, order, out);
    if (!signs_.empty())
        for (std::size_t i = 0; i < size_; ++i) out[i] *= signs_[i];
}

void FamilySpec::eval_raw_ld(long double x, int order, long double* out) const {
    if (variant_ == Variant::custom) {
        std::vector<double> tmp(size_);
        eval_raw(static_cast<double>(x), order, tmp.data());
        std::copy(tmp.begin(), tmp.end(), out);
        return;
    }
    if (order > max_order_)
        throw Error(Errc::NonDifferentiable,
                    fmt::format("derivative order {} exceeds available order {}", order, max_order_));
    eval_builtin<long double>(variant_, params_, x, order, out);
    if (!signs_.empty())
        for (std::size_t i = 0; i < size_; ++i) out[i] *= signs_[i];
}

void FamilySpec::eval_basis_into(double x, int order, std::span<double> out) const {
    if (out.size() != size_) throw Error(Errc::DimensionMismatch, "output span length");
    if (!domain_.contains(x)) throw Error(Errc::DomainViolation, fmt::format("x = {} outside domain", x));
    if (order < 0) throw Error(Errc::InvalidArgument, "negative derivative order");
    eval_raw(x, order, out.data());
}

std::vector<double> FamilySpec::eval_basis(double x, int order) const {
    std::vector<double> out(size_);
    eval_basis_into(x, order, out);
    return out;
}

Verdict validate(const FamilySpec& family) {
    auto bad = [](std::string s) { return Verdict{false, std::move(s)}; };
    const Domain& d = family.domain();
    if (auto msg = d.check(); !msg.empty()) return bad(msg);
    if (family.size() == 0) return bad("empty family");
    if (family.variant() == Variant::custom) return {};

    const auto& p = family.params();
    for (std::size_t i = 1; i < p.size(); ++i)
        if (!(p[i - 1] < p[i])) return bad("parameter sequence not strictly increasing");
    for (double v : p)
        if (!std::isfinite(v)) return bad("non-finite parameter");

    switch (family.variant()) {
        case Variant::monomial:
            for (double v : p)
                if (v < 0 || !is_integer(v)) return bad("monomial degrees must be natural numbers");
            [[fallthrough]];
        case Variant::power: {
            const bool zero_in = d.contains(0.0);
            if (zero_in && p[0] != 0.0) return bad("α_0 ≠ 0 with 0 in domain");
            for (double v : p) {
                if (v < 0 && d.lower() <= 0)
                    return bad(fmt::format("negative exponent {} requires domain inf > 0", v));
                if (!is_integer(v) && d.lower() < 0)
                    return bad(fmt::format("non-integer exponent {} requires domain inside [0,∞)", v));
            }
            return {};
        }
        case Variant::rational:
            if (!d.has_lower()) return bad("rational family requires a finite left endpoint");
            if (!(-p[0] < d.a)) return bad(fmt::format("−α_0 = {} ≥ a = {}", -p[0], d.a));
            return {};
        case Variant::exponential:
        case Variant::custom:
            return {};
    }
    return {};
}

double SparsePoly::eval(double x, int order) const {
    if (coeffs.size() != family.size()) throw Error(Errc::DimensionMismatch, "coefficient length");
    std::vector<double> v(family.size());
    family.eval_raw(x, order, v.data());
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += coeffs[i] * v[i];
    return s;
}

std::vector<double> SparsePoly::eval_grid(std::span<const double> xs, int order) const {
    std::vector<double> out(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) out[j] = eval(xs[j], order);
    return out;
}

}  // namespace tsys
