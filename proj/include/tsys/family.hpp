#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tsys {

enum class DomainKind { closed_interval, left_closed_halfline, real_line };

struct Domain {
    DomainKind kind = DomainKind::closed_interval;
    double a = 0.0;
    double b = 1.0;

    [[nodiscard]] static Domain interval(double a, double b) { return {DomainKind::closed_interval, a, b}; }
    [[nodiscard]] static Domain halfline(double a) { return {DomainKind::left_closed_halfline, a, 0.0}; }
    [[nodiscard]] static Domain real_line() { return {DomainKind::real_line, 0.0, 0.0}; }

    [[nodiscard]] bool has_lower() const noexcept { return kind != DomainKind::real_line; }
    [[nodiscard]] bool has_upper() const noexcept { return kind == DomainKind::closed_interval; }
    [[nodiscard]] double lower() const noexcept {
        return has_lower() ? a : -std::numeric_limits<double>::infinity();
    }
    [[nodiscard]] double upper() const noexcept {
        return has_upper() ? b : std::numeric_limits<double>::infinity();
    }
    [[nodiscard]] bool contains(double x) const noexcept { return x >= lower() && x <= upper(); }
    [[nodiscard]] bool is_endpoint(double x) const noexcept {
        return (has_lower() && x == a) || (has_upper() && x == b);
    }
    /// Empty string when the domain itself is well formed.
    [[nodiscard]] std::string check() const;
};

[[nodiscard]] const char* domain_kind_name(DomainKind k) noexcept;

enum class Variant { power, exponential, rational, monomial, custom };

[[nodiscard]] const char* variant_name(Variant v) noexcept;

/// Fills out[0..n] with f_i^{(order)}(x).
using CustomEval = std::function<void(double x, int order, double* out)>;

/// Ordered family f_0..f_n on a domain.
class FamilySpec {
public:
    FamilySpec() = default;

    [[nodiscard]] static FamilySpec power(std::vector<double> exponents, Domain d);
    [[nodiscard]] static FamilySpec exponential(std::vector<double> rates, Domain d);
    [[nodiscard]] static FamilySpec rational(std::vector<double> shifts, Domain d);
    [[nodiscard]] static FamilySpec monomial(std::vector<int> degrees, Domain d);
    /// 1, x, ..., x^n
    [[nodiscard]] static FamilySpec monomials(int n, Domain d);
    [[nodiscard]] static FamilySpec custom(std::size_t size, int max_order, CustomEval eval, Domain d,
                                           std::string label = "custom");

    [[nodiscard]] Variant variant() const noexcept { return variant_; }
    [[nodiscard]] const std::vector<double>& params() const noexcept { return params_; }
    [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] int n() const noexcept { return static_cast<int>(size_) - 1; }
    [[nodiscard]] int max_order() const noexcept { return max_order_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    [[nodiscard]] FamilySpec with_domain(Domain d) const;
    /// f_0..f_{k-1}
    [[nodiscard]] FamilySpec prefix(std::size_t k) const;
    /// Same functions with f_i multiplied by s[i].
    [[nodiscard]] FamilySpec with_signs(const std::vector<int>& s) const;
    /// Family {f_0..f_n, g} with g given as a custom evaluator.
    [[nodiscard]] FamilySpec extended(CustomEval g, int max_order) const;

    /// Checked evaluation of all basis functions.
    [[nodiscard]] std::vector<double> eval_basis(double x, int order) const;
    void eval_basis_into(double x, int order, std::span<double> out) const;
    /// Unchecked variant used by inner loops; x may lie slightly outside the domain.
    void eval_raw(double x, int order, double* out) const;
    /// Same in long double; custom families are evaluated in double and widened.
    void eval_raw_ld(long double x, int order, long double* out) const;

private:
    Variant variant_ = Variant::monomial;
    std::vector<double> params_;
    Domain domain_;
    std::size_t size_ = 0;
    int max_order_ = std::numeric_limits<int>::max();
    std::shared_ptr<const CustomEval> custom_;
    std::vector<int> signs_;
    std::string label_;
};

struct Verdict {
    bool ok = true;
    std::string violation;
};

[[nodiscard]] Verdict validate(const FamilySpec& family);

/// Coefficients in a family basis, f = sum a_i f_i.
struct SparsePoly {
    FamilySpec family;
    std::vector<double> coeffs;

    [[nodiscard]] double eval(double x, int order = 0) const;
    [[nodiscard]] std::vector<double> eval_grid(std::span<const double> xs, int order = 0) const;
};

}  // namespace tsys
