#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "semproc/interval_set.hpp"

namespace semproc {

// Function on [0,1]: piecewise-linear interpolant of knots plus an optional
// cusp term amp * |s - center|^exponent.
class HolderFunction {
 public:
  HolderFunction(std::vector<double> xs, std::vector<double> ys, double cusp_amp = 0.0, double cusp_center = 0.0,
                 double cusp_exponent = 1.0);

  double operator()(double s) const;
  double integral() const;  // exact Lebesgue integral over [0,1]
  std::vector<double> breakpoints() const;

  const std::vector<double>& xs() const noexcept { return xs_; }
  const std::vector<double>& ys() const noexcept { return ys_; }
  double cusp_amp() const noexcept { return amp_; }
  double cusp_center() const noexcept { return center_; }
  double cusp_exponent() const noexcept { return exponent_; }
  bool piecewise_linear() const noexcept { return amp_ == 0.0; }
  double sup_abs() const;

 private:
  std::vector<double> xs_, ys_;
  double amp_, center_, exponent_;
};

// Exact ∫_0^1 (f1 - f2)^2 for two piecewise-linear functions.
double pl_l2_sq_distance(const HolderFunction& f1, const HolderFunction& f2);

// A factor depending on the time coordinate s ∈ [0,1].
class HFunc {
 public:
  enum class Kind { constant, indicator, holder, custom };

  static HFunc constant(double c);
  static HFunc indicator(IntervalUnion set);
  static HFunc holder(HolderFunction h);
  static HFunc custom(std::function<double(double)> f, std::vector<double> breaks, double sup_abs, std::string label);

  Kind kind() const noexcept { return kind_; }
  double operator()(double s) const;
  // h(i/n), with exact membership for indicators.
  double at_grid(std::size_t i, std::size_t n) const;
  std::vector<double> breakpoints() const;
  std::optional<double> lambda_exact() const;
  double sup_abs() const noexcept { return sup_; }
  const IntervalUnion* as_indicator() const { return kind_ == Kind::indicator ? &set_ : nullptr; }
  const HolderFunction* as_holder() const { return kind_ == Kind::holder ? &*holder_ : nullptr; }
  std::string label() const;

 private:
  Kind kind_ = Kind::constant;
  double c_ = 0.0;
  IntervalUnion set_;
  std::optional<HolderFunction> holder_;
  std::shared_ptr<const std::function<double(double)>> fn_;
  std::vector<double> breaks_;
  double sup_ = 0.0;
  std::string label_;
};

// A factor depending on the space coordinate x ∈ U. Closed-form members are
// g(x) = p(x) · 1{lo ≤ x ≤ hi} + shift with a polynomial p; custom members
// are arbitrary callables whose moments fall back to quadrature.
class GFunc {
 public:
  static constexpr double inf = std::numeric_limits<double>::infinity();

  static GFunc constant(double c);
  static GFunc half_line(double w);         // 1{x ≤ w}
  static GFunc initial_interval(double w);  // 1{0 ≤ x ≤ w}
  static GFunc polynomial(std::vector<double> coefs);
  static GFunc restricted_polynomial(std::vector<double> coefs, double lo, double hi, double shift);
  static GFunc custom(std::function<double(double)> f, std::vector<double> breaks, std::string label,
                      double sup_abs = inf);

  double operator()(double x) const;
  bool closed_form() const noexcept { return !fn_; }
  GFunc shifted(double c) const;
  GFunc scaled(double a) const;

  const std::vector<double>& coefs() const noexcept { return coefs_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double shift() const noexcept { return shift_; }
  std::vector<double> breakpoints() const;
  // sup |g| over the real line (inf when unbounded).
  double sup_abs() const;
  std::string label() const;

 private:
  std::vector<double> coefs_{0.0};
  double lo_ = -inf, hi_ = inf, shift_ = 0.0;
  std::shared_ptr<const std::function<double(double)>> fn_;
  std::vector<double> breaks_;
  double sup_ = inf;
  std::string label_;
};

double poly_eval(const std::vector<double>& coefs, double x);
std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b);

// Element q of the index space: a real function of (s, x) with a dominating
// function of x and a flag for λ-a.e. continuity in s. Products h·g and
// linear combinations keep their structure so moments stay exact.
class QFunction {
 public:
  enum class Kind { product, combination, generic };

  static QFunction product(HFunc h, GFunc g);
  static QFunction constant(double c) { return product(HFunc::constant(1.0), GFunc::constant(c)); }
  static QFunction combination(std::vector<double> coefs, std::vector<QFunction> terms);
  static QFunction generic(std::function<double(double, double)> f, GFunc dominating,
                           std::vector<double> s_breaks, std::vector<double> x_breaks, bool s_continuous,
                           std::string label);

  Kind kind() const;
  double operator()(double s, double x) const;
  // q(i/n, x), with exact grid membership for indicator factors.
  double at_grid(std::size_t i, std::size_t n, double x) const;
  const GFunc& dominating() const;
  bool s_continuous() const;
  std::vector<double> s_breaks() const;
  std::vector<double> x_breaks() const;
  std::string label() const;

  // Structure accessors (valid for the matching kind only).
  const HFunc& h() const;
  const GFunc& g() const;
  const std::vector<double>& coefs() const;
  const std::vector<QFunction>& terms() const;

  // Flattened list of (coef, h, g) when the function is a finite sum of
  // products; empty optional otherwise.
  struct ProductTerm {
    double coef;
    const HFunc* h;
    const GFunc* g;
  };
  std::optional<std::vector<ProductTerm>> product_terms() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace semproc
