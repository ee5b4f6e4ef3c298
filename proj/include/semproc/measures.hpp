#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semproc/functions.hpp"
#include "semproc/interval_set.hpp"
#include "semproc/rng.hpp"

namespace semproc {

// Sampling law ν of the X_i.
class NuModel {
 public:
  enum class Kind { uniform01, standard_normal, exponential };

  static NuModel uniform01() { return NuModel(Kind::uniform01, 1.0); }
  static NuModel standard_normal() { return NuModel(Kind::standard_normal, 1.0); }
  static NuModel exponential(double rate);
  // "uniform01", "standard-normal", "exponential(2.5)"
  static NuModel parse(std::string_view id);

  Kind kind() const noexcept { return kind_; }
  double rate() const noexcept { return rate_; }
  std::string id() const;

  double cdf(double w) const;
  double pdf(double x) const;
  double quantile(double p) const;
  double draw(Rng& rng) const;

  // Interval carrying all but a negligible (< 1e-300) amount of mass, and
  // interior cut points that help quadrature.
  double support_lo() const;
  double support_hi() const;
  std::vector<double> quadrature_breaks() const;

  // ∫_a^b x^k dν (a, b may be infinite).
  double partial_moment(int k, double a, double b) const;
  double raw_moment(int k) const;

  // ∫ f dν by quadrature over the effective support.
  double expect(const std::function<double(double)>& f, std::span<const double> breaks = {}, double tol = 1e-11) const;

  friend bool operator==(const NuModel& a, const NuModel& b) { return a.kind_ == b.kind_ && a.rate_ == b.rate_; }

 private:
  NuModel(Kind kind, double rate) : kind_(kind), rate_(rate) {}
  Kind kind_;
  double rate_;
};

struct Sample {
  std::size_t n = 0;
  std::vector<double> values;
  std::uint64_t seed = 0;
  NuModel model = NuModel::uniform01();
};

// X_i = model.draw(Rng(seed)) in order i = 1..n.
Sample draw_sample(const NuModel& model, std::size_t n, std::uint64_t seed);
void write_sample_csv(const Sample& sample, std::ostream& os);

// (1/n) Σ_{i=1..n} h(i/n), summed left to right.
double eval_lambda_n(const std::function<double(double)>& h, std::size_t n);
double eval_lambda_n(const HFunc& h, std::size_t n);

// λ(h) by adaptive quadrature (exact for closed-form HFunc kinds).
double eval_lambda(const std::function<double(double)>& h, double tol = 1e-9, std::span<const double> breaks = {});
double eval_lambda(const HFunc& h, double tol = 1e-9);

// λ_n(h1 h2) and λ(h1 h2); the latter exact for indicator / piecewise-linear
// pairs, quadrature otherwise.
double eval_lambda_n_product(const HFunc& h1, const HFunc& h2, std::size_t n);
double eval_lambda_product(const HFunc& h1, const HFunc& h2, double tol = 1e-11);

// P_n(q) = (1/n) Σ q(i/n, X_i).
double eval_semp(const QFunction& q, const Sample& sample);

struct BEmpirical {
  double value = 0.0;
  std::int64_t k = 0;
  bool empty_intersection = false;
};

std::int64_t k_n_B(const IntervalUnion& B, std::int64_t n);
BEmpirical eval_b_empirical(const IntervalUnion& B, const std::function<double(double)>& g, const Sample& sample);

// ν moments of x-factors; closed form unless the factor is custom.
double nu_expect(const GFunc& g, const NuModel& model, double tol = 1e-11);
double nu_product(const GFunc& g1, const GFunc& g2, const NuModel& model, double tol = 1e-11);
bool nu_closed_form(const GFunc& g) noexcept;

// ν(q)(s) and ν(q1 q2)(s).
double nu_of_q(const QFunction& q, double s, const NuModel& model, double tol = 1e-11);
double nu_of_qq(const QFunction& q1, const QFunction& q2, double s, const NuModel& model, double tol = 1e-11);

// (λ_n ⊗ ν)(q), (λ_n ⊗ ν)(q1 q2), (λ ⊗ ν)(q1 q2).
double lambda_n_nu(const QFunction& q, std::size_t n, const NuModel& model, double tol = 1e-11);
double lambda_n_nu_product(const QFunction& q1, const QFunction& q2, std::size_t n, const NuModel& model,
                           double tol = 1e-11);
double lambda_nu_product(const QFunction& q1, const QFunction& q2, const NuModel& model, double tol = 1e-10);

}  // namespace semproc
