#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semproc/function_classes.hpp"
#include "semproc/functions.hpp"
#include "semproc/measures.hpp"
#include "semproc/parallel.hpp"

namespace semproc {

// q̃(s,x) = q(s,x) - ν(q)(s). Sums of closed-form products stay products
// (the space factor is shifted); other functions are wrapped with a
// dominating function G + ν(G).
QFunction center_q(const QFunction& q, const NuModel& model, double tol = 1e-11);

// Z_n(q) = √n (P_n(q) - (λ_n⊗ν)(q)), evaluated as n^{-1/2} Σ_i [q(i/n,X_i) - ν(q)(i/n)]
// so that the centering is exact term by term. Per-index centering values
// and time-factor values are computed once per (q_list, n).
class ZnEvaluator {
 public:
  ZnEvaluator(std::vector<QFunction> q_list, std::size_t n, NuModel model, double tol = 1e-11);

  std::vector<double> operator()(const Sample& sample) const;
  std::size_t size() const noexcept { return q_.size(); }
  std::size_t n() const noexcept { return n_; }

 private:
  struct Term {
    double coef;
    std::vector<double> h;  // h(i/n), i = 1..n
    const GFunc* g;
  };
  std::vector<QFunction> q_;
  std::size_t n_;
  NuModel model_;
  std::vector<std::vector<double>> center_;     // ν(q)(i/n)
  std::vector<std::optional<std::vector<Term>>> terms_;
};

struct ZProcessEval {
  std::vector<QFunction> q_list;
  std::size_t n = 0;
  std::vector<double> values;
};

ZProcessEval eval_Zn(const std::vector<QFunction>& q_list, const Sample& sample, double tol = 1e-11);

enum class KernelMode { product, generic };

// Covariance of the limit: product mode λ(h1h2)[ν(g1g2) - ν(g1)ν(g2)] summed
// over product terms; generic mode integrates ν(q1q2)(s) - ν(q1)(s)ν(q2)(s)
// over s with nested quadrature in x.
double cov_kernel(const QFunction& q1, const QFunction& q2, KernelMode mode, const NuModel& model, double tol = 1e-11);
double kiefer_covariance(double s1, double x1, double s2, double x2);
// q(s,x) = 1{s ≤ s0}·1{x ≤ x0}.
QFunction kiefer_cell(double s0, double x0);

Eigen::MatrixXd covariance_matrix(const std::vector<QFunction>& q_list, KernelMode mode, const NuModel& model,
                                  double tol = 1e-11, Exec exec = Exec::parallel);

// Draws from N(0, cov) via symmetric eigendecomposition; eigenvalues in
// [-1e-10·trace, 0) are clamped to 0, smaller ones raise not-psd.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Eigen::MatrixXd& cov);
  Eigen::VectorXd draw(Rng& rng) const;
  const Eigen::MatrixXd& factor() const noexcept { return factor_; }
  double min_eigenvalue() const noexcept { return min_eig_; }

 private:
  Eigen::MatrixXd factor_;
  double min_eig_ = 0.0;
};

// count × k matrix of draws (row r uses stream derive_seed(seed, {"gaussian", r})).
Eigen::MatrixXd gaussian_fidi_sample(const Eigen::MatrixXd& cov, std::size_t count, std::uint64_t seed);
Eigen::MatrixXd gaussian_fidi_sample(const std::vector<QFunction>& q_list, KernelMode mode, const NuModel& model,
                                     std::size_t count, std::uint64_t seed);

// sup_x |F_m(x) - Φ(x/σ)| for the empirical law of `values`.
double ks_distance_normal(std::vector<double> values, double variance);
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& draws);

struct FidiTestReport {
  Eigen::MatrixXd analytic_cov;
  Eigen::MatrixXd empirical_cov;
  double max_cov_error = 0.0;
  std::vector<double> ks_marginals;
  std::vector<std::vector<double>> combinations;  // unit Cramér–Wold directions
  std::vector<double> ks_combinations;
  std::vector<bool> degenerate;  // marginal variance < 1e-12
  double cov_tolerance = 0.05;
  double ks_tolerance = 0.03;
  bool cov_pass = false;
  bool ks_pass = false;
  bool pass() const { return cov_pass && ks_pass; }
};

FidiTestReport fidi_convergence_test(const std::vector<QFunction>& q_list, std::size_t n, std::size_t R,
                                     std::uint64_t seed, const NuModel& model, double cov_tolerance = 0.05,
                                     double ks_tolerance = 0.03, std::size_t combinations = 5,
                                     Exec exec = Exec::parallel);

struct QuadratureLimitRow {
  std::size_t n = 0;
  double discrete = 0.0;  // (λ_n⊗ν)(q²)
  double gap = 0.0;       // |discrete - (λ⊗ν)(q²)|
};

struct QuadratureLimitReport {
  double limit = 0.0;
  std::vector<QuadratureLimitRow> rows;
  double tolerance = 0.0;
  bool pass = false;  // gap at the largest n ≤ tolerance
};

QuadratureLimitReport quadrature_limit_check(const QFunction& q, const std::vector<std::size_t>& n_list,
                                             const NuModel& model, double tolerance = 1e-2);

// ∫ g² 1{|g| ≥ t} dν for a closed-form space factor.
double truncated_second_moment(const GFunc& g, double t, const NuModel& model);

struct LindebergRow {
  std::size_t n = 0;
  double epsilon = 0.0;
  double variance = 0.0;        // (λ_n⊗ν)(q̃²)
  double ratio = 0.0;
  bool truncation_empty = false;  // ε√(nσ_n²) exceeds sup|q̃|
};

struct LindebergReport {
  bool degenerate = false;        // (λ⊗ν)(q̃²) < 1e-12
  double limit_variance = 0.0;
  double sup_bound = 0.0;         // bound on sup|q̃| (inf when unbounded)
  std::string method;             // closed-form | quadrature | monte-carlo
  std::vector<LindebergRow> rows;
  std::vector<std::pair<double, std::size_t>> thresholds;  // (ε, smallest n with empty truncation)
  double tolerance = 0.0;
  bool pass = false;              // degenerate, or every ε row at the largest n ≤ tolerance
};

LindebergReport lindeberg_check(const QFunction& q, const std::vector<std::size_t>& n_list,
                                const std::vector<double>& epsilon_list, const NuModel& model,
                                std::size_t mc_points = 0, std::uint64_t seed = 0, double tolerance = 1e-3,
                                Exec exec = Exec::parallel);

struct ModulusReport {
  std::vector<double> alphas;
  std::vector<std::vector<double>> per_replicate;  // [replicate][alpha]
  std::vector<double> mean_modulus;
  std::size_t h_net_size = 0;
  std::size_t g_net_size = 0;
  bool monotone = false;
  double small_to_large_ratio = 0.0;  // mean at smallest α / mean at largest α
};

// sup over net pairs with d2_lambda(h) + d2_nu(g) ≤ α of |Z_n(h1g1) - Z_n(h2g2)|
// for a Hölder class times half-lines; the half-line net sits at ν-quantile
// levels k/g_steps.
ModulusReport equicontinuity_modulus(const HolderClass& cls, std::size_t n, const std::vector<double>& alphas,
                                     double net_u, std::size_t R, std::uint64_t seed, const NuModel& model,
                                     std::size_t g_steps = 1000, Exec exec = Exec::parallel);

struct FluctuationRow {
  std::size_t n = 0;
  double alpha = 0.0;
  double observed = 0.0;      // sup over α-pairs of ‖f1 - f2‖ in L2(λ_n⊗ν)
  double oscillation = 0.0;   // sup over net pairs of |λ_n((h1-h2)²) - λ((h1-h2)²)|
  double bound = 0.0;         // M_H·α + √ν(G²)·(α + √oscillation)
  double unit_bound = 0.0;    // 2α + √oscillation (envelopes normalized to 1)
};

struct FluctuationReport {
  double h_envelope = 0.0;
  double g_second_moment = 1.0;
  std::vector<FluctuationRow> rows;
  bool within_bound = true;
  bool monotone_in_alpha = true;
};

FluctuationReport fluctuation_bound_check(const HolderClass& cls, const std::vector<std::size_t>& n_list,
                                          const std::vector<double>& alphas, double net_u, const NuModel& model,
                                          std::size_t g_steps = 100, Exec exec = Exec::parallel);

}  // namespace semproc
