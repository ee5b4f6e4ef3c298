#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semproc/function_classes.hpp"
#include "semproc/functions.hpp"
#include "semproc/measures.hpp"
#include "semproc/parallel.hpp"

namespace semproc {

// Symmetric matrix of pairwise distances of a finite pseudo-metric space.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  template <class Dist>
  static DistanceMatrix build(std::size_t n, Dist&& dist, Exec exec = Exec::parallel) {
    DistanceMatrix m(n);
    parallel_for(n, exec, [&](std::size_t i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = dist(i, j);
        m.d_[i * n + j] = v;
        m.d_[j * n + i] = v;
      }
    });
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) noexcept {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }
  double diameter() const;
  DistanceMatrix restricted(const std::vector<std::size_t>& keep) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

// Context needed by the sample- or n-dependent pseudo-metrics.
struct MetricContext {
  const Sample* sample = nullptr;
  std::size_t n = 0;
  NuModel model = NuModel::uniform01();
  double tol = 1e-11;
};

// Time-factor metrics: d1_lambdan, d2_lambdan, d1_lambda, d2_lambda, sup
// (sup exact for piecewise-linear / indicator pairs only).
double eval_pseudometric(Metric metric, const HFunc& a, const HFunc& b, const MetricContext& ctx);
// Space-factor metrics: d1_nun, d2_nun, d2_nu.
double eval_pseudometric(Metric metric, const GFunc& a, const GFunc& b, const MetricContext& ctx);
// Index-space metrics: d1_Pn, d2_product (‖·‖ in L2(λ_n ⊗ ν)), composite_d
// (d2_lambda on the h factors plus d2_nu on the g factors; products only).
double eval_pseudometric(Metric metric, const QFunction& a, const QFunction& b, const MetricContext& ctx);

// Farthest-point-first u-net: centers are members, every member is at
// distance < u from a center. Returns center indices in selection order.
std::vector<std::size_t> greedy_net(const DistanceMatrix& d, double u);
// Minimal u-net size by exhaustive search (≤ 20 members). With `ambient`,
// centers range over `ambient` members while `targets` must be covered.
std::size_t exact_covering_number(const DistanceMatrix& d, double u);
std::size_t exact_covering_number(const DistanceMatrix& d, double u, const std::vector<std::size_t>& targets);

struct CoveringNumber {
  std::size_t greedy = 0;
  std::optional<std::size_t> exact;  // set when the family has ≤ 12 members
  bool greedy_is_minimal = false;
};

CoveringNumber covering_number(const DistanceMatrix& d, double u);

struct LemmaResult {
  std::string lemma;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::string worst_case;  // serialized counterexample or tightest instance
  double worst_margin = 0.0;
};

struct LemmaReport {
  std::vector<LemmaResult> lemmas;        // the four covering lemmas
  std::vector<LemmaResult> diagnostics;   // greedy relations, literal subset reading
  std::size_t total_violations() const;
};

// Randomized finite pseudo-metric spaces (≤ 10 points) with exhaustive
// covering numbers. Subset monotonicity is checked with centers taken from
// the ambient space; the literal reading with centers restricted to the
// subspace is reported as a diagnostic. Throws lemma-violation when
// `throw_on_violation` and any lemma fails.
LemmaReport check_covering_lemmas(std::size_t trials, std::uint64_t seed, bool throw_on_violation = false,
                                  Exec exec = Exec::parallel);

struct ShatterClass {
  enum class Kind { half_lines, bvector } kind = Kind::half_lines;
  BVectorClass bvector{};
  std::string name() const;
  std::optional<int> claimed_dimension() const;
};

struct ShatterReport {
  std::vector<double> points;
  std::string class_id;
  std::uint64_t coefficient = 0;
  std::vector<std::uint32_t> dichotomies;  // bit i set: point i (input order) in the set
};

// Exact number of subsets cut out of `points` (≤ 20). Interval-built classes
// are enumerated by assigning each breakpoint to a gap between consecutive
// sorted points; every gap position is realizable by an interior point.
ShatterReport shatter_coefficient(const ShatterClass& cls, const std::vector<double>& points, bool list = false);

struct ProductCoverCheck {
  std::size_t greedy_F = 0;          // greedy τ-net of H×G under the target metric
  std::size_t product_net_size = 0;  // (greedy τ/2-net of H) × (greedy τ/2-net of G)
  bool product_net_covers = false;   // verified to be a τ-net of H×G
  std::size_t packing_bound = 0;     // greedy_H(τ/4) · greedy_G(τ/4) ≥ N(τ/2, H×G) ≥ greedy_F
};

// H×G with a target metric dominated by dh + dg; `target(i, j, k, l)` gives
// the distance between (h_i, g_j) and (h_k, g_l).
template <class Target>
ProductCoverCheck check_product_cover(const DistanceMatrix& dh, const DistanceMatrix& dg, double tau, Target&& target,
                                      Exec exec = Exec::parallel);

struct CoveringBoundednessRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  ProductCoverCheck check;
};

struct CoveringBoundednessReport {
  double tau = 0.0;
  std::size_t family_size = 0;
  std::vector<CoveringBoundednessRow> rows;
  std::size_t max_observed = 0;
  std::size_t max_bound = 0;
  bool all_within_bound = true;
};

// Greedy covering numbers of a fixed net of a uniformly bounded product
// class under the random metric d1_Pn, one per (n, seed).
CoveringBoundednessReport random_covering_boundedness(const ProductClass& cls, double tau,
                                                      const std::vector<std::size_t>& n_list,
                                                      const std::vector<std::uint64_t>& seeds,
                                                      std::size_t h_net_points = 21, std::size_t g_net_points = 21,
                                                      Exec exec = Exec::parallel);

// ---------------------------------------------------------------- template

template <class Target>
ProductCoverCheck check_product_cover(const DistanceMatrix& dh, const DistanceMatrix& dg, double tau, Target&& target,
                                      Exec exec) {
  ProductCoverCheck out;
  const std::size_t nh = dh.size(), ng = dg.size(), nf = nh * ng;
  const DistanceMatrix df = DistanceMatrix::build(
      nf, [&](std::size_t a, std::size_t b) { return target(a / ng, a % ng, b / ng, b % ng); }, exec);
  out.greedy_F = greedy_net(df, tau).size();
  const auto ch = greedy_net(dh, tau / 2.0);
  const auto cg = greedy_net(dg, tau / 2.0);
  out.product_net_size = ch.size() * cg.size();
  bool covers = true;
  for (std::size_t a = 0; a < nf && covers; ++a) {
    bool hit = false;
    for (auto i : ch)
      for (auto j : cg)
        if (df(a, i * ng + j) < tau) hit = true;
    covers = hit;
  }
  out.product_net_covers = covers;
  out.packing_bound = greedy_net(dh, tau / 4.0).size() * greedy_net(dg, tau / 4.0).size();
  return out;
}

}  // namespace semproc
