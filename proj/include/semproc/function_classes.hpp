#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "semproc/functions.hpp"
#include "semproc/interval_set.hpp"
#include "semproc/measures.hpp"
#include "semproc/rational.hpp"
#include "semproc/rng.hpp"

namespace semproc {

enum class Metric {
  sup,
  d1_Pn,
  d1_nun,
  d1_lambdan,
  d1_lambda,
  d2_lambdan,
  d2_nun,
  d2_lambda,
  d2_nu,
  d2_product,
  composite_d,
};

const char* metric_name(Metric m) noexcept;
Metric parse_metric(const std::string& name);

// H(T, C, β): |h(0)| ≤ T and |h(x) - h(y)| ≤ C|x - y|^β on [0,1].
struct HolderClass {
  double T = 1.0;
  double C = 1.0;
  double beta = 1.0;

  void validate() const;
  double envelope() const { return C + T; }
  double riemann_gap_bound(std::size_t n) const;      // C / n^β
  double oscillation_sup_bound(std::size_t n) const;  // 8 C (C+T) / n^β
  HolderFunction random_member(Rng& rng) const;
  // Randomized pair audit of the class constraints; returns the worst excess
  // (≤ slack means the audit passed).
  double audit(const HolderFunction& h, Rng& rng, int pairs = 1000) const;
};

struct HolderNetPlan {
  std::size_t grid_points = 0;  // m: knots at k/m
  double step = 0.0;            // value lattice step v
  double shrink = 1.0;          // ρ
  double guaranteed_error = 0.0;
  double estimated_size = 0.0;
  bool zero_only = false;       // u exceeds the envelope: {0} suffices
};

HolderNetPlan plan_holder_net(const HolderClass& cls, double u);
// Piecewise-linear Hölder-feasible members on the grid k/m with lattice
// values; every class member is within the plan's guaranteed_error < u in
// sup-norm. Throws NetTooLarge beyond `cap` members.
std::vector<HolderFunction> build_holder_net(const HolderClass& cls, double u, std::size_t cap = 200000);

enum class Parity { odd, even };

// B(2j+1) = {(0,t0] ∪ (t1,t2] ∪ … ∪ (t_{2j-1},t_{2j}]}; B(2j) drops (0,t0].
// Breakpoints satisfy t_{2k} ≤ t_{2k+1} and t_{2k-1} < t_{2k}; empty pieces
// are dropped on normalization.
struct BVectorClass {
  int j = 0;
  Parity parity = Parity::odd;

  void validate() const;
  int breakpoint_count() const { return parity == Parity::odd ? 2 * j + 1 : 2 * j; }
  int max_runs() const { return parity == Parity::odd ? j + 1 : j; }
  int vc_dimension() const { return breakpoint_count(); }
  std::string name() const;

  IntervalUnion member(const std::vector<Rational>& t) const;
  std::vector<Rational> random_breakpoints(Rng& rng) const;
  IntervalUnion random_member(Rng& rng) const { return member(random_breakpoints(rng)); }
  double riemann_gap_bound(std::size_t n) const;  // 2(2j+1)/n or 4j/n
  // sup over the class of |λ_n(B) - λ(B)| (a supremum, approached not attained).
  Rational sup_lambda_gap(std::int64_t n) const;
  // Breakpoints snapped to a mesh so that every member is within u under a
  // population metric (d1_lambda or d2_lambda).
  std::vector<IntervalUnion> build_net(double u, Metric metric, std::size_t cap = 200000) const;
  // All distinct members whose breakpoints lie on {k/cells}.
  std::vector<IntervalUnion> grid_members(std::int64_t cells, std::size_t cap = 200000) const;
};

// B_n = ∪_{m=0}^{n-1} (m/n, (m+1)/n - ε_n] with ε_n = 1/(n 2^n).
IntervalUnion b_infinity_witness(std::int64_t n);

struct BInfinityClass {};

using SetOrFunctionClass = std::variant<HolderClass, BVectorClass, BInfinityClass>;
// Closed-form uniform bound on |λ_n - λ| over the class; no-bound error for B_∞.
double riemann_gap_bound(const SetOrFunctionClass& cls, std::size_t n);

Rational observed_riemann_gap(const IntervalUnion& B, std::int64_t n);
double observed_riemann_gap(const HolderFunction& h, std::size_t n);

enum class GKind { half_lines, initial_intervals, polynomials };

struct GClass {
  GKind kind = GKind::half_lines;
  int degree = 0;          // polynomials only
  double coef_bound = 1.0; // polynomials: |a_k| ≤ coef_bound

  std::string name() const;
  bool constant_envelope() const { return kind != GKind::polynomials || degree == 0; }
  GFunc envelope() const;
  GFunc member(double w) const;  // indicator kinds
  GFunc random_member(Rng& rng, const NuModel& model) const;
  // Net in d2_nu (indicator kinds, any model) or sup-norm on [0,1]
  // (polynomials, uniform model only).
  std::vector<GFunc> build_net(double u, const NuModel& model, Metric metric, std::size_t cap = 200000) const;
};

enum class Taxonomy { ub_mvc, nuG_jvc, nuG2_jvc };
const char* taxonomy_name(Taxonomy t) noexcept;

using HClass = std::variant<HolderClass, BVectorClass>;

struct ProductClass {
  HClass h_class;
  GClass g_class;
  Taxonomy tag = Taxonomy::ub_mvc;

  // Rejects a uniformly-bounded tag with a non-constant envelope.
  static ProductClass make(HClass h, GClass g, Taxonomy tag);
  double h_envelope() const;
};

// Net of the time factor at resolution u: sup-norm for Hölder classes,
// d2_lambda for set classes.
std::vector<HFunc> build_h_net(const HClass& cls, double u, std::size_t cap = 200000);

double eval_member(const HolderFunction& h, double s);
double eval_member(const IntervalUnion& B, double s);
double eval_member(const GFunc& g, double x);

}  // namespace semproc
