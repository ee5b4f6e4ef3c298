#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semproc/function_classes.hpp"
#include "semproc/measures.hpp"
#include "semproc/parallel.hpp"

namespace semproc {

enum class Centering { lambda_n, lambda };
const char* centering_name(Centering c) noexcept;

struct DeviationSandwich {
  double lower = 0.0;  // max over the net
  double upper = 0.0;  // lower + 2·net_u
  double net_u = 0.0;
  std::size_t n = 0;
  Centering centering = Centering::lambda_n;
  std::size_t net_size = 0;
};

// sup over H·G of |P_n(hg) - c(h)ν(g)| with c = λ_n or λ. The time factor
// ranges over a net (sup-norm for Hölder classes, a breakpoint grid with
// bracketing for set classes); the indicator space factor is handled exactly
// through the n+1 canonical cuts between order statistics.
DeviationSandwich sup_deviation_net(const ProductClass& cls, const Sample& sample, double net_u, Centering centering,
                                    Exec exec = Exec::parallel);

struct ExactDeviation {
  double value = 0.0;
  std::size_t cut = 0;   // half-line containing the `cut` smallest observations
  bool positive = true;  // sign of the maximizing deviation
};

// Exact sup over B(2j+1) or B(2j) and half-lines of |P_n(B×W) - λ_n(B)ν(W)|.
ExactDeviation sup_deviation_exact_BW(int j, Parity parity, const Sample& sample, Exec exec = Exec::parallel);
// Same statistic by the generic O(n²·j) dynamic program (no j = 0 fast path).
ExactDeviation sup_deviation_exact_BW_dp(int j, Parity parity, const Sample& sample, Exec exec = Exec::serial);

struct OscillationResult {
  double value = 0.0;  // max over net pairs of |λ_n((h1-h2)²) - λ((h1-h2)²)|
  double net_u = 0.0;
  std::size_t net_size = 0;
  std::size_t n = 0;
};

OscillationResult oscillation_sup(const HClass& cls, std::size_t n, double net_u, Exec exec = Exec::parallel);
// The same maximum over an explicit family.
double oscillation_sup(const std::vector<HFunc>& family, std::size_t n, Exec exec = Exec::parallel);

struct TailBound {
  double value = 0.0;      // 8 (k+1)^S exp(-ε² k / 32), may be +inf
  double log_value = 0.0;
  bool applicable = true;  // k ≥ 8 ε⁻²
  bool vacuous = false;    // value > 1
};

TailBound gc_tail_bound(double epsilon, std::int64_t k, int S);

// ∫_1^∞ ∫_y^∞ y^D1 x^D2 e^{-cx} dx dy via the finite double sum.
double series_I_closed_form(double c, int D1, int D2);

enum class SeriesVerdict { convergent, divergent, undetermined };
const char* verdict_name(SeriesVerdict v) noexcept;

struct SeriesReport {
  int D = 0;
  double c = 0.0;
  std::size_t N = 0;
  std::vector<double> log_partial_sums;      // log S_1 .. log S_N
  std::vector<double> log_upper_partial;     // log Σ n^D (2e^{-c})^n, when c > log 2
  std::vector<double> lower_bound_terms;     // (2e^{-c})^n, n = 1..N (may be +inf)
  double last_increment_ratio = 0.0;         // term_N / S_N
  SeriesVerdict verdict = SeriesVerdict::undetermined;
};

// S(D,c) = Σ_{n≥1} Σ_{k=1}^n k^D C(n,k) e^{-cn}, partial sums in log domain.
SeriesReport series_S_diagnostic(int D, double c, std::size_t N);

struct GCConfig {
  int j = 0;
  Parity parity = Parity::odd;
  NuModel model = NuModel::uniform01();
  std::vector<std::size_t> n_schedule;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
};

struct GCRow {
  std::size_t n = 0;
  std::vector<double> deviations;  // λ_n-centered exact statistic, one per replicate
  double mean = 0.0, median = 0.0, q95 = 0.0, max = 0.0;
  double correction = 0.0;        // sup_B |λ_n(B) - λ(B)| (exact)
  double correction_bound = 0.0;  // 2(2j+1)/n or 4j/n
  double lambda_centered_max = 0.0;  // max deviation + correction
};

struct GCReport {
  GCConfig config;
  std::vector<GCRow> rows;
};

GCReport gc_experiment(const GCConfig& config, Exec exec = Exec::parallel);

// Empirical quantile with linear interpolation between order statistics.
double quantile_sorted(const std::vector<double>& sorted, double p);

}  // namespace semproc
