#include "semproc/ulln.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "semproc/error.hpp"

namespace semproc {

const char* centering_name(Centering c) noexcept { return c == Centering::lambda_n ? "lambda_n" : "lambda"; }

const char* verdict_name(SeriesVerdict v) noexcept {
  switch (v) {
    case SeriesVerdict::convergent: return "convergent";
    case SeriesVerdict::divergent: return "divergent";
    case SeriesVerdict::undetermined: return "undetermined";
  }
  return "?";
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw Error(Errc::invalid_argument, "quantile of an empty list");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Observations cut by the space factor, in increasing order, with ν-masses of
// the canonical cuts. Cut k keeps the k smallest; ν(W) ranges over [lo[k], hi[k]).
struct Cuts {
  std::vector<std::size_t> order;  // 0-based sample indices, increasing in X
  std::vector<double> lo, hi;      // size order.size() + 1
  std::vector<char> realizable;
};

Cuts make_cuts(const Sample& sample, GKind kind) {
  const NuModel& model = sample.model;
  Cuts c;
  double base = 0.0;
  for (std::size_t i = 0; i < sample.n; ++i)
    if (kind != GKind::initial_intervals || sample.values[i] >= 0.0) c.order.push_back(i);
  if (kind == GKind::initial_intervals) base = model.cdf(0.0);
  std::sort(c.order.begin(), c.order.end(),
            [&](std::size_t a, std::size_t b) { return sample.values[a] < sample.values[b] || (sample.values[a] == sample.values[b] && a < b); });
  const std::size_t m = c.order.size();
  c.lo.resize(m + 1);
  c.hi.resize(m + 1);
  c.realizable.assign(m + 1, 1);
  for (std::size_t k = 0; k <= m; ++k) {
    c.lo[k] = k == 0 ? 0.0 : model.cdf(sample.values[c.order[k - 1]]) - base;
    c.hi[k] = k == m ? 1.0 - base : model.cdf(sample.values[c.order[k]]) - base;
    if (k > 0 && k < m && sample.values[c.order[k - 1]] == sample.values[c.order[k]]) c.realizable[k] = 0;
  }
  return c;
}

// sup over the space factor of |P_n(h·g_w) - center·ν(g_w)| for one time factor.
double sup_over_cuts(const std::vector<double>& hv, double center, const Cuts& cuts, std::size_t n) {
  const double inv = 1.0 / static_cast<double>(n);
  double acc = 0.0, best = 0.0;
  for (std::size_t k = 0; k <= cuts.order.size(); ++k) {
    if (k > 0) acc += hv[cuts.order[k - 1]];
    if (!cuts.realizable[k]) continue;
    const double a = acc * inv;
    best = std::max({best, std::abs(a - center * cuts.lo[k]), std::abs(a - center * cuts.hi[k])});
  }
  return best;
}

}  // namespace

DeviationSandwich sup_deviation_net(const ProductClass& cls, const Sample& sample, double net_u, Centering centering,
                                    Exec exec) {
  if (cls.g_class.kind == GKind::polynomials)
    throw Error(Errc::invalid_argument, "net deviation supports indicator space factors (half-lines, initial intervals)");
  if (!(net_u > 0.0)) throw Error(Errc::invalid_argument, "net resolution u must be > 0");
  const std::size_t n = sample.n;
  if (n == 0) throw Error(Errc::invalid_argument, "empty sample");

  std::vector<HFunc> net;
  if (const auto* b = std::get_if<BVectorClass>(&cls.h_class)) {
    // Mesh refining the grid {i/n}: snapping to floor(nt)/n keeps the grid
    // trace, and inner/outer snaps bracket λ within K/cells ≤ u.
    const auto K = static_cast<double>(b->breakpoint_count());
    const auto L = static_cast<std::int64_t>(std::max(1.0, std::ceil(K / (net_u * static_cast<double>(n)))));
    for (auto& s : b->grid_members(L * static_cast<std::int64_t>(n))) net.push_back(HFunc::indicator(std::move(s)));
  } else {
    for (auto& h : build_holder_net(std::get<HolderClass>(cls.h_class), net_u)) net.push_back(HFunc::holder(std::move(h)));
  }

  const Cuts cuts = make_cuts(sample, cls.g_class.kind);
  std::vector<double> dev(net.size(), 0.0);
  parallel_for(net.size(), exec, [&](std::size_t a) {
    std::vector<double> hv(n);
    double sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      hv[i - 1] = net[a].at_grid(i, n);
      sum += hv[i - 1];
    }
    const double center = centering == Centering::lambda_n ? sum / static_cast<double>(n) : eval_lambda(net[a]);
    dev[a] = sup_over_cuts(hv, center, cuts, n);
  });
  DeviationSandwich out;
  out.lower = dev.empty() ? 0.0 : *std::max_element(dev.begin(), dev.end());
  out.net_u = net_u;
  out.upper = out.lower + 2.0 * net_u;
  out.n = n;
  out.centering = centering;
  out.net_size = net.size();
  return out;
}

// ---------------------------------------------------------------- exact B × W

namespace {

// Max of Σ a_i over a grid trace of a B(2j+1) (prefix plus ≤ j runs) or
// B(2j) (≤ j runs) member; the empty trace gives 0.
double max_trace_sum(const std::vector<double>& a, int j, Parity parity) {
  const auto J = static_cast<std::size_t>(j);
  std::vector<double> closed(J + 1, neg_inf), open(J + 1, neg_inf);
  closed[0] = 0.0;
  double prefix = parity == Parity::odd ? 0.0 : neg_inf;
  for (double ai : a) {
    for (std::size_t m = J; m >= 1; --m) open[m] = std::max(open[m], closed[m - 1]) + ai;
    for (std::size_t m = 1; m <= J; ++m) closed[m] = std::max(closed[m], open[m]);
    if (parity == Parity::odd) {
      prefix += ai;
      closed[0] = std::max(closed[0], prefix);
    }
  }
  return *std::max_element(closed.begin(), closed.end());
}

struct RankedSample {
  std::vector<std::size_t> rank;  // 1-based rank of X_i, i = 1..n
  std::vector<double> lo, hi;     // per cut k = 0..n
};

RankedSample rank_sample(const Sample& sample) {
  const Cuts cuts = make_cuts(sample, GKind::half_lines);
  RankedSample r;
  r.rank.resize(sample.n);
  for (std::size_t k = 0; k < cuts.order.size(); ++k) r.rank[cuts.order[k]] = k + 1;
  r.lo = cuts.lo;
  r.hi = cuts.hi;
  return r;
}

ExactDeviation pick(const std::vector<double>& pos, const std::vector<double>& neg, std::size_t n) {
  ExactDeviation out;
  double best = 0.0;
  for (std::size_t k = 0; k < pos.size(); ++k) {
    if (pos[k] > best) {
      best = pos[k];
      out.cut = k;
      out.positive = true;
    }
    if (neg[k] > best) {
      best = neg[k];
      out.cut = k;
      out.positive = false;
    }
  }
  out.value = best / static_cast<double>(n);
  return out;
}

}  // namespace

ExactDeviation sup_deviation_exact_BW_dp(int j, Parity parity, const Sample& sample, Exec exec) {
  BVectorClass{j, parity}.validate();
  const std::size_t n = sample.n;
  if (n == 0) throw Error(Errc::invalid_argument, "empty sample");
  const RankedSample rs = rank_sample(sample);
  std::vector<double> pos(n + 1), neg(n + 1);
  parallel_for(n + 1, exec, [&](std::size_t k) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double in = rs.rank[i] <= k ? 1.0 : 0.0;
      a[i] = in - rs.lo[k];
      b[i] = rs.hi[k] - in;
    }
    pos[k] = max_trace_sum(a, j, parity);
    neg[k] = max_trace_sum(b, j, parity);
  });
  return pick(pos, neg, n);
}

ExactDeviation sup_deviation_exact_BW(int j, Parity parity, const Sample& sample, Exec exec) {
  if (!(j == 0 && parity == Parity::odd)) return sup_deviation_exact_BW_dp(j, parity, sample, exec);
  const std::size_t n = sample.n;
  if (n == 0) throw Error(Errc::invalid_argument, "empty sample");
  const RankedSample rs = rank_sample(sample);
  // Initial segments (0, r/n]: count[k] = #{i ≤ r : rank_i ≤ k} grows with r.
  const std::size_t K = n + 1;
  std::vector<double> pos(K, 0.0), neg(K, 0.0);
  const std::size_t block = 2048;
  const std::size_t blocks = (K + block - 1) / block;
  parallel_for(blocks, exec, [&](std::size_t bi) {
    const std::size_t k0 = bi * block, k1 = std::min(K, k0 + block);
    std::vector<double> count(k1 - k0, 0.0);
    const double* lo = rs.lo.data() + k0;
    const double* hi = rs.hi.data() + k0;
    double* p = pos.data() + k0;
    double* q = neg.data() + k0;
    double* c = count.data();
    const std::size_t w = k1 - k0;
    for (std::size_t r = 1; r <= n; ++r) {
      const std::size_t rho = rs.rank[r - 1];
      for (std::size_t k = rho > k0 ? rho - k0 : 0; k < w; ++k) c[k] += 1.0;
      const auto rd = static_cast<double>(r);
      for (std::size_t k = 0; k < w; ++k) {
        p[k] = std::max(p[k], c[k] - rd * lo[k]);
        q[k] = std::max(q[k], rd * hi[k] - c[k]);
      }
    }
  });
  return pick(pos, neg, n);
}

// ---------------------------------------------------------------- oscillation

double oscillation_sup(const std::vector<HFunc>& family, std::size_t n, Exec exec) {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
  const std::size_t m = family.size();
  std::vector<std::vector<double>> hv(m);
  for (std::size_t a = 0; a < m; ++a) {
    if (family[a].as_indicator()) continue;
    hv[a].resize(n);
    for (std::size_t i = 1; i <= n; ++i) hv[a][i - 1] = family[a].at_grid(i, n);
  }
  std::vector<double> best(m, 0.0);
  parallel_for(m, exec, [&](std::size_t a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const auto* sa = family[a].as_indicator();
      const auto* sb = family[b].as_indicator();
      double gap;
      if (sa && sb) {
        const IntervalUnion d = sa->symmetric_difference(*sb);
        gap = abs(d.lambda_n(static_cast<std::int64_t>(n)) - d.lebesgue()).to_double();
      } else {
        double sum = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
          const double x = (sa ? family[a].at_grid(i, n) : hv[a][i - 1]) - (sb ? family[b].at_grid(i, n) : hv[b][i - 1]);
          sum += x * x;
        }
        const auto* pa = family[a].as_holder();
        const auto* pb = family[b].as_holder();
        double exact;
        if (pa && pb && pa->piecewise_linear() && pb->piecewise_linear()) {
          exact = pl_l2_sq_distance(*pa, *pb);
        } else {
          exact = eval_lambda_product(family[a], family[a]) - 2.0 * eval_lambda_product(family[a], family[b]) +
                  eval_lambda_product(family[b], family[b]);
        }
        gap = std::abs(sum / static_cast<double>(n) - exact);
      }
      best[a] = std::max(best[a], gap);
    }
  });
  return m == 0 ? 0.0 : *std::max_element(best.begin(), best.end());
}

OscillationResult oscillation_sup(const HClass& cls, std::size_t n, double net_u, Exec exec) {
  const auto net = build_h_net(cls, net_u);
  OscillationResult out;
  out.value = oscillation_sup(net, n, exec);
  out.net_u = net_u;
  out.net_size = net.size();
  out.n = n;
  return out;
}

// ---------------------------------------------------------------- bounds and series

TailBound gc_tail_bound(double epsilon, std::int64_t k, int S) {
  if (!(epsilon > 0.0)) throw Error(Errc::invalid_argument, "epsilon must be > 0");
  if (k < 1) throw Error(Errc::invalid_argument, "k must be >= 1");
  if (S < 1) throw Error(Errc::invalid_argument, "S must be >= 1");
  TailBound out;
  const auto kd = static_cast<double>(k);
  out.log_value = std::log(8.0) + S * std::log1p(kd) - epsilon * epsilon * kd / 32.0;
  out.value = std::exp(out.log_value);
  out.applicable = kd >= 8.0 / (epsilon * epsilon);
  out.vacuous = out.value > 1.0;
  return out;
}

namespace {

long double log_add(long double a, long double b) {
  if (a == -std::numeric_limits<long double>::infinity()) return b;
  if (b == -std::numeric_limits<long double>::infinity()) return a;
  const long double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

}  // namespace

double series_I_closed_form(double c, int D1, int D2) {
  if (!(c > 0.0)) throw Error(Errc::invalid_argument, "c must be > 0");
  if (D1 < 0 || D2 < 0) throw Error(Errc::invalid_argument, "D1, D2 must be >= 0");
  // All terms are positive: summing logs in extended precision is exact to
  // rounding and never overflows.
  const long double lc = std::log(static_cast<long double>(c));
  long double acc = -std::numeric_limits<long double>::infinity();
  for (int p = 0; p <= D2; ++p) {
    const int top = D1 + D2 - p;
    for (int l = 0; l <= top; ++l) {
      const long double t = std::lgamma(static_cast<long double>(D2 + 1)) + std::lgamma(static_cast<long double>(top + 1)) -
                            std::lgamma(static_cast<long double>(D2 - p + 1)) -
                            std::lgamma(static_cast<long double>(top - l + 1)) - (p + l + 2) * lc;
      acc = log_add(acc, t);
    }
  }
  const long double log_value = acc - c;
  if (log_value > std::log(std::numeric_limits<double>::max()))
    throw Error(Errc::overflow, "I(c,D1,D2) exceeds double range (log value " + std::to_string(static_cast<double>(log_value)) + ")");
  return static_cast<double>(std::exp(log_value));
}

SeriesReport series_S_diagnostic(int D, double c, std::size_t N) {
  if (D < 0) throw Error(Errc::invalid_argument, "D must be >= 0");
  if (!(c > 0.0)) throw Error(Errc::invalid_argument, "c must be > 0");
  if (N < 1 || N > 10000) throw Error(Errc::invalid_argument, "N must be in [1, 10000]");
  SeriesReport rep;
  rep.D = D;
  rep.c = c;
  rep.N = N;
  std::vector<long double> lf(N + 1, 0.0L);
  for (std::size_t m = 1; m <= N; ++m) lf[m] = lf[m - 1] + std::log(static_cast<long double>(m));
  const long double ninf = -std::numeric_limits<long double>::infinity();
  const double slope = std::numbers::ln2 - c;
  const bool above = c > std::numbers::ln2;
  long double log_s = ninf, log_up = ninf, log_term = ninf;
  for (std::size_t n = 1; n <= N; ++n) {
    long double mx = ninf;
    std::vector<long double> e(n);
    for (std::size_t k = 1; k <= n; ++k) {
      e[k - 1] = D * std::log(static_cast<long double>(k)) + lf[n] - lf[k] - lf[n - k];
      mx = std::max(mx, e[k - 1]);
    }
    long double s = 0.0L;
    for (auto v : e) s += std::exp(v - mx);
    log_term = mx + std::log(s) - c * static_cast<long double>(n);
    log_s = log_add(log_s, log_term);
    rep.log_partial_sums.push_back(static_cast<double>(log_s));
    if (above) {
      log_up = log_add(log_up, D * std::log(static_cast<long double>(n)) + slope * static_cast<long double>(n));
      rep.log_upper_partial.push_back(static_cast<double>(log_up));
    }
    rep.lower_bound_terms.push_back(std::exp(slope * static_cast<double>(n)));
  }
  rep.last_increment_ratio = static_cast<double>(std::exp(log_term - log_s));
  if (rep.lower_bound_terms.back() >= 1.0 - 1e-12)
    rep.verdict = SeriesVerdict::divergent;
  else if (above && rep.last_increment_ratio < 1e-12)
    rep.verdict = SeriesVerdict::convergent;
  return rep;
}

// ---------------------------------------------------------------- experiment

GCReport gc_experiment(const GCConfig& config, Exec exec) {
  const BVectorClass cls{config.j, config.parity};
  cls.validate();
  if (config.replicates == 0) throw Error(Errc::invalid_argument, "replicates must be >= 1");
  GCReport rep;
  rep.config = config;
  for (std::size_t n : config.n_schedule) {
    if (n == 0) throw Error(Errc::invalid_argument, "n schedule entries must be >= 1");
    GCRow row;
    row.n = n;
    row.deviations.assign(config.replicates, 0.0);
    parallel_for(config.replicates, exec, [&](std::size_t r) {
      const Sample s = draw_sample(config.model, n,
                                   derive_seed(config.seed, {std::string("gc"), static_cast<std::uint64_t>(n),
                                                             static_cast<std::uint64_t>(r)}));
      row.deviations[r] = sup_deviation_exact_BW(config.j, config.parity, s, Exec::serial).value;
    });
    std::vector<double> sorted = row.deviations;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : row.deviations) sum += v;
    row.mean = sum / static_cast<double>(sorted.size());
    row.median = quantile_sorted(sorted, 0.5);
    row.q95 = quantile_sorted(sorted, 0.95);
    row.max = sorted.back();
    row.correction = cls.sup_lambda_gap(static_cast<std::int64_t>(n)).to_double();
    row.correction_bound = cls.riemann_gap_bound(n);
    row.lambda_centered_max = row.max + row.correction;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace semproc
