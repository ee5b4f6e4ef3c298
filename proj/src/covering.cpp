#include "semproc/covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "semproc/error.hpp"
#include "semproc/quadrature.hpp"
#include "semproc/rng.hpp"

namespace semproc {

double DistanceMatrix::diameter() const {
  double m = 0.0;
  for (double v : d_) m = std::max(m, v);
  return m;
}

DistanceMatrix DistanceMatrix::restricted(const std::vector<std::size_t>& keep) const {
  DistanceMatrix out(keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = a + 1; b < keep.size(); ++b) out.set(a, b, (*this)(keep[a], keep[b]));
  return out;
}

// ---------------------------------------------------------------- metrics

namespace {

double sqrt_clamped(double v) { return std::sqrt(std::max(0.0, v)); }

std::vector<double> merged_breaks(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

double eval_pseudometric(Metric metric, const HFunc& a, const HFunc& b, const MetricContext& ctx) {
  switch (metric) {
    case Metric::d1_lambdan:
    case Metric::d2_lambdan: {
      if (ctx.n == 0) throw Error(Errc::invalid_argument, "lambda_n metric needs n");
      double sum = 0.0;
      for (std::size_t i = 1; i <= ctx.n; ++i) {
        const double diff = a.at_grid(i, ctx.n) - b.at_grid(i, ctx.n);
        sum += metric == Metric::d1_lambdan ? std::abs(diff) : diff * diff;
      }
      sum /= static_cast<double>(ctx.n);
      return metric == Metric::d1_lambdan ? sum : std::sqrt(sum);
    }
    case Metric::d1_lambda:
    case Metric::d2_lambda: {
      const auto* sa = a.as_indicator();
      const auto* sb = b.as_indicator();
      if (sa && sb) {
        const double m = sa->symmetric_difference(*sb).lebesgue().to_double();
        return metric == Metric::d1_lambda ? m : std::sqrt(m);
      }
      const auto* pa = a.as_holder();
      const auto* pb = b.as_holder();
      if (metric == Metric::d2_lambda && pa && pb && pa->piecewise_linear() && pb->piecewise_linear())
        return std::sqrt(pl_l2_sq_distance(*pa, *pb));
      const auto br = merged_breaks(a.breakpoints(), b.breakpoints());
      QuadOptions opt;
      opt.tol = ctx.tol;
      const double v = integrate(
                           [&](double s) {
                             const double diff = a(s) - b(s);
                             return metric == Metric::d1_lambda ? std::abs(diff) : diff * diff;
                           },
                           0.0, 1.0, opt, br)
                           .value;
      return metric == Metric::d1_lambda ? v : sqrt_clamped(v);
    }
    case Metric::sup: {
      const auto* pa = a.as_holder();
      const auto* pb = b.as_holder();
      if (pa && pb && pa->piecewise_linear() && pb->piecewise_linear()) {
        double m = 0.0;
        for (double x : merged_breaks(pa->xs(), pb->xs())) m = std::max(m, std::abs((*pa)(x) - (*pb)(x)));
        return m;
      }
      const auto* sa = a.as_indicator();
      const auto* sb = b.as_indicator();
      if (sa && sb) return sa->symmetric_difference(*sb).empty() ? 0.0 : 1.0;
      throw Error(Errc::invalid_argument, "sup metric is exact only for piecewise-linear or indicator pairs");
    }
    default: break;
  }
  throw Error(Errc::invalid_argument, std::string("metric ") + metric_name(metric) + " does not act on time factors");
}

double eval_pseudometric(Metric metric, const GFunc& a, const GFunc& b, const MetricContext& ctx) {
  switch (metric) {
    case Metric::d1_nun:
    case Metric::d2_nun: {
      if (!ctx.sample) throw Error(Errc::invalid_argument, "nu_n metric needs a sample");
      double sum = 0.0;
      for (double x : ctx.sample->values) {
        const double diff = a(x) - b(x);
        sum += metric == Metric::d1_nun ? std::abs(diff) : diff * diff;
      }
      sum /= static_cast<double>(ctx.sample->n);
      return metric == Metric::d1_nun ? sum : std::sqrt(sum);
    }
    case Metric::d2_nu: {
      if (a.closed_form() && b.closed_form())
        return sqrt_clamped(nu_product(a, a, ctx.model, ctx.tol) - 2.0 * nu_product(a, b, ctx.model, ctx.tol) +
                            nu_product(b, b, ctx.model, ctx.tol));
      const auto br = merged_breaks(a.breakpoints(), b.breakpoints());
      return sqrt_clamped(ctx.model.expect(
          [&](double x) {
            const double diff = a(x) - b(x);
            return diff * diff;
          },
          br, ctx.tol));
    }
    default: break;
  }
  throw Error(Errc::invalid_argument, std::string("metric ") + metric_name(metric) + " does not act on space factors");
}

double eval_pseudometric(Metric metric, const QFunction& a, const QFunction& b, const MetricContext& ctx) {
  switch (metric) {
    case Metric::d1_Pn: {
      if (!ctx.sample) throw Error(Errc::invalid_argument, "d1_Pn needs a sample");
      const std::size_t n = ctx.sample->n;
      double sum = 0.0;
      for (std::size_t i = 1; i <= n; ++i) {
        const double x = ctx.sample->values[i - 1];
        sum += std::abs(a.at_grid(i, n, x) - b.at_grid(i, n, x));
      }
      return sum / static_cast<double>(n);
    }
    case Metric::d2_product: {
      const std::size_t n = ctx.n ? ctx.n : (ctx.sample ? ctx.sample->n : 0);
      if (n == 0) throw Error(Errc::invalid_argument, "d2_product needs n");
      return sqrt_clamped(lambda_n_nu_product(a, a, n, ctx.model, ctx.tol) -
                          2.0 * lambda_n_nu_product(a, b, n, ctx.model, ctx.tol) +
                          lambda_n_nu_product(b, b, n, ctx.model, ctx.tol));
    }
    case Metric::composite_d: {
      if (a.kind() != QFunction::Kind::product || b.kind() != QFunction::Kind::product)
        throw Error(Errc::invalid_argument, "composite metric needs product functions");
      return eval_pseudometric(Metric::d2_lambda, a.h(), b.h(), ctx) +
             eval_pseudometric(Metric::d2_nu, a.g(), b.g(), ctx);
    }
    default: break;
  }
  throw Error(Errc::invalid_argument, std::string("metric ") + metric_name(metric) + " does not act on q functions");
}

// ---------------------------------------------------------------- nets

std::vector<std::size_t> greedy_net(const DistanceMatrix& d, double u) {
  if (!(u > 0.0)) throw Error(Errc::invalid_argument, "net resolution u must be > 0");
  const std::size_t n = d.size();
  std::vector<std::size_t> centers;
  if (n == 0) return centers;
  std::vector<double> gap(n, std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  for (;;) {
    centers.push_back(next);
    double far = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      gap[i] = std::min(gap[i], d(i, next));
      if (gap[i] > far) {
        far = gap[i];
        arg = i;
      }
    }
    if (far < u) break;
    next = arg;
  }
  return centers;
}

namespace {

// Smallest k such that k of the candidate masks cover `full`.
std::size_t min_cover(const std::vector<std::uint32_t>& cover, std::uint32_t full) {
  const std::size_t c = cover.size();
  if (full == 0) return 0;
  for (std::size_t k = 1; k <= c; ++k) {
    // Gosper's hack over k-subsets of c candidates.
    std::uint32_t s = (k == 32) ? ~0u : ((1u << k) - 1u);
    const std::uint32_t limit = 1u << c;
    while (s < limit) {
      std::uint32_t acc = 0;
      for (std::uint32_t t = s; t; t &= t - 1) acc |= cover[static_cast<std::size_t>(std::countr_zero(t))];
      if ((acc & full) == full) return k;
      const std::uint32_t lo = s & (~s + 1u);
      const std::uint32_t r = s + lo;
      s = (((r ^ s) >> 2) / lo) | r;
    }
  }
  throw Error(Errc::invalid_argument, "targets cannot be covered");
}

}  // namespace

std::size_t exact_covering_number(const DistanceMatrix& d, double u, const std::vector<std::size_t>& targets) {
  const std::size_t n = d.size();
  if (n > 20) throw Error(Errc::instance_too_large, "exhaustive covering search supports at most 20 members");
  if (!(u > 0.0)) throw Error(Errc::invalid_argument, "net resolution u must be > 0");
  std::uint32_t full = 0;
  for (std::size_t t = 0; t < targets.size(); ++t) full |= 1u << t;
  std::vector<std::uint32_t> cover(n, 0);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t t = 0; t < targets.size(); ++t)
      if (d(c, targets[t]) < u) cover[c] |= 1u << t;
  return min_cover(cover, full);
}

std::size_t exact_covering_number(const DistanceMatrix& d, double u) {
  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), 0);
  return exact_covering_number(d, u, all);
}

CoveringNumber covering_number(const DistanceMatrix& d, double u) {
  if (d.size() == 0) throw Error(Errc::invalid_argument, "covering number of an empty family");
  CoveringNumber out;
  out.greedy = greedy_net(d, u).size();
  if (d.size() <= 12) {
    out.exact = exact_covering_number(d, u);
    out.greedy_is_minimal = *out.exact == out.greedy;
  }
  return out;
}

// ---------------------------------------------------------------- lemma suite

std::size_t LemmaReport::total_violations() const {
  std::size_t v = 0;
  for (const auto& l : lemmas) v += l.violations;
  return v;
}

namespace {

DistanceMatrix random_space(Rng& rng, std::size_t n) {
  const auto type = rng.uniform_int(0, 2);
  DistanceMatrix d(n);
  if (type < 2) {
    // Integer lattice points (ties and duplicates give pseudo-metrics).
    const auto dim = static_cast<std::size_t>(rng.uniform_int(1, 3));
    const auto norm = rng.uniform_int(0, 2);
    std::vector<std::vector<double>> p(n, std::vector<double>(dim));
    for (auto& v : p)
      for (auto& c : v) c = type == 0 ? static_cast<double>(rng.uniform_int(0, 5)) : rng.uniform(0.0, 5.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double diff = std::abs(p[i][k] - p[j][k]);
          if (norm == 0) acc += diff;
          else if (norm == 1) acc += diff * diff;
          else acc = std::max(acc, diff);
        }
        d.set(i, j, norm == 1 ? std::sqrt(acc) : acc);
      }
  } else {
    // Shortest-path metric of a random complete weighted graph.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, static_cast<double>(rng.uniform_int(1, 10)));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, std::min(d(i, j), d(i, k) + d(k, j)));
  }
  return d;
}

double random_radius(Rng& rng, const DistanceMatrix& d) {
  const double diam = d.diameter();
  if (d.size() > 1 && rng.uniform01() < 0.4) {
    // Exactly an attained distance: exercises the strict inequality.
    const auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(d.size()) - 1));
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(d.size()) - 1));
    if (d(i, j) > 0.0) return d(i, j);
  }
  return rng.uniform(1e-3, 1.2 * std::max(diam, 1e-3));
}

std::string serialize(const DistanceMatrix& d, double u) {
  std::ostringstream os;
  os.precision(17);
  os << "u=" << u << " d=[";
  for (std::size_t i = 0; i < d.size(); ++i) {
    os << (i ? ";" : "");
    for (std::size_t j = 0; j < d.size(); ++j) os << (j ? "," : "") << d(i, j);
  }
  os << "]";
  return os.str();
}

struct TrialOutcome {
  // margin = rhs - lhs (negative means violation) per checked relation
  double subset_ambient, subset_literal, subset_doubled;
  double domination, product, isometry;
  double greedy_upper, greedy_packing, greedy_ratio;
  std::string subset_case, literal_case, domination_case, product_case, isometry_case, packing_case;
};

TrialOutcome run_trial(std::uint64_t seed) {
  Rng rng(seed);
  TrialOutcome out{};
  const auto n = static_cast<std::size_t>(rng.uniform_int(2, 10));
  const DistanceMatrix d = random_space(rng, n);
  const double u = random_radius(rng, d);
  const std::size_t N = exact_covering_number(d, u);

  // Subset monotonicity.
  std::vector<std::size_t> sub;
  for (std::size_t i = 0; i < n; ++i)
    if (rng.uniform01() < 0.6) sub.push_back(i);
  if (sub.empty()) sub.push_back(0);
  const std::size_t ambient = exact_covering_number(d, u, sub);
  const DistanceMatrix ds = d.restricted(sub);
  const std::size_t literal = exact_covering_number(ds, u);
  const std::size_t doubled = exact_covering_number(ds, 2.0 * u);
  out.subset_ambient = static_cast<double>(N) - static_cast<double>(ambient);
  out.subset_literal = static_cast<double>(N) - static_cast<double>(literal);
  out.subset_doubled = static_cast<double>(N) - static_cast<double>(doubled);
  out.subset_case = serialize(d, u);
  out.literal_case = serialize(d, u) + " subset=" + std::to_string(sub.size());

  // Metric domination d ≤ d'.
  DistanceMatrix dp(n);
  const auto kind = rng.uniform_int(0, 2);
  const double c = rng.uniform(0.0, 2.0);
  const DistanceMatrix other = random_space(rng, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double base = d(i, j);
      dp.set(i, j, kind == 0 ? base + c : (kind == 1 ? (1.0 + c) * base : std::max(base, other(i, j))));
    }
  out.domination = static_cast<double>(exact_covering_number(dp, u)) - static_cast<double>(N);
  out.domination_case = serialize(d, u) + " dominating=" + serialize(dp, u);

  // Product bound with d1 + d2.
  const auto n1 = static_cast<std::size_t>(rng.uniform_int(1, 4));
  const auto n2 = static_cast<std::size_t>(rng.uniform_int(1, 3));
  const DistanceMatrix d1 = random_space(rng, n1), d2 = random_space(rng, n2);
  const double up = rng.uniform(1e-3, 1.2 * std::max(1e-3, d1.diameter() + d2.diameter()));
  const double t = rng.uniform01() < 0.3 ? 0.5 : rng.uniform(0.01, 0.99);
  DistanceMatrix dprod(n1 * n2);
  for (std::size_t a = 0; a < n1 * n2; ++a)
    for (std::size_t b = a + 1; b < n1 * n2; ++b) dprod.set(a, b, d1(a / n2, b / n2) + d2(a % n2, b % n2));
  const double lhs = static_cast<double>(exact_covering_number(dprod, up));
  const double rhs = static_cast<double>(exact_covering_number(d1, t * up) * exact_covering_number(d2, (1.0 - t) * up));
  out.product = rhs - lhs;
  out.product_case = serialize(d1, t * up) + " x " + serialize(d2, (1.0 - t) * up);

  // Isometric relabeling.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i)
    std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  DistanceMatrix dpi(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dpi.set(perm[i], perm[j], d(i, j));
  out.isometry = -std::abs(static_cast<double>(exact_covering_number(dpi, u)) - static_cast<double>(N));
  out.isometry_case = serialize(d, u);

  // Greedy relations: exact ≤ greedy(u) ≤ exact(u/2).
  const std::size_t g = greedy_net(d, u).size();
  out.greedy_upper = static_cast<double>(g) - static_cast<double>(N);
  out.greedy_packing = static_cast<double>(exact_covering_number(d, u / 2.0)) - static_cast<double>(g);
  out.greedy_ratio = static_cast<double>(g) / static_cast<double>(N);
  out.packing_case = serialize(d, u);
  return out;
}

void tally(LemmaResult& r, double margin, const std::string& instance) {
  ++r.trials;
  if (margin < 0) ++r.violations;
  if (r.trials == 1 || margin < r.worst_margin) {
    r.worst_margin = margin;
    r.worst_case = instance;
  }
}

}  // namespace

LemmaReport check_covering_lemmas(std::size_t trials, std::uint64_t seed, bool throw_on_violation, Exec exec) {
  if (trials == 0) throw Error(Errc::invalid_argument, "trials must be >= 1");
  std::vector<TrialOutcome> outcomes(trials);
  parallel_for(trials, exec, [&](std::size_t i) {
    outcomes[i] = run_trial(derive_seed(seed, {std::string("covering-lemma"), static_cast<std::uint64_t>(i)}));
  });
  LemmaReport rep;
  rep.lemmas = {{"subset-monotonicity", 0, 0, "", 0},
                {"metric-domination", 0, 0, "", 0},
                {"product-bound", 0, 0, "", 0},
                {"isometry-invariance", 0, 0, "", 0}};
  rep.diagnostics = {{"subset-literal-internal-centers", 0, 0, "", 0},
                     {"subset-internal-at-double-radius", 0, 0, "", 0},
                     {"greedy-at-least-exact", 0, 0, "", 0},
                     {"greedy-at-most-exact-half-radius", 0, 0, "", 0},
                     {"greedy-within-factor-2", 0, 0, "", 0}};
  for (const auto& o : outcomes) {
    tally(rep.lemmas[0], o.subset_ambient, o.subset_case);
    tally(rep.lemmas[1], o.domination, o.domination_case);
    tally(rep.lemmas[2], o.product, o.product_case);
    tally(rep.lemmas[3], o.isometry, o.isometry_case);
    tally(rep.diagnostics[0], o.subset_literal, o.literal_case);
    tally(rep.diagnostics[1], o.subset_doubled, o.literal_case);
    tally(rep.diagnostics[2], o.greedy_upper, o.packing_case);
    tally(rep.diagnostics[3], o.greedy_packing, o.packing_case);
    tally(rep.diagnostics[4], 2.0 - o.greedy_ratio, o.packing_case);
  }
  if (throw_on_violation && rep.total_violations() > 0) {
    for (const auto& l : rep.lemmas)
      if (l.violations > 0) throw Error(Errc::lemma_violation, l.lemma + " violated: " + l.worst_case);
  }
  return rep;
}

// ---------------------------------------------------------------- shatter

std::string ShatterClass::name() const { return kind == Kind::half_lines ? "halflines" : bvector.name(); }

std::optional<int> ShatterClass::claimed_dimension() const {
  if (kind == Kind::half_lines) return 1;
  return bvector.vc_dimension();
}

ShatterReport shatter_coefficient(const ShatterClass& cls, const std::vector<double>& points, bool list) {
  const std::size_t k = points.size();
  if (k > 20) throw Error(Errc::instance_too_large, "shatter enumeration supports at most 20 points");
  ShatterReport rep;
  rep.points = points;
  rep.class_id = cls.name();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  // prefix[g]: mask of the g smallest points (input-order bits).
  std::vector<std::uint32_t> prefix(k + 1, 0);
  for (std::size_t g = 0; g < k; ++g) prefix[g + 1] = prefix[g] | (1u << order[g]);
  // Gap g (0..k) holds breakpoints t with p_(g) ≤ t < p_(g+1); empty when the
  // neighbouring sorted points coincide.
  std::vector<std::size_t> gaps;
  for (std::size_t g = 0; g <= k; ++g)
    if (g == 0 || g == k || points[order[g - 1]] < points[order[g]]) gaps.push_back(g);

  std::unordered_set<std::uint32_t> seen;
  if (cls.kind == ShatterClass::Kind::half_lines) {
    for (auto g : gaps) seen.insert(prefix[g]);
  } else {
    const BVectorClass& b = cls.bvector;
    b.validate();
    for (double p : points)
      if (!(p > 0.0 && p <= 1.0)) throw Error(Errc::invalid_argument, "set classes on (0,1] need points in (0,1]");
    const int K = b.breakpoint_count();
    std::vector<std::size_t> pos(static_cast<std::size_t>(K), 0);
    auto recurse = [&](auto&& self, int level, std::size_t from) -> void {
      if (level == K) {
        std::uint32_t mask = 0;
        std::size_t first = 0;
        if (b.parity == Parity::odd) {
          mask |= prefix[gaps[pos[0]]];
          first = 1;
        }
        for (std::size_t p = first; p + 1 < pos.size(); p += 2)
          mask |= prefix[gaps[pos[p + 1]]] & ~prefix[gaps[pos[p]]];
        seen.insert(mask);
        return;
      }
      for (std::size_t i = from; i < gaps.size(); ++i) {
        pos[static_cast<std::size_t>(level)] = i;
        self(self, level + 1, i);
      }
    };
    recurse(recurse, 0, 0);
  }
  rep.coefficient = seen.size();
  if (list) {
    rep.dichotomies.assign(seen.begin(), seen.end());
    std::sort(rep.dichotomies.begin(), rep.dichotomies.end());
  }
  return rep;
}

// ---------------------------------------------------------------- random covering numbers

CoveringBoundednessReport random_covering_boundedness(const ProductClass& cls, double tau,
                                                      const std::vector<std::size_t>& n_list,
                                                      const std::vector<std::uint64_t>& seeds,
                                                      std::size_t h_net_points, std::size_t g_net_points, Exec exec) {
  if (cls.tag != Taxonomy::ub_mvc) throw Error(Errc::invalid_argument, "random covering check needs a pi(UB,M-VC) class");
  if (!(tau > 0.0)) throw Error(Errc::invalid_argument, "tau must be > 0");
  if (h_net_points < 2 || g_net_points < 2) throw Error(Errc::invalid_argument, "net point counts must be >= 2");
  CoveringBoundednessReport rep;
  rep.tau = tau;

  // Fixed family: H members on a breakpoint grid (or a Hölder net), G members
  // at quantile levels k/(g_net_points-1).
  std::vector<HFunc> H;
  if (const auto* b = std::get_if<BVectorClass>(&cls.h_class)) {
    for (auto& set : b->grid_members(static_cast<std::int64_t>(h_net_points - 1)))
      H.push_back(HFunc::indicator(std::move(set)));
  } else {
    H = build_h_net(cls.h_class, 1.0);
  }
  const NuModel model = NuModel::uniform01();
  std::vector<GFunc> G;
  for (std::size_t k = 0; k < g_net_points; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(g_net_points - 1);
    G.push_back(cls.g_class.kind == GKind::polynomials ? GFunc::constant(p) : cls.g_class.member(model.quantile(p)));
  }
  rep.family_size = H.size() * G.size();

  for (std::size_t n : n_list)
    for (std::uint64_t s : seeds) {
      const Sample sample = draw_sample(model, n, derive_seed(s, {std::string("covering-sample"), n}));
      const std::size_t nh = H.size(), ng = G.size();
      std::vector<std::vector<double>> hv(nh, std::vector<double>(n)), gv(ng, std::vector<double>(n));
      for (std::size_t a = 0; a < nh; ++a)
        for (std::size_t i = 1; i <= n; ++i) hv[a][i - 1] = H[a].at_grid(i, n);
      for (std::size_t b = 0; b < ng; ++b)
        for (std::size_t i = 0; i < n; ++i) gv[b][i] = G[b](sample.values[i]);
      const double inv = 1.0 / static_cast<double>(n);
      const auto dh = DistanceMatrix::build(
          nh,
          [&](std::size_t a, std::size_t b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += std::abs(hv[a][i] - hv[b][i]);
            return acc * inv;
          },
          exec);
      const auto dg = DistanceMatrix::build(
          ng,
          [&](std::size_t a, std::size_t b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += std::abs(gv[a][i] - gv[b][i]);
            return acc * inv;
          },
          exec);
      bool binary = true;
      for (const auto* fam : {&hv, &gv})
        for (const auto& v : *fam)
          for (double x : v) binary = binary && (x == 0.0 || x == 1.0);
      CoveringBoundednessRow row{n, s, {}};
      if (binary) {
        // Indicator products: d1_Pn is a normalized Hamming distance.
        const std::size_t words = (n + 63) / 64;
        std::vector<std::vector<std::uint64_t>> bits(nh * ng, std::vector<std::uint64_t>(words, 0));
        for (std::size_t a = 0; a < nh; ++a)
          for (std::size_t b = 0; b < ng; ++b)
            for (std::size_t i = 0; i < n; ++i)
              if (hv[a][i] != 0.0 && gv[b][i] != 0.0) bits[a * ng + b][i / 64] |= std::uint64_t{1} << (i % 64);
        const auto target = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
          const auto& x = bits[a * ng + b];
          const auto& y = bits[c * ng + d];
          std::size_t cnt = 0;
          for (std::size_t w = 0; w < words; ++w) cnt += static_cast<std::size_t>(std::popcount(x[w] ^ y[w]));
          return static_cast<double>(cnt) * inv;
        };
        row.check = check_product_cover(dh, dg, tau, target, exec);
      } else {
        const auto target = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
          double acc = 0.0;
          for (std::size_t i = 0; i < n; ++i) acc += std::abs(hv[a][i] * gv[b][i] - hv[c][i] * gv[d][i]);
          return acc * inv;
        };
        row.check = check_product_cover(dh, dg, tau, target, exec);
      }
      rep.max_observed = std::max(rep.max_observed, row.check.greedy_F);
      rep.max_bound = std::max(rep.max_bound, row.check.packing_bound);
      if (!row.check.product_net_covers || row.check.greedy_F > row.check.packing_bound) rep.all_within_bound = false;
      rep.rows.push_back(row);
    }
  return rep;
}

}  // namespace semproc
