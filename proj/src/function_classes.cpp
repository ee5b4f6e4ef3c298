#include "semproc/function_classes.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "semproc/error.hpp"

namespace semproc {

namespace {

constexpr std::pair<Metric, const char*> kMetricNames[] = {
    {Metric::sup, "sup"},               {Metric::d1_Pn, "d1_Pn"},         {Metric::d1_nun, "d1_nun"},
    {Metric::d1_lambdan, "d1_lambdan"}, {Metric::d1_lambda, "d1_lambda"}, {Metric::d2_lambdan, "d2_lambdan"},
    {Metric::d2_nun, "d2_nun"},         {Metric::d2_lambda, "d2_lambda"}, {Metric::d2_nu, "d2_nu"},
    {Metric::d2_product, "d2_product"}, {Metric::composite_d, "composite_d"},
};

}  // namespace

const char* metric_name(Metric m) noexcept {
  for (const auto& [k, v] : kMetricNames)
    if (k == m) return v;
  return "?";
}

Metric parse_metric(const std::string& name) {
  for (const auto& [k, v] : kMetricNames)
    if (name == v) return k;
  throw Error(Errc::invalid_argument, "unknown metric '" + name + "'");
}

// ---------------------------------------------------------------- Hölder

void HolderClass::validate() const {
  if (!(T > 0.0) || !(C > 0.0) || !(beta > 0.0 && beta <= 1.0))
    throw Error(Errc::invalid_argument, "holder class needs T > 0, C > 0, beta in (0,1]");
}

double HolderClass::riemann_gap_bound(std::size_t n) const {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
  return C / std::pow(static_cast<double>(n), beta);
}

double HolderClass::oscillation_sup_bound(std::size_t n) const {
  if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
  return 8.0 * C * (C + T) / std::pow(static_cast<double>(n), beta);
}

HolderFunction HolderClass::random_member(Rng& rng) const {
  validate();
  // w·(PL with slopes in [-C,C]) + (1-w)·(c|x-x0|^β with |c| ≤ C) is
  // Hölder(C, β); an offset then places h(0) uniformly in [-T, T].
  const double u = rng.uniform01();
  const double w = u < 0.2 ? 1.0 : (u < 0.4 ? 0.0 : rng.uniform01());
  const int knots = static_cast<int>(rng.uniform_int(1, 8));
  std::vector<double> xs{0.0};
  for (int k = 0; k < knots; ++k) xs.push_back(rng.uniform01());
  xs.push_back(1.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  const bool saturate = rng.uniform01() < 0.3;
  std::vector<double> ys{0.0};
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const double slope = saturate ? (rng.uniform01() < 0.5 ? -C : C) : rng.uniform(-C, C);
    ys.push_back(ys.back() + w * slope * (xs[k] - xs[k - 1]));
  }
  const double amp = (1.0 - w) * (saturate ? (rng.uniform01() < 0.5 ? -C : C) : rng.uniform(-C, C));
  const double center = rng.uniform01();
  const double at0 = amp * std::pow(center, beta);
  const double target = rng.uniform(-T, T);
  for (double& y : ys) y += target - at0;
  return HolderFunction(std::move(xs), std::move(ys), amp, center, beta);
}

double HolderClass::audit(const HolderFunction& h, Rng& rng, int pairs) const {
  double worst = std::abs(h(0.0)) - T;
  for (int k = 0; k < pairs; ++k) {
    const double x = rng.uniform01();
    double y;
    const double r = rng.uniform01();
    if (r < 0.3) {
      y = std::clamp(x + rng.uniform(-1e-3, 1e-3), 0.0, 1.0);
    } else if (r < 0.5 && !h.xs().empty()) {
      y = h.xs()[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(h.xs().size()) - 1))];
    } else {
      y = rng.uniform01();
    }
    const double lhs = std::abs(h(x) - h(y));
    const double rhs = C * std::pow(std::abs(x - y), beta);
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

HolderNetPlan plan_holder_net(const HolderClass& cls, double u) {
  cls.validate();
  if (!(u > 0.0)) throw Error(Errc::invalid_argument, "net resolution u must be > 0");
  HolderNetPlan best;
  if (u > cls.C + cls.T) {
    best.zero_only = true;
    best.grid_points = 1;
    best.guaranteed_error = cls.C + cls.T;
    best.estimated_size = 1;
    return best;
  }
  const double target = 0.999 * u;
  // Smallest grid with knot spacing a = C/m^β below the target and a ≤ 2T.
  const double need = std::max(cls.C / target, cls.C / (2.0 * cls.T));
  std::size_t m0 = static_cast<std::size_t>(std::ceil(std::pow(need, 1.0 / cls.beta)));
  m0 = std::max<std::size_t>(m0, 1);
  while (cls.C * std::pow(1.0 / static_cast<double>(m0), cls.beta) >= target) ++m0;
  best.estimated_size = std::numeric_limits<double>::infinity();
  for (std::size_t m = m0; m < m0 + 24; ++m) {
    const double a = cls.C * std::pow(1.0 / static_cast<double>(m), cls.beta);
    if (a > 2.0 * cls.T || a >= target) continue;
    const double one_minus_rho = std::min(1.0, (target - a) / (cls.C + cls.T - 0.5 * a));
    const double v = one_minus_rho * a;
    const double levels0 = 2.0 * std::floor(cls.T / v + 1e-9) + 1.0;
    const double per_step = 2.0 * std::floor(a / v + 1e-9) + 1.0;
    const double log_size = std::log(levels0) + static_cast<double>(m) * std::log(per_step);
    const double size = std::exp(std::min(log_size, 700.0));
    if (size < best.estimated_size) {
      best.grid_points = m;
      best.step = v;
      best.shrink = 1.0 - one_minus_rho;
      best.guaranteed_error = a + one_minus_rho * (cls.C + cls.T - 0.5 * a);
      best.estimated_size = size;
    }
  }
  return best;
}

std::vector<HolderFunction> build_holder_net(const HolderClass& cls, double u, std::size_t cap) {
  const HolderNetPlan plan = plan_holder_net(cls, u);
  if (plan.zero_only) return {HolderFunction({0.0, 1.0}, {0.0, 0.0})};
  const std::size_t m = plan.grid_points;
  const double v = plan.step;
  const double delta = 1.0 / static_cast<double>(m);
  // Lattice indices; max index difference allowed at knot distance d.
  std::vector<long> maxdiff(m + 1, 0);
  for (std::size_t d = 1; d <= m; ++d)
    maxdiff[d] = static_cast<long>(std::floor(cls.C * std::pow(static_cast<double>(d) * delta, cls.beta) / v + 1e-9));
  const long k0 = static_cast<long>(std::floor(cls.T / v + 1e-9));

  std::vector<double> xs(m + 1);
  for (std::size_t k = 0; k <= m; ++k) xs[k] = static_cast<double>(k) / static_cast<double>(m);
  xs.back() = 1.0;

  std::vector<HolderFunction> out;
  std::vector<long> idx(m + 1, 0);
  std::vector<long> lo(m + 1), hi(m + 1);
  // Depth-first enumeration; the feasible window for knot k is the
  // intersection of the windows implied by all earlier knots.
  auto recurse = [&](auto&& self, std::size_t k) -> void {
    if (k > m) {
      if (out.size() >= cap)
        throw NetTooLarge("holder net exceeds cap of " + std::to_string(cap) + " members", plan.estimated_size);
      std::vector<double> ys(m + 1);
      for (std::size_t i = 0; i <= m; ++i) ys[i] = static_cast<double>(idx[i]) * v;
      out.emplace_back(xs, std::move(ys));
      return;
    }
    long l = std::numeric_limits<long>::min(), h = std::numeric_limits<long>::max();
    for (std::size_t p = 0; p < k; ++p) {
      l = std::max(l, idx[p] - maxdiff[k - p]);
      h = std::min(h, idx[p] + maxdiff[k - p]);
    }
    for (long val = l; val <= h; ++val) {
      idx[k] = val;
      self(self, k + 1);
    }
  };
  for (long start = -k0; start <= k0; ++start) {
    idx[0] = start;
    recurse(recurse, 1);
  }
  return out;
}

// ---------------------------------------------------------------- B(2j+1), B(2j)

void BVectorClass::validate() const {
  if (j < 0) throw Error(Errc::invalid_argument, "bvector class needs j >= 0");
  if (parity == Parity::even && j == 0) throw Error(Errc::invalid_argument, "B(0) is empty; use j >= 1 for even parity");
}

std::string BVectorClass::name() const { return "B(" + std::to_string(breakpoint_count()) + ")"; }

IntervalUnion BVectorClass::member(const std::vector<Rational>& t) const {
  validate();
  if (static_cast<int>(t.size()) != breakpoint_count())
    throw Error(Errc::invalid_argument, name() + " member needs " + std::to_string(breakpoint_count()) + " breakpoints");
  for (const auto& x : t)
    if (x < Rational(0) || x > Rational(1)) throw Error(Errc::invalid_argument, "breakpoints must lie in [0,1]");
  std::vector<IntervalUnion::Interval> pieces;
  std::size_t first = 0;
  if (parity == Parity::odd) {
    pieces.emplace_back(Rational(0), t[0]);
    first = 1;
  }
  for (std::size_t k = first; k + 1 < t.size(); k += 2) {
    // Interleaving: gap boundaries may touch, interval ends must be ordered.
    if (k > 0 && t[k] < t[k - 1]) throw Error(Errc::invalid_argument, "breakpoints must be nondecreasing");
    if (!(t[k] <= t[k + 1])) throw Error(Errc::invalid_argument, "breakpoints must be nondecreasing");
    pieces.emplace_back(t[k], t[k + 1]);
  }
  return IntervalUnion(std::move(pieces));
}

std::vector<Rational> BVectorClass::random_breakpoints(Rng& rng) const {
  validate();
  const int K = breakpoint_count();
  // Mix of generic dyadic points and points snapped to grids i/n so that
  // boundary cases of the floor arithmetic are exercised.
  static constexpr std::int64_t grids[] = {10, 100, 1000, 7, 60};
  for (;;) {
    std::vector<Rational> t;
    for (int k = 0; k < K; ++k) {
      if (rng.uniform01() < 0.3) {
        const std::int64_t g = grids[rng.uniform_int(0, 4)];
        t.emplace_back(rng.uniform_int(0, g), g);
      } else {
        t.push_back(dyadic(rng.uniform01()));
      }
    }
    std::sort(t.begin(), t.end());
    bool ok = true;
    const std::size_t first = parity == Parity::odd ? 1 : 0;
    for (std::size_t k = first; k + 1 < t.size(); k += 2)
      if (!(t[k] < t[k + 1])) ok = false;
    if (ok) return t;
  }
}

double BVectorClass::riemann_gap_bound(std::size_t n) const {
  validate();
  if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
  const double dn = static_cast<double>(n);
  return parity == Parity::odd ? 2.0 * (2 * j + 1) / dn : 4.0 * j / dn;
}

Rational BVectorClass::sup_lambda_gap(std::int64_t n) const {
  validate();
  if (n <= 0) throw Error(Errc::invalid_argument, "n must be positive");
  const std::int64_t pieces = parity == Parity::odd ? j + 1 : j;
  return Rational(std::min<std::int64_t>(pieces, n), n);
}

std::vector<IntervalUnion> BVectorClass::build_net(double u, Metric metric, std::size_t cap) const {
  validate();
  if (!(u > 0.0)) throw Error(Errc::invalid_argument, "net resolution u must be > 0");
  double r;
  if (metric == Metric::d2_lambda) {
    r = u * u;
  } else if (metric == Metric::d1_lambda) {
    r = u;
  } else {
    throw Error(Errc::invalid_argument, std::string("bvector nets support d1_lambda and d2_lambda, not ") + metric_name(metric));
  }
  // Rounding each breakpoint to the nearest mesh point moves the set by at
  // most K·mesh/2 = r/2 in Lebesgue measure.
  const std::int64_t cells = static_cast<std::int64_t>(std::ceil(static_cast<double>(breakpoint_count()) / r));
  return grid_members(cells, cap);
}

std::vector<IntervalUnion> BVectorClass::grid_members(std::int64_t cells, std::size_t cap) const {
  validate();
  if (cells < 1) throw Error(Errc::invalid_argument, "grid needs at least one cell");
  const int K = breakpoint_count();
  double est = 1.0;
  for (int k = 0; k < K; ++k) est = est * static_cast<double>(cells + 1 + k) / static_cast<double>(k + 1);
  if (est > 4.0 * static_cast<double>(cap))
    throw NetTooLarge(name() + " net exceeds cap of " + std::to_string(cap) + " members", est);
  std::set<std::vector<IntervalUnion::Interval>> seen;
  std::vector<IntervalUnion> out;
  std::vector<std::int64_t> idx(static_cast<std::size_t>(K), 0);
  auto recurse = [&](auto&& self, int k, std::int64_t from) -> void {
    if (k == K) {
      std::vector<IntervalUnion::Interval> pieces;
      std::vector<Rational> t;
      for (auto i : idx) t.emplace_back(i, cells);
      std::size_t first = 0;
      if (parity == Parity::odd) {
        pieces.emplace_back(Rational(0), t[0]);
        first = 1;
      }
      for (std::size_t p = first; p + 1 < t.size(); p += 2) pieces.emplace_back(t[p], t[p + 1]);
      IntervalUnion set(std::move(pieces));
      if (seen.insert(set.pieces()).second) {
        if (out.size() >= cap)
          throw NetTooLarge(name() + " net exceeds cap of " + std::to_string(cap) + " members", est);
        out.push_back(std::move(set));
      }
      return;
    }
    for (std::int64_t i = from; i <= cells; ++i) {
      idx[static_cast<std::size_t>(k)] = i;
      self(self, k + 1, i);
    }
  };
  recurse(recurse, 0, 0);
  return out;
}

IntervalUnion b_infinity_witness(std::int64_t n) {
  if (n < 1) throw Error(Errc::invalid_argument, "witness needs n >= 1");
  if (n > 56) throw Error(Errc::overflow, "witness endpoints exceed 64-bit rationals for n > 56");
  const Rational eps(1, n * (std::int64_t{1} << n));
  std::vector<IntervalUnion::Interval> pieces;
  for (std::int64_t m = 0; m < n; ++m) pieces.emplace_back(Rational(m, n), Rational(m + 1, n) - eps);
  return IntervalUnion(std::move(pieces));
}

double riemann_gap_bound(const SetOrFunctionClass& cls, std::size_t n) {
  return std::visit(
      [n](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, BInfinityClass>) {
          throw Error(Errc::no_bound, "the class of all finite unions of intervals has no uniform Riemann bound");
        } else {
          return c.riemann_gap_bound(n);
        }
      },
      cls);
}

Rational observed_riemann_gap(const IntervalUnion& B, std::int64_t n) { return abs(B.lambda_n(n) - B.lebesgue()); }

double observed_riemann_gap(const HolderFunction& h, std::size_t n) {
  return std::abs(eval_lambda_n(HFunc::holder(h), n) - h.integral());
}

// ---------------------------------------------------------------- G classes

std::string GClass::name() const {
  switch (kind) {
    case GKind::half_lines: return "halflines";
    case GKind::initial_intervals: return "initial-intervals";
    case GKind::polynomials: return "polynomials(deg=" + std::to_string(degree) + ")";
  }
  return "?";
}

GFunc GClass::envelope() const {
  if (kind != GKind::polynomials) return GFunc::constant(1.0);
  if (degree == 0) return GFunc::constant(coef_bound);
  const int d = degree;
  const double b = coef_bound;
  return GFunc::custom(
      [d, b](double x) {
        double v = 0.0, p = 1.0;
        for (int k = 0; k <= d; ++k, p *= std::abs(x)) v += b * p;
        return v;
      },
      {}, "polynomial-envelope");
}

GFunc GClass::member(double w) const {
  switch (kind) {
    case GKind::half_lines: return GFunc::half_line(w);
    case GKind::initial_intervals: return GFunc::initial_interval(w);
    case GKind::polynomials: break;
  }
  throw Error(Errc::invalid_argument, "polynomial members are given by coefficients");
}

GFunc GClass::random_member(Rng& rng, const NuModel& model) const {
  switch (kind) {
    case GKind::half_lines: return GFunc::half_line(model.quantile(rng.uniform(1e-12, 1.0 - 1e-12)));
    case GKind::initial_intervals: {
      const double f0 = model.cdf(0.0);
      return GFunc::initial_interval(std::max(0.0, model.quantile(f0 + (1.0 - f0) * rng.uniform(1e-12, 1.0 - 1e-12))));
    }
    case GKind::polynomials: {
      std::vector<double> c(static_cast<std::size_t>(degree) + 1);
      for (double& a : c) a = rng.uniform(-coef_bound, coef_bound);
      return GFunc::polynomial(std::move(c));
    }
  }
  return GFunc::constant(0.0);
}

std::vector<GFunc> GClass::build_net(double u, const NuModel& model, Metric metric, std::size_t cap) const {
  if (!(u > 0.0)) throw Error(Errc::invalid_argument, "net resolution u must be > 0");
  std::vector<GFunc> out;
  if (kind == GKind::polynomials) {
    if (model.kind() != NuModel::Kind::uniform01)
      throw Error(Errc::unsupported_model, "polynomial nets need a compact support (uniform01)");
    if (metric != Metric::sup && metric != Metric::d2_nu)
      throw Error(Errc::invalid_argument, "polynomial nets support sup and d2_nu");
    // Coefficient lattice: sup over [0,1] of the rounding error ≤ (d+1)·step/2.
    const double step = 2.0 * u / (degree + 1) * 0.999;
    const long levels = static_cast<long>(std::ceil(coef_bound / step));
    const double est = std::pow(2.0 * levels + 1.0, degree + 1);
    if (est > static_cast<double>(cap)) throw NetTooLarge("polynomial net exceeds cap", est);
    std::vector<double> c(static_cast<std::size_t>(degree) + 1);
    auto recurse = [&](auto&& self, std::size_t k) -> void {
      if (k == c.size()) {
        out.push_back(GFunc::polynomial(c));
        return;
      }
      for (long i = -levels; i <= levels; ++i) {
        c[k] = std::clamp(static_cast<double>(i) * step, -coef_bound, coef_bound);
        self(self, k + 1);
      }
    };
    recurse(recurse, 0);
    return out;
  }
  if (metric != Metric::d2_nu && metric != Metric::d1_nun && metric != Metric::sup)
    throw Error(Errc::invalid_argument, std::string("indicator nets are built for d2_nu, not ") + metric_name(metric));
  if (metric == Metric::sup && u <= 1.0)
    throw Error(Errc::invalid_argument, "indicator classes have no finite sup-norm net below 1");
  const double r = u * u;
  const double f0 = kind == GKind::initial_intervals ? model.cdf(0.0) : 0.0;
  const double mass = 1.0 - f0;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(mass / r));
  if (steps + 1 > cap) throw NetTooLarge("indicator net exceeds cap", static_cast<double>(steps + 1));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double p = std::min(1.0, f0 + mass * static_cast<double>(k) / static_cast<double>(steps));
    double w = model.quantile(p);
    if (kind == GKind::initial_intervals) w = std::max(w, 0.0);
    out.push_back(member(w));
  }
  return out;
}

const char* taxonomy_name(Taxonomy t) noexcept {
  switch (t) {
    case Taxonomy::ub_mvc: return "pi(UB,M-VC)";
    case Taxonomy::nuG_jvc: return "pi(nuG,J-VC)";
    case Taxonomy::nuG2_jvc: return "pi(nuG2,J-VC)";
  }
  return "?";
}

ProductClass ProductClass::make(HClass h, GClass g, Taxonomy tag) {
  std::visit([](const auto& c) { c.validate(); }, h);
  if (tag == Taxonomy::ub_mvc && !g.constant_envelope())
    throw Error(Errc::invalid_argument, "uniformly bounded taxonomy requires constant envelopes; " + g.name() +
                                            " has a non-constant envelope");
  return ProductClass{std::move(h), std::move(g), tag};
}

double ProductClass::h_envelope() const {
  return std::visit(
      [](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HolderClass>) {
          return c.envelope();
        } else {
          return 1.0;
        }
      },
      h_class);
}

std::vector<HFunc> build_h_net(const HClass& cls, double u, std::size_t cap) {
  std::vector<HFunc> out;
  if (const auto* hc = std::get_if<HolderClass>(&cls)) {
    for (auto& f : build_holder_net(*hc, u, cap)) out.push_back(HFunc::holder(std::move(f)));
  } else {
    for (auto& s : std::get<BVectorClass>(cls).build_net(u, Metric::d2_lambda, cap)) out.push_back(HFunc::indicator(std::move(s)));
  }
  return out;
}

double eval_member(const HolderFunction& h, double s) { return h(s); }

double eval_member(const IntervalUnion& B, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(Errc::invalid_argument, "set member evaluated outside [0,1]");
  return B.contains(s) ? 1.0 : 0.0;
}

double eval_member(const GFunc& g, double x) {
  if (std::isnan(x)) throw Error(Errc::invalid_argument, "x is not a number");
  return g(x);
}

}  // namespace semproc
