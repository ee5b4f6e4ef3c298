#include "semproc/measures.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>

#include "semproc/error.hpp"
#include "semproc/quadrature.hpp"

namespace semproc {

namespace {

constexpr double inv_sqrt_2pi = 0.3989422804014327;

double normal_pdf(double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::vector<double> merged(std::vector<double> a, std::span<const double> b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

// ---------------------------------------------------------------- NuModel

NuModel NuModel::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error(Errc::invalid_argument, "exponential rate must be > 0");
  return NuModel(Kind::exponential, rate);
}

NuModel NuModel::parse(std::string_view id) {
  if (id == "uniform01") return uniform01();
  if (id == "standard-normal") return standard_normal();
  if (id == "exponential") return exponential(1.0);
  if (id.starts_with("exponential(") && id.ends_with(")")) {
    const std::string_view arg = id.substr(12, id.size() - 13);
    double rate = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), rate);
    if (ec != std::errc() || ptr != arg.data() + arg.size())
      throw Error(Errc::invalid_argument, "bad exponential rate in model id '" + std::string(id) + "'");
    return exponential(rate);
  }
  if (id.starts_with("point-mass") || id.starts_with("degenerate"))
    throw Error(Errc::unsupported_model, "degenerate sampling model '" + std::string(id) + "' is not supported");
  throw Error(Errc::invalid_argument,
              "unknown model '" + std::string(id) + "' (registered: uniform01, standard-normal, exponential(rate))");
}

std::string NuModel::id() const {
  switch (kind_) {
    case Kind::uniform01: return "uniform01";
    case Kind::standard_normal: return "standard-normal";
    case Kind::exponential: {
      char buf[64];
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, rate_);
      (void)ec;
      return "exponential(" + std::string(buf, ptr) + ")";
    }
  }
  return "?";
}

double NuModel::cdf(double w) const {
  switch (kind_) {
    case Kind::uniform01: return std::clamp(w, 0.0, 1.0);
    case Kind::standard_normal: return normal_cdf(w);
    case Kind::exponential: return w <= 0.0 ? 0.0 : -std::expm1(-rate_ * w);
  }
  return 0.0;
}

double NuModel::pdf(double x) const {
  switch (kind_) {
    case Kind::uniform01: return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0;
    case Kind::standard_normal: return normal_pdf(x);
    case Kind::exponential: return x < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * x);
  }
  return 0.0;
}

double NuModel::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::invalid_argument, "quantile level outside [0,1]");
  switch (kind_) {
    case Kind::uniform01: return p;
    case Kind::standard_normal:
      if (p == 0.0) return -std::numeric_limits<double>::infinity();
      if (p == 1.0) return std::numeric_limits<double>::infinity();
      return boost::math::quantile(boost::math::normal_distribution<double>(), p);
    case Kind::exponential:
      if (p == 1.0) return std::numeric_limits<double>::infinity();
      return -std::log1p(-p) / rate_;
  }
  return 0.0;
}

double NuModel::draw(Rng& rng) const {
  switch (kind_) {
    case Kind::uniform01: return rng.uniform01();
    case Kind::standard_normal: return rng.normal();
    case Kind::exponential: return rng.exponential(rate_);
  }
  return 0.0;
}

double NuModel::support_lo() const { return kind_ == Kind::standard_normal ? -40.0 : 0.0; }

double NuModel::support_hi() const {
  switch (kind_) {
    case Kind::uniform01: return 1.0;
    case Kind::standard_normal: return 40.0;
    case Kind::exponential: return 745.0 / rate_;
  }
  return 1.0;
}

std::vector<double> NuModel::quadrature_breaks() const {
  switch (kind_) {
    case Kind::uniform01: return {};
    case Kind::standard_normal: return {-20.0, -10.0, -5.0, -2.0, 0.0, 2.0, 5.0, 10.0, 20.0};
    case Kind::exponential: return {1.0 / rate_, 5.0 / rate_, 20.0 / rate_, 50.0 / rate_};
  }
  return {};
}

double NuModel::raw_moment(int k) const {
  if (k < 0) throw Error(Errc::invalid_argument, "negative moment order");
  switch (kind_) {
    case Kind::uniform01: return 1.0 / (k + 1);
    case Kind::standard_normal: {
      if (k % 2 == 1) return 0.0;
      double m = 1.0;
      for (int j = k - 1; j > 1; j -= 2) m *= j;
      return m;
    }
    case Kind::exponential: {
      double m = 1.0;
      for (int j = 1; j <= k; ++j) m *= j / rate_;
      return m;
    }
  }
  return 0.0;
}

double NuModel::partial_moment(int k, double a, double b) const {
  if (k < 0) throw Error(Errc::invalid_argument, "negative moment order");
  if (!(a < b)) return 0.0;
  switch (kind_) {
    case Kind::uniform01: {
      const double lo = std::clamp(a, 0.0, 1.0), hi = std::clamp(b, 0.0, 1.0);
      return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
    }
    case Kind::standard_normal: {
      // J_k(t) = ∫_{-∞}^t x^k φ; J_0 = Φ, J_1 = -φ, J_k = -t^{k-1}φ(t) + (k-1) J_{k-2}.
      auto J = [&](double t) {
        if (t == -std::numeric_limits<double>::infinity()) return 0.0;
        if (t == std::numeric_limits<double>::infinity()) return raw_moment(k);
        const double phi = normal_pdf(t);
        double jm2 = normal_cdf(t), jm1 = -phi;
        if (k == 0) return jm2;
        if (k == 1) return jm1;
        double j = 0.0;
        for (int m = 2; m <= k; ++m) {
          j = -std::pow(t, m - 1) * phi + (m - 1) * jm2;
          jm2 = jm1;
          jm1 = j;
        }
        return j;
      };
      return J(b) - J(a);
    }
    case Kind::exponential: {
      // K_k(t) = ∫_0^t x^k r e^{-rx}; K_0 = 1 - e^{-rt}, K_k = -t^k e^{-rt} + (k/r) K_{k-1}.
      auto K = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t == std::numeric_limits<double>::infinity()) return raw_moment(k);
        const double e = std::exp(-rate_ * t);
        double v = -std::expm1(-rate_ * t);
        for (int m = 1; m <= k; ++m) v = -std::pow(t, m) * e + (m / rate_) * v;
        return v;
      };
      return K(b) - K(a);
    }
  }
  return 0.0;
}

double NuModel::expect(const std::function<double(double)>& f, std::span<const double> breaks, double tol) const {
  const auto cuts = merged(quadrature_breaks(), breaks);
  const auto integrand = [&](double x) {
    const double p = pdf(x);
    return p == 0.0 ? 0.0 : f(x) * p;
  };
  QuadOptions opt;
  opt.tol = tol;
  return integrate(integrand, support_lo(), support_hi(), opt, cuts).value;
}

// ---------------------------------------------------------------- samples

Sample draw_sample(const NuModel& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(Errc::invalid_argument, "sample size must be positive");
  Sample s;
  s.n = n;
  s.seed = seed;
  s.model = model;
  s.values.resize(n);
  Rng rng(seed);
  for (auto& v : s.values) v = model.draw(rng);
  return s;
}

void write_sample_csv(const Sample& sample, std::ostream& os) {
  os << "index,grid_s,x\n";
  const auto old = os.precision(17);
  for (std::size_t i = 1; i <= sample.n; ++i)
    os << i << ',' << static_cast<double>(i) / static_cast<double>(sample.n) << ',' << sample.values[i - 1] << '\n';
  os.precision(old);
}

// ---------------------------------------------------------------- λ_n, λ

double eval_lambda_n(const std::function<double(double)>& h, std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "lambda_n needs n > 0");
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) sum += h(static_cast<double>(i) / static_cast<double>(n));
  return sum / static_cast<double>(n);
}

double eval_lambda_n(const HFunc& h, std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "lambda_n needs n > 0");
  if (const auto* set = h.as_indicator())
    return static_cast<double>(set->grid_count(static_cast<std::int64_t>(n))) / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) sum += h.at_grid(i, n);
  return sum / static_cast<double>(n);
}

double eval_lambda(const std::function<double(double)>& h, double tol, std::span<const double> breaks) {
  QuadOptions opt;
  opt.tol = tol;
  return integrate(h, 0.0, 1.0, opt, breaks).value;
}

double eval_lambda(const HFunc& h, double tol) {
  if (auto exact = h.lambda_exact()) return *exact;
  const auto br = h.breakpoints();
  return eval_lambda([&](double s) { return h(s); }, tol, br);
}

double eval_lambda_n_product(const HFunc& h1, const HFunc& h2, std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_argument, "lambda_n needs n > 0");
  const auto* s1 = h1.as_indicator();
  const auto* s2 = h2.as_indicator();
  if (s1 && s2)
    return static_cast<double>(s1->intersect(*s2).grid_count(static_cast<std::int64_t>(n))) / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) sum += h1.at_grid(i, n) * h2.at_grid(i, n);
  return sum / static_cast<double>(n);
}

namespace {

// ∫_a^b f1 f2 for piecewise-linear functions, exact (Simpson is exact for the
// quadratic product on every merged knot segment).
double pl_product_integral(const HolderFunction& f1, const HolderFunction& f2, double a, double b) {
  std::vector<double> knots{a, b};
  for (double x : f1.xs())
    if (x > a && x < b) knots.push_back(x);
  for (double x : f2.xs())
    if (x > a && x < b) knots.push_back(x);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double lo = knots[k], hi = knots[k + 1], mid = 0.5 * (lo + hi);
    total += (hi - lo) / 6.0 * (f1(lo) * f2(lo) + 4.0 * f1(mid) * f2(mid) + f1(hi) * f2(hi));
  }
  return total;
}

HolderFunction unit_pl() { return HolderFunction({0.0, 1.0}, {1.0, 1.0}); }

}  // namespace

double eval_lambda_product(const HFunc& h1, const HFunc& h2, double tol) {
  using K = HFunc::Kind;
  if (h1.kind() == K::constant) return h1(0.0) * eval_lambda(h2, tol);
  if (h2.kind() == K::constant) return h2(0.0) * eval_lambda(h1, tol);
  const auto* s1 = h1.as_indicator();
  const auto* s2 = h2.as_indicator();
  if (s1 && s2) return s1->intersect(*s2).lebesgue().to_double();
  const auto* p1 = h1.as_holder();
  const auto* p2 = h2.as_holder();
  const bool pl1 = p1 && p1->piecewise_linear();
  const bool pl2 = p2 && p2->piecewise_linear();
  if (pl1 && pl2) return pl_product_integral(*p1, *p2, 0.0, 1.0);
  if ((pl1 && s2) || (s1 && pl2)) {
    const HolderFunction& f = pl1 ? *p1 : *p2;
    const IntervalUnion& set = s1 ? *s1 : *s2;
    const HolderFunction one = unit_pl();
    double total = 0.0;
    for (const auto& [a, b] : set.pieces()) total += pl_product_integral(f, one, a.to_double(), b.to_double());
    return total;
  }
  auto br = h1.breakpoints();
  const auto b2 = h2.breakpoints();
  br = merged(br, b2);
  return eval_lambda([&](double s) { return h1(s) * h2(s); }, tol, br);
}

// ---------------------------------------------------------------- P_n, ν_{n,B}

double eval_semp(const QFunction& q, const Sample& sample) {
  if (sample.n == 0) throw Error(Errc::invalid_argument, "empty sample");
  double sum = 0.0;
  for (std::size_t i = 1; i <= sample.n; ++i) sum += q.at_grid(i, sample.n, sample.values[i - 1]);
  return sum / static_cast<double>(sample.n);
}

std::int64_t k_n_B(const IntervalUnion& B, std::int64_t n) {
  if (n <= 0) throw Error(Errc::invalid_argument, "k_n_B needs n > 0");
  return B.grid_count(n);
}

BEmpirical eval_b_empirical(const IntervalUnion& B, const std::function<double(double)>& g, const Sample& sample) {
  BEmpirical out;
  const auto n = static_cast<std::int64_t>(sample.n);
  double sum = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) {
    if (!B.contains_grid(i, n)) continue;
    ++out.k;
    sum += g(sample.values[static_cast<std::size_t>(i - 1)]);
  }
  if (out.k == 0) {
    out.empty_intersection = true;
    return out;
  }
  out.value = sum / static_cast<double>(out.k);
  return out;
}

// ---------------------------------------------------------------- ν moments

bool nu_closed_form(const GFunc& g) noexcept { return g.closed_form(); }

namespace {

double poly_interval_moment(const std::vector<double>& coefs, double lo, double hi, const NuModel& model) {
  if (!(lo < hi)) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < coefs.size(); ++k)
    if (coefs[k] != 0.0) total += coefs[k] * model.partial_moment(static_cast<int>(k), lo, hi);
  return total;
}

}  // namespace

double nu_expect(const GFunc& g, const NuModel& model, double tol) {
  if (g.closed_form()) return poly_interval_moment(g.coefs(), g.lo(), g.hi(), model) + g.shift();
  const auto br = g.breakpoints();
  return model.expect([&](double x) { return g(x); }, br, tol);
}

double nu_product(const GFunc& g1, const GFunc& g2, const NuModel& model, double tol) {
  if (g1.closed_form() && g2.closed_form()) {
    const double lo = std::max(g1.lo(), g2.lo()), hi = std::min(g1.hi(), g2.hi());
    const double c1 = g1.shift(), c2 = g2.shift();
    double total = poly_interval_moment(poly_mul(g1.coefs(), g2.coefs()), lo, hi, model);
    if (c2 != 0.0) total += c2 * poly_interval_moment(g1.coefs(), g1.lo(), g1.hi(), model);
    if (c1 != 0.0) total += c1 * poly_interval_moment(g2.coefs(), g2.lo(), g2.hi(), model);
    return total + c1 * c2;
  }
  const auto br = merged(g1.breakpoints(), g2.breakpoints());
  return model.expect([&](double x) { return g1(x) * g2(x); }, br, tol);
}

double nu_of_q(const QFunction& q, double s, const NuModel& model, double tol) {
  if (auto terms = q.product_terms()) {
    double v = 0.0;
    for (const auto& t : *terms) v += t.coef * (*t.h)(s) * nu_expect(*t.g, model, tol);
    return v;
  }
  const auto br = q.x_breaks();
  return model.expect([&](double x) { return q(s, x); }, br, tol);
}

double nu_of_qq(const QFunction& q1, const QFunction& q2, double s, const NuModel& model, double tol) {
  auto t1 = q1.product_terms();
  auto t2 = q2.product_terms();
  if (t1 && t2) {
    double v = 0.0;
    for (const auto& a : *t1)
      for (const auto& b : *t2) v += a.coef * b.coef * (*a.h)(s) * (*b.h)(s) * nu_product(*a.g, *b.g, model, tol);
    return v;
  }
  const auto br = merged(q1.x_breaks(), q2.x_breaks());
  return model.expect([&](double x) { return q1(s, x) * q2(s, x); }, br, tol);
}

double lambda_n_nu(const QFunction& q, std::size_t n, const NuModel& model, double tol) {
  if (n == 0) throw Error(Errc::invalid_argument, "lambda_n needs n > 0");
  if (auto terms = q.product_terms()) {
    double v = 0.0;
    for (const auto& t : *terms) v += t.coef * eval_lambda_n(*t.h, n) * nu_expect(*t.g, model, tol);
    return v;
  }
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) sum += nu_of_q(q, static_cast<double>(i) / static_cast<double>(n), model, tol);
  return sum / static_cast<double>(n);
}

double lambda_n_nu_product(const QFunction& q1, const QFunction& q2, std::size_t n, const NuModel& model, double tol) {
  if (n == 0) throw Error(Errc::invalid_argument, "lambda_n needs n > 0");
  auto t1 = q1.product_terms();
  auto t2 = q2.product_terms();
  if (t1 && t2) {
    double v = 0.0;
    for (const auto& a : *t1)
      for (const auto& b : *t2)
        v += a.coef * b.coef * eval_lambda_n_product(*a.h, *b.h, n) * nu_product(*a.g, *b.g, model, tol);
    return v;
  }
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i)
    sum += nu_of_qq(q1, q2, static_cast<double>(i) / static_cast<double>(n), model, tol);
  return sum / static_cast<double>(n);
}

double lambda_nu_product(const QFunction& q1, const QFunction& q2, const NuModel& model, double tol) {
  auto t1 = q1.product_terms();
  auto t2 = q2.product_terms();
  if (t1 && t2) {
    double v = 0.0;
    for (const auto& a : *t1)
      for (const auto& b : *t2)
        v += a.coef * b.coef * eval_lambda_product(*a.h, *b.h, tol) * nu_product(*a.g, *b.g, model, tol);
    return v;
  }
  const auto br = merged(q1.s_breaks(), q2.s_breaks());
  return eval_lambda([&](double s) { return nu_of_qq(q1, q2, s, model, tol * 0.1); }, tol, br);
}

}  // namespace semproc
