#include "semproc/fclt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "semproc/error.hpp"
#include "semproc/quadrature.hpp"
#include "semproc/rng.hpp"
#include "semproc/ulln.hpp"

namespace semproc {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

QFunction center_q(const QFunction& q, const NuModel& model, double tol) {
  switch (q.kind()) {
    case QFunction::Kind::product: {
      const double m = nu_expect(q.g(), model, tol);
      if (!std::isfinite(m)) throw Error(Errc::invalid_argument, "q is not integrable under " + model.id());
      return QFunction::product(q.h(), q.g().shifted(-m));
    }
    case QFunction::Kind::combination: {
      std::vector<QFunction> centered;
      for (const auto& t : q.terms()) centered.push_back(center_q(t, model, tol));
      return QFunction::combination(q.coefs(), std::move(centered));
    }
    case QFunction::Kind::generic: break;
  }
  const GFunc& dom = q.dominating();
  const double md = nu_expect(dom, model, tol);
  if (!std::isfinite(md)) throw Error(Errc::invalid_argument, "dominating function not integrable under " + model.id());
  QFunction base = q;
  return QFunction::generic(
      [base, model, tol](double s, double x) { return base(s, x) - nu_of_q(base, s, model, tol); }, dom.shifted(md),
      q.s_breaks(), q.x_breaks(), q.s_continuous(), "centered " + q.label());
}

// ---------------------------------------------------------------- Z_n

ZnEvaluator::ZnEvaluator(std::vector<QFunction> q_list, std::size_t n, NuModel model, double tol)
    : q_(std::move(q_list)), n_(n), model_(model) {
  if (n_ == 0) throw Error(Errc::invalid_argument, "n must be positive");
  const double dn = static_cast<double>(n_);
  for (const auto& q : q_) {
    std::vector<double> center(n_, 0.0);
    if (auto pt = q.product_terms()) {
      std::vector<Term> terms;
      for (const auto& t : *pt) {
        Term term{t.coef, std::vector<double>(n_), t.g};
        for (std::size_t i = 1; i <= n_; ++i) term.h[i - 1] = t.h->at_grid(i, n_);
        const double m = nu_expect(*t.g, model_, tol);
        for (std::size_t i = 0; i < n_; ++i) center[i] += t.coef * term.h[i] * m;
        terms.push_back(std::move(term));
      }
      terms_.emplace_back(std::move(terms));
    } else {
      for (std::size_t i = 1; i <= n_; ++i) center[i - 1] = nu_of_q(q, static_cast<double>(i) / dn, model_, tol);
      terms_.emplace_back(std::nullopt);
    }
    center_.push_back(std::move(center));
  }
}

std::vector<double> ZnEvaluator::operator()(const Sample& sample) const {
  if (sample.n != n_) throw Error(Errc::invalid_argument, "sample size does not match the evaluator");
  std::vector<double> out(q_.size(), 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  for (std::size_t k = 0; k < q_.size(); ++k) {
    const auto& c = center_[k];
    double sum = 0.0;
    if (terms_[k]) {
      for (std::size_t i = 0; i < n_; ++i) {
        const double x = sample.values[i];
        double v = 0.0;
        for (const auto& t : *terms_[k])
          if (t.h[i] != 0.0) v += t.coef * t.h[i] * (*t.g)(x);
        sum += v - c[i];
      }
    } else {
      for (std::size_t i = 1; i <= n_; ++i) sum += q_[k].at_grid(i, n_, sample.values[i - 1]) - c[i - 1];
    }
    out[k] = sum * scale;
  }
  return out;
}

ZProcessEval eval_Zn(const std::vector<QFunction>& q_list, const Sample& sample, double tol) {
  ZnEvaluator ev(q_list, sample.n, sample.model, tol);
  return {q_list, sample.n, ev(sample)};
}

// ---------------------------------------------------------------- kernel

double cov_kernel(const QFunction& q1, const QFunction& q2, KernelMode mode, const NuModel& model, double tol) {
  if (mode == KernelMode::product) {
    auto t1 = q1.product_terms();
    auto t2 = q2.product_terms();
    if (!t1 || !t2) throw Error(Errc::invalid_argument, "product kernel needs sums of products");
    double v = 0.0;
    for (const auto& a : *t1)
      for (const auto& b : *t2) {
        const double lam = eval_lambda_product(*a.h, *b.h, tol);
        if (lam == 0.0) continue;
        v += a.coef * b.coef * lam *
             (nu_product(*a.g, *b.g, model, tol) - nu_expect(*a.g, model, tol) * nu_expect(*b.g, model, tol));
      }
    return v;
  }
  const auto xb = merged(q1.x_breaks(), q2.x_breaks());
  const auto sb = merged(q1.s_breaks(), q2.s_breaks());
  const double inner_tol = tol * 0.1;
  auto integrand = [&](double s) {
    const double e12 = model.expect([&](double x) { return q1(s, x) * q2(s, x); }, xb, inner_tol);
    const double e1 = model.expect([&](double x) { return q1(s, x); }, xb, inner_tol);
    const double e2 = model.expect([&](double x) { return q2(s, x); }, xb, inner_tol);
    return e12 - e1 * e2;
  };
  QuadOptions opt;
  opt.tol = tol;
  std::vector<double> inner_breaks;
  for (double b : sb)
    if (b > 0.0 && b < 1.0) inner_breaks.push_back(b);
  return integrate(integrand, 0.0, 1.0, opt, inner_breaks).value;
}

double kiefer_covariance(double s1, double x1, double s2, double x2) {
  return std::min(s1, s2) * (std::min(x1, x2) - x1 * x2);
}

QFunction kiefer_cell(double s0, double x0) {
  if (!(s0 >= 0.0 && s0 <= 1.0)) throw Error(Errc::invalid_argument, "kiefer cell needs s0 in [0,1]");
  return QFunction::product(HFunc::indicator(IntervalUnion::initial(dyadic(s0))), GFunc::half_line(x0));
}

Eigen::MatrixXd covariance_matrix(const std::vector<QFunction>& q_list, KernelMode mode, const NuModel& model,
                                  double tol, Exec exec) {
  const std::size_t k = q_list.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  parallel_for(k, exec, [&](std::size_t a) {
    for (std::size_t b = a; b < k; ++b) {
      const double v = cov_kernel(q_list[a], q_list[b], mode, model, tol);
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
      m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
    }
  });
  return m;
}

// ---------------------------------------------------------------- Gaussian draws

GaussianSampler::GaussianSampler(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw Error(Errc::invalid_argument, "covariance matrix must be square");
  const Eigen::Index k = cov.rows();
  if (k == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
  if (es.info() != Eigen::Success) throw Error(Errc::not_psd, "eigendecomposition failed");
  const double thr = 1e-10 * std::abs(cov.trace());
  Eigen::VectorXd root(k);
  min_eig_ = es.eigenvalues().minCoeff();
  for (Eigen::Index i = 0; i < k; ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev < -thr)
      throw Error(Errc::not_psd, "eigenvalue " + std::to_string(ev) + " below -1e-10*trace = " + std::to_string(-thr));
    root(i) = std::sqrt(std::max(0.0, ev));
  }
  factor_ = es.eigenvectors() * root.asDiagonal();
}

Eigen::VectorXd GaussianSampler::draw(Rng& rng) const {
  Eigen::VectorXd z(factor_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return factor_ * z;
}

Eigen::MatrixXd gaussian_fidi_sample(const Eigen::MatrixXd& cov, std::size_t count, std::uint64_t seed) {
  const GaussianSampler sampler(cov);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), cov.rows());
  for (std::size_t r = 0; r < count; ++r) {
    Rng rng(derive_seed(seed, {std::string("gaussian"), static_cast<std::uint64_t>(r)}));
    out.row(static_cast<Eigen::Index>(r)) = sampler.draw(rng).transpose();
  }
  return out;
}

Eigen::MatrixXd gaussian_fidi_sample(const std::vector<QFunction>& q_list, KernelMode mode, const NuModel& model,
                                     std::size_t count, std::uint64_t seed) {
  return gaussian_fidi_sample(covariance_matrix(q_list, mode, model), count, seed);
}

double ks_distance_normal(std::vector<double> values, double variance) {
  if (values.empty()) throw Error(Errc::invalid_argument, "KS distance of an empty sample");
  std::sort(values.begin(), values.end());
  const auto m = static_cast<double>(values.size());
  const double sd = std::sqrt(std::max(0.0, variance));
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    // Point mass at 0 when the variance vanishes; F_before is the left limit.
    const bool atom = variance < 1e-12;
    const double F = atom ? (values[i] >= 0.0 ? 1.0 : 0.0) : std_normal_cdf(values[i] / sd);
    const double F_before = atom ? (values[i] > 0.0 ? 1.0 : 0.0) : F;
    d = std::max({d, static_cast<double>(i + 1) / m - F, F_before - static_cast<double>(i) / m});
  }
  return d;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& draws) {
  if (draws.rows() < 2) throw Error(Errc::invalid_argument, "covariance needs at least two draws");
  const Eigen::RowVectorXd mean = draws.colwise().mean();
  const Eigen::MatrixXd c = draws.rowwise() - mean;
  return (c.transpose() * c) / static_cast<double>(draws.rows() - 1);
}

FidiTestReport fidi_convergence_test(const std::vector<QFunction>& q_list, std::size_t n, std::size_t R,
                                     std::uint64_t seed, const NuModel& model, double cov_tolerance,
                                     double ks_tolerance, std::size_t combinations, Exec exec) {
  if (q_list.empty()) throw Error(Errc::invalid_argument, "empty q list");
  if (R < 2) throw Error(Errc::invalid_argument, "replicates must be >= 2");
  FidiTestReport rep;
  rep.cov_tolerance = cov_tolerance;
  rep.ks_tolerance = ks_tolerance;
  bool products = true;
  for (const auto& q : q_list) products = products && q.product_terms().has_value();
  rep.analytic_cov = covariance_matrix(q_list, products ? KernelMode::product : KernelMode::generic, model);

  const ZnEvaluator ev(q_list, n, model);
  const auto k = static_cast<Eigen::Index>(q_list.size());
  Eigen::MatrixXd draws(static_cast<Eigen::Index>(R), k);
  parallel_for(R, exec, [&](std::size_t r) {
    const Sample s = draw_sample(model, n, derive_seed(seed, {std::string("fidi"), static_cast<std::uint64_t>(r)}));
    const auto z = ev(s);
    for (Eigen::Index c = 0; c < k; ++c) draws(static_cast<Eigen::Index>(r), c) = z[static_cast<std::size_t>(c)];
  });
  rep.empirical_cov = sample_covariance(draws);
  rep.max_cov_error = (rep.empirical_cov - rep.analytic_cov).cwiseAbs().maxCoeff();

  for (Eigen::Index c = 0; c < k; ++c) {
    const double var = rep.analytic_cov(c, c);
    rep.degenerate.push_back(var < 1e-12);
    const Eigen::VectorXd col = draws.col(c);
    rep.ks_marginals.push_back(ks_distance_normal(std::vector<double>(col.data(), col.data() + col.size()), var));
  }
  Rng cw(derive_seed(seed, {std::string("cramer-wold")}));
  for (std::size_t t = 0; t < combinations; ++t) {
    Eigen::VectorXd a(k);
    for (Eigen::Index c = 0; c < k; ++c) a(c) = cw.normal();
    a /= a.norm();
    const Eigen::VectorXd proj = draws * a;
    const double var = a.dot(rep.analytic_cov * a);
    rep.combinations.emplace_back(a.data(), a.data() + a.size());
    rep.ks_combinations.push_back(ks_distance_normal(std::vector<double>(proj.data(), proj.data() + proj.size()), var));
  }
  rep.cov_pass = rep.max_cov_error <= cov_tolerance;
  rep.ks_pass = true;
  for (double v : rep.ks_marginals) rep.ks_pass = rep.ks_pass && v <= ks_tolerance;
  for (double v : rep.ks_combinations) rep.ks_pass = rep.ks_pass && v <= ks_tolerance;
  return rep;
}

// ---------------------------------------------------------------- quadrature limit

QuadratureLimitReport quadrature_limit_check(const QFunction& q, const std::vector<std::size_t>& n_list,
                                             const NuModel& model, double tolerance) {
  QuadratureLimitReport rep;
  rep.tolerance = tolerance;
  rep.limit = lambda_nu_product(q, q, model);
  for (std::size_t n : n_list) {
    QuadratureLimitRow row;
    row.n = n;
    row.discrete = lambda_n_nu_product(q, q, n, model);
    row.gap = std::abs(row.discrete - rep.limit);
    rep.rows.push_back(row);
  }
  rep.pass = !rep.rows.empty() && rep.rows.back().gap <= tolerance;
  return rep;
}

// ---------------------------------------------------------------- Lindeberg

namespace {

std::vector<double> real_roots(std::vector<double> p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
  const std::size_t deg = p.size() - 1;
  std::vector<double> roots;
  if (deg == 0) return roots;
  if (deg == 1) {
    roots.push_back(-p[0] / p[1]);
    return roots;
  }
  if (deg == 2) {
    const double a = p[2], b = p[1], c = p[0];
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return roots;
    const double qv = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (qv != 0.0) {
      roots.push_back(qv / a);
      roots.push_back(c / qv);
    } else {
      roots.push_back(0.0);
    }
    return roots;
  }
  const auto d = static_cast<Eigen::Index>(deg);
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < d; ++i) comp(i, d - 1) = -p[static_cast<std::size_t>(i)] / p[deg];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z.real()))) continue;
    double x = z.real();
    for (int it = 0; it < 3; ++it) {
      double f = 0.0, df = 0.0;
      for (std::size_t k = p.size(); k-- > 0;) {
        df = df * x + f;
        f = f * x + p[k];
      }
      if (df == 0.0) break;
      x -= f / df;
    }
    roots.push_back(x);
  }
  return roots;
}

double probe(double a, double b) {
  if (std::isinf(a) && std::isinf(b)) return 0.0;
  if (std::isinf(a)) return b - 1.0 - std::abs(b);
  if (std::isinf(b)) return a + 1.0 + std::abs(a);
  return 0.5 * (a + b);
}

}  // namespace

double truncated_second_moment(const GFunc& g, double t, const NuModel& model) {
  if (!g.closed_form()) throw Error(Errc::invalid_argument, "truncated moment needs a closed-form factor");
  std::vector<double> P = g.coefs();
  P[0] += g.shift();
  const double lo = g.lo(), hi = g.hi(), s0 = g.shift();
  double total = 0.0;
  if (s0 != 0.0 && std::abs(s0) >= t) {
    const double inside = (std::isinf(hi) ? 1.0 : model.cdf(hi)) - (std::isinf(lo) ? 0.0 : model.cdf(lo));
    total += s0 * s0 * std::max(0.0, 1.0 - inside);
  }
  std::vector<double> cuts{lo, hi};
  for (double sign : {1.0, -1.0}) {
    std::vector<double> shifted = P;
    shifted[0] -= sign * t;
    for (double r : real_roots(shifted))
      if (r > lo && r < hi) cuts.push_back(r);
  }
  std::sort(cuts.begin(), cuts.end());
  const std::vector<double> P2 = poly_mul(P, P);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c], b = cuts[c + 1];
    if (!(a < b)) continue;
    if (std::abs(poly_eval(P, probe(a, b))) < t) continue;
    for (std::size_t k = 0; k < P2.size(); ++k)
      if (P2[k] != 0.0) total += P2[k] * model.partial_moment(static_cast<int>(k), a, b);
  }
  return std::max(0.0, total);
}

LindebergReport lindeberg_check(const QFunction& q, const std::vector<std::size_t>& n_list,
                                const std::vector<double>& epsilon_list, const NuModel& model, std::size_t mc_points,
                                std::uint64_t seed, double tolerance, Exec exec) {
  LindebergReport rep;
  rep.tolerance = tolerance;
  const QFunction qt = center_q(q, model);
  rep.limit_variance = lambda_nu_product(qt, qt, model);
  if (rep.limit_variance < 1e-12) {
    rep.degenerate = true;
    rep.method = "degenerate";
    rep.pass = true;
    return rep;
  }
  const auto terms = qt.product_terms();
  if (terms) {
    rep.sup_bound = 0.0;
    for (const auto& t : *terms) rep.sup_bound += std::abs(t.coef) * t.h->sup_abs() * t.g->sup_abs();
  } else {
    rep.sup_bound = qt.dominating().sup_abs();
  }
  const bool closed = terms && terms->size() == 1 && (*terms)[0].g->closed_form();
  rep.method = closed ? "closed-form" : (mc_points > 0 ? "monte-carlo" : "quadrature");

  std::vector<double> mc_x;
  if (!closed && mc_points > 0) {
    Rng rng(derive_seed(seed, {std::string("lindeberg-mc")}));
    for (std::size_t i = 0; i < mc_points; ++i) mc_x.push_back(model.draw(rng));
  }
  const auto xb = qt.x_breaks();

  for (std::size_t n : n_list) {
    if (n == 0) throw Error(Errc::invalid_argument, "n must be positive");
    const double var_n = lambda_n_nu_product(qt, qt, n, model);
    const double total = static_cast<double>(n) * var_n;
    for (double eps : epsilon_list) {
      if (!(eps > 0.0)) throw Error(Errc::invalid_argument, "epsilon must be > 0");
      LindebergRow row;
      row.n = n;
      row.epsilon = eps;
      row.variance = var_n;
      const double tau = eps * std::sqrt(total);
      if (tau > rep.sup_bound || total <= 0.0) {
        row.truncation_empty = true;
        row.ratio = 0.0;
        rep.rows.push_back(row);
        continue;
      }
      const std::size_t chunk = 4096;
      const std::size_t chunks = (n + chunk - 1) / chunk;
      std::vector<double> partial(chunks, 0.0);
      parallel_for(chunks, exec, [&](std::size_t c) {
        double acc = 0.0;
        for (std::size_t i = c * chunk + 1; i <= std::min(n, (c + 1) * chunk); ++i) {
          if (closed) {
            const auto& t = (*terms)[0];
            const double hi = t.coef * t.h->at_grid(i, n);
            if (hi == 0.0) continue;
            acc += hi * hi * truncated_second_moment(*t.g, tau / std::abs(hi), model);
          } else {
            auto f = [&](double x) {
              const double v = qt.at_grid(i, n, x);
              return std::abs(v) >= tau ? v * v : 0.0;
            };
            if (!mc_x.empty()) {
              double s = 0.0;
              for (double x : mc_x) s += f(x);
              acc += s / static_cast<double>(mc_x.size());
            } else {
              acc += model.expect(f, xb, 1e-10);
            }
          }
        }
        partial[c] = acc;
      });
      double sum = 0.0;
      for (double v : partial) sum += v;
      row.ratio = sum / total;
      rep.rows.push_back(row);
    }
  }

  if (std::isfinite(rep.sup_bound)) {
    for (double eps : epsilon_list) {
      auto empty_at = [&](std::size_t n) {
        const double t = static_cast<double>(n) * lambda_n_nu_product(qt, qt, n, model);
        return eps * eps * t > rep.sup_bound * rep.sup_bound;
      };
      std::size_t hi = 1;
      while (!empty_at(hi) && hi < (std::size_t{1} << 30)) hi *= 2;
      if (!empty_at(hi)) continue;
      std::size_t lo = hi / 2;
      while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (empty_at(mid) ? hi : lo) = mid;
      }
      rep.thresholds.emplace_back(eps, hi);
    }
  }

  rep.pass = !rep.rows.empty();
  if (!n_list.empty()) {
    const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
    for (const auto& r : rep.rows)
      if (r.n == n_max && r.ratio > tolerance) rep.pass = false;
  }
  return rep;
}

// ---------------------------------------------------------------- modulus

namespace {

// Range-minimum sparse table over a fixed array.
class RangeMin {
 public:
  explicit RangeMin(const std::vector<double>& v) {
    table_.push_back(v);
    for (std::size_t w = 1; 2 * w <= v.size(); w *= 2) {
      const auto& prev = table_.back();
      std::vector<double> next(v.size() - 2 * w + 1);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = std::min(prev[i], prev[i + w]);
      table_.push_back(std::move(next));
    }
  }
  double operator()(std::size_t lo, std::size_t hi) const {  // inclusive
    const auto level = static_cast<std::size_t>(std::bit_width(hi - lo + 1) - 1);
    return std::min(table_[level][lo], table_[level][hi + 1 - (std::size_t{1} << level)]);
  }

 private:
  std::vector<std::vector<double>> table_;
};

struct HNetData {
  std::vector<HolderFunction> net;
  std::vector<std::vector<double>> dist;  // d2_lambda
};

HNetData holder_net_with_distances(const HolderClass& cls, double net_u) {
  HNetData d;
  d.net = build_holder_net(cls, net_u);
  const std::size_t m = d.net.size();
  d.dist.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      d.dist[a][b] = d.dist[b][a] = std::sqrt(std::max(0.0, pl_l2_sq_distance(d.net[a], d.net[b])));
  return d;
}

std::size_t window(std::size_t steps, double alpha, double dh) {
  const double r = alpha - dh;
  return static_cast<std::size_t>(std::floor(static_cast<double>(steps) * r * r * (1.0 + 1e-12)));
}

}  // namespace

ModulusReport equicontinuity_modulus(const HolderClass& cls, std::size_t n, const std::vector<double>& alphas,
                                     double net_u, std::size_t R, std::uint64_t seed, const NuModel& model,
                                     std::size_t g_steps, Exec exec) {
  if (n == 0 || R == 0 || g_steps == 0) throw Error(Errc::invalid_argument, "n, R and g_steps must be positive");
  ModulusReport rep;
  rep.alphas = alphas;
  const HNetData hd = holder_net_with_distances(cls, net_u);
  const std::size_t m = hd.net.size();
  rep.h_net_size = m;
  rep.g_net_size = g_steps + 1;
  std::vector<std::vector<double>> hv(m, std::vector<double>(n));
  std::vector<double> hsum(m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t i = 1; i <= n; ++i) {
      hv[a][i - 1] = hd.net[a](static_cast<double>(i) / static_cast<double>(n));
      hsum[a] += hv[a][i - 1];
    }
  const std::size_t K = g_steps;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  rep.per_replicate.assign(R, std::vector<double>(alphas.size(), 0.0));

  parallel_for(R, exec, [&](std::size_t r) {
    const Sample s = draw_sample(model, n, derive_seed(seed, {std::string("modulus"), static_cast<std::uint64_t>(r)}));
    // Observation i lies under the k-th half-line iff its bucket ≤ k.
    std::vector<std::size_t> bucket(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double F = model.cdf(s.values[i]) * static_cast<double>(K);
      bucket[i] = std::min(K, static_cast<std::size_t>(std::max(0.0, std::ceil(F))));
    }
    std::vector<std::vector<double>> Z(m, std::vector<double>(K + 1));
    std::vector<RangeMin> mins;
    mins.reserve(m);
    for (std::size_t a = 0; a < m; ++a) {
      std::vector<double> cell(K + 1, 0.0);
      for (std::size_t i = 0; i < n; ++i) cell[bucket[i]] += hv[a][i];
      double cum = 0.0;
      for (std::size_t k = 0; k <= K; ++k) {
        cum += cell[k];
        Z[a][k] = (cum - hsum[a] * static_cast<double>(k) / static_cast<double>(K)) * scale;
      }
      mins.emplace_back(Z[a]);
    }
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      const double alpha = alphas[ai];
      double best = 0.0;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          if (hd.dist[a][b] > alpha) continue;
          const std::size_t w = std::min(K, window(K, alpha, hd.dist[a][b]));
          for (std::size_t k = 0; k <= K; ++k) {
            const std::size_t lo = k > w ? k - w : 0, hi = std::min(K, k + w);
            best = std::max(best, Z[a][k] - mins[b](lo, hi));
          }
        }
      rep.per_replicate[r][ai] = best;
    }
  });

  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    double sum = 0.0;
    for (std::size_t r = 0; r < R; ++r) sum += rep.per_replicate[r][ai];
    rep.mean_modulus.push_back(sum / static_cast<double>(R));
  }
  std::vector<std::size_t> order(alphas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return alphas[x] < alphas[y]; });
  rep.monotone = true;
  for (std::size_t t = 1; t < order.size(); ++t)
    if (rep.mean_modulus[order[t]] < rep.mean_modulus[order[t - 1]]) rep.monotone = false;
  if (!order.empty() && rep.mean_modulus[order.back()] > 0.0)
    rep.small_to_large_ratio = rep.mean_modulus[order.front()] / rep.mean_modulus[order.back()];
  return rep;
}

FluctuationReport fluctuation_bound_check(const HolderClass& cls, const std::vector<std::size_t>& n_list,
                                          const std::vector<double>& alphas, double net_u, const NuModel& model,
                                          std::size_t g_steps, Exec exec) {
  (void)model;  // half-line net at ν-quantile levels: only the levels enter
  if (g_steps == 0) throw Error(Errc::invalid_argument, "g_steps must be positive");
  FluctuationReport rep;
  rep.h_envelope = cls.envelope();
  rep.g_second_moment = 1.0;
  const HNetData hd = holder_net_with_distances(cls, net_u);
  const std::size_t m = hd.net.size();
  std::vector<HFunc> family;
  for (const auto& h : hd.net) family.push_back(HFunc::holder(h));
  const std::size_t K = g_steps;
  std::vector<std::size_t> order(alphas.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return alphas[x] < alphas[y]; });

  for (std::size_t n : n_list) {
    const double osc = oscillation_sup(family, n, exec);
    std::vector<std::vector<double>> hv(m, std::vector<double>(n));
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t i = 1; i <= n; ++i) hv[a][i - 1] = hd.net[a](static_cast<double>(i) / static_cast<double>(n));
    std::vector<std::vector<double>> G(m, std::vector<double>(m, 0.0));  // λ_n(h_a h_b)
    parallel_for(m, exec, [&](std::size_t a) {
      for (std::size_t b = 0; b < m; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += hv[a][i] * hv[b][i];
        G[a][b] = s / static_cast<double>(n);
      }
    });
    std::vector<FluctuationRow> rows(alphas.size());
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      const double alpha = alphas[ai];
      std::vector<double> best(m, 0.0);
      parallel_for(m, exec, [&](std::size_t a) {
        for (std::size_t b = 0; b < m; ++b) {
          if (hd.dist[a][b] > alpha) continue;
          const std::size_t w = std::min(K, window(K, alpha, hd.dist[a][b]));
          for (std::size_t k = 0; k <= K; ++k)
            for (std::size_t l = k > w ? k - w : 0; l <= std::min(K, k + w); ++l) {
              const double pk = static_cast<double>(k) / static_cast<double>(K);
              const double pl = static_cast<double>(l) / static_cast<double>(K);
              const double d2 = G[a][a] * pk - 2.0 * G[a][b] * std::min(pk, pl) + G[b][b] * pl;
              best[a] = std::max(best[a], std::sqrt(std::max(0.0, d2)));
            }
        }
      });
      FluctuationRow row;
      row.n = n;
      row.alpha = alpha;
      row.observed = *std::max_element(best.begin(), best.end());
      row.oscillation = osc;
      row.bound = rep.h_envelope * alpha + std::sqrt(rep.g_second_moment) * (alpha + std::sqrt(osc));
      row.unit_bound = 2.0 * alpha + std::sqrt(osc);
      if (row.observed > row.bound + 1e-12) rep.within_bound = false;
      rows[ai] = row;
    }
    for (std::size_t t = 1; t < order.size(); ++t)
      if (rows[order[t]].observed < rows[order[t - 1]].observed) rep.monotone_in_alpha = false;
    for (auto& r : rows) rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace semproc
