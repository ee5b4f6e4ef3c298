#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "semproc/covering.hpp"
#include "semproc/error.hpp"
#include "semproc/fclt.hpp"
#include "semproc/function_classes.hpp"
#include "semproc/harness.hpp"
#include "semproc/quadrature.hpp"
#include "semproc/rng.hpp"
#include "semproc/ulln.hpp"

namespace semproc {
namespace {

std::vector<std::size_t> sizes_or(const ExperimentConfig& c, const char* key, std::vector<std::size_t> fallback) {
  return c.is_set(key) ? c.size_list(key) : fallback;
}

std::vector<double> reals_or(const ExperimentConfig& c, const char* key, std::vector<double> fallback) {
  return c.is_set(key) ? c.real_list(key) : fallback;
}

std::int64_t int_or(const ExperimentConfig& c, const char* key, std::int64_t fallback) {
  return c.is_set(key) ? c.integer(key) : fallback;
}

double real_or(const ExperimentConfig& c, const char* key, double fallback) {
  return c.is_set(key) ? c.real(key) : fallback;
}

std::uint64_t sub_seed(std::uint64_t root, const std::string& label) { return derive_seed(root, {label}); }

std::uint64_t sub_seed(std::uint64_t root, const std::string& label, std::uint64_t i, std::uint64_t k) {
  return derive_seed(root, {label, i, k});
}

NuModel model_of(const ExperimentConfig& c) { return NuModel::parse(c.str("model.nu")); }

Parity parity_of(const ExperimentConfig& c) { return c.str("class.parity") == "even" ? Parity::even : Parity::odd; }

Json to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

std::string tag(const std::string& base, std::size_t n) { return base + "[n=" + std::to_string(n) + "]"; }

// ---------------------------------------------------------------- ulln

void run_ulln(const ExperimentConfig& cfg, ExperimentReport& rep, Exec exec) {
  if (cfg.str("class.h") != "bvector" || cfg.str("class.g") != "halflines")
    throw Error(Errc::config_error, "class.h/class.g: the ulln experiment supports bvector x halflines only");
  GCConfig gc;
  gc.j = static_cast<int>(cfg.integer("class.j"));
  gc.parity = parity_of(cfg);
  gc.model = model_of(cfg);
  gc.n_schedule = sizes_or(cfg, "run.n_list", {100, 1000, 10000});
  gc.replicates = static_cast<std::size_t>(int_or(cfg, "run.replicates", 200));
  gc.seed = cfg.seed();
  if (gc.replicates == 0) throw Error(Errc::config_error, "run.replicates: must be >= 1");
  const GCReport out = gc_experiment(gc, exec);

  const double dev_tol = cfg.real("tolerance.deviation");
  const double decade = cfg.real("tolerance.decade_factor");
  PlotSeries plot{"ulln_convergence.csv", {"n", "mean", "median", "q95", "max", "bound"}, {}};
  Json rows = Json::array();
  for (const auto& r : out.rows) {
    rows.push_back({{"n", r.n},
                    {"mean", r.mean},
                    {"median", r.median},
                    {"q95", r.q95},
                    {"max", r.max},
                    {"correction", r.correction},
                    {"correction_bound", r.correction_bound},
                    {"lambda_centered_max", r.lambda_centered_max}});
    plot.rows.push_back({static_cast<double>(r.n), r.mean, r.median, r.q95, r.max, r.correction_bound});
    rep.check(tag("lambda_correction_within_bound", r.n), r.correction, "<=", r.correction_bound);
  }
  rep.results["class"] = BVectorClass{gc.j, gc.parity}.name() + " x half-lines";
  rep.results["model"] = gc.model.id();
  rep.results["replicates"] = gc.replicates;
  rep.results["rows"] = rows;
  rep.plots.push_back(plot);

  if (!out.rows.empty()) {
    const auto& last = out.rows.back();
    rep.check(tag("mean_deviation", last.n), last.mean, "<=", dev_tol);
  }
  for (std::size_t k = 0; k + 1 < out.rows.size(); ++k) {
    const auto& a = out.rows[k];
    const auto& b = out.rows[k + 1];
    if (b.n != 10 * a.n) continue;
    const double ratio = b.mean > 0.0 ? a.mean / b.mean : std::numeric_limits<double>::infinity();
    rep.check("decade_decrease[n=" + std::to_string(a.n) + "->" + std::to_string(b.n) + "]", ratio, ">=", decade);
  }

  // Net sandwich around the exact statistic on the first replicate of the smallest n.
  if (!out.rows.empty()) {
    const std::size_t n = out.rows.front().n;
    const Sample sample = draw_sample(gc.model, n, sub_seed(gc.seed, "gc", n, 0));
    const double exact = out.rows.front().deviations.front();
    const double u = real_or(cfg, "run.net_u", 0.01);
    const auto cls = ProductClass::make(BVectorClass{gc.j, gc.parity}, GClass{GKind::half_lines}, Taxonomy::ub_mvc);
    try {
      const auto sw = sup_deviation_net(cls, sample, u, Centering::lambda_n, exec);
      rep.results["sandwich"] = {{"n", n}, {"net_u", u}, {"net_size", sw.net_size},
                                 {"lower", sw.lower}, {"exact", exact}, {"upper", sw.upper}};
      rep.check(tag("sandwich_lower", n), sw.lower, "<=", exact, 1e-12);
      rep.check(tag("sandwich_upper", n), exact, "<=", sw.upper, 1e-12);
    } catch (const NetTooLarge& e) {
      rep.results["sandwich"] = {{"n", n}, {"net_u", u}, {"skipped", e.what()}};
    }
  }
}

// ---------------------------------------------------------------- bounds

struct BoundsTally {
  std::size_t members = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max observed / bound
};

double nested_series_quadrature(double c, int D1, int D2, double rel_tol) {
  // Tail beyond `top` carries less than 1e-18 relative mass for the grid used here.
  const double top = 1.0 + (60.0 + 4.0 * (D1 + D2 + 2)) / c;
  const double scale = series_I_closed_form(c, D1, D2);
  const double outer_tol = rel_tol * 1e-3 * scale;
  const double inner_tol = outer_tol * 1e-2 / (top - 1.0);
  auto inner = [&](double y) {
    QuadOptions opt;
    opt.tol = inner_tol;
    const double v = integrate([&](double x) { return std::pow(x, D2) * std::exp(-c * x); }, y, top, opt).value;
    return std::pow(y, D1) * v;
  };
  QuadOptions opt;
  opt.tol = outer_tol;
  return integrate(inner, 1.0, top, opt).value;
}

void run_bounds(const ExperimentConfig& cfg, ExperimentReport& rep, Exec exec) {
  const std::uint64_t seed = cfg.seed();
  const auto n_list = sizes_or(cfg, "run.n_list", {10, 100, 1000});
  const auto members = static_cast<std::size_t>(int_or(cfg, "run.trials", 1000));

  Json gap = Json::array();
  std::size_t total_violations = 0;
  const std::vector<BVectorClass> sets = {{0, Parity::odd}, {1, Parity::odd}, {2, Parity::odd},
                                          {1, Parity::even}, {2, Parity::even}};
  for (const auto& cls : sets) {
    Rng rng(derive_seed(seed, {std::string("bounds-member"), cls.name()}));
    std::vector<IntervalUnion> family;
    for (std::size_t m = 0; m < members; ++m) family.push_back(cls.random_member(rng));
    for (std::size_t n : n_list) {
      const auto nn = static_cast<std::int64_t>(n);
      const Rational bound(cls.parity == Parity::odd ? 2 * (2 * cls.j + 1) : 4 * cls.j, nn);
      BoundsTally t;
      for (const auto& B : family) {
        const Rational g = observed_riemann_gap(B, nn);
        ++t.members;
        if (g > bound) ++t.violations;
        t.worst_ratio = std::max(t.worst_ratio, bound.num() ? (g / bound).to_double() : 0.0);
      }
      total_violations += t.violations;
      gap.push_back({{"class", cls.name()}, {"n", n}, {"bound", bound.to_double()}, {"members", t.members},
                     {"violations", t.violations}, {"worst_ratio", t.worst_ratio}});
    }
  }
  for (double beta : {0.5, 1.0}) {
    const HolderClass cls{1.0, 1.0, beta};
    const std::string name = "holder(T=1,C=1,beta=" + std::string(beta == 1.0 ? "1" : "0.5") + ")";
    Rng rng(derive_seed(seed, {std::string("bounds-member"), name}));
    std::vector<HolderFunction> family;
    for (std::size_t m = 0; m < members; ++m) family.push_back(cls.random_member(rng));
    for (std::size_t n : n_list) {
      const double bound = cls.riemann_gap_bound(n);
      std::vector<double> g(family.size());
      parallel_for(family.size(), exec, [&](std::size_t m) { g[m] = observed_riemann_gap(family[m], n); });
      BoundsTally t;
      for (double v : g) {
        ++t.members;
        if (v > bound * (1.0 + 1e-12)) ++t.violations;
        t.worst_ratio = std::max(t.worst_ratio, v / bound);
      }
      total_violations += t.violations;
      gap.push_back({{"class", name}, {"n", n}, {"bound", bound}, {"members", t.members},
                     {"violations", t.violations}, {"worst_ratio", t.worst_ratio}});
    }
  }
  rep.results["riemann_gap"] = gap;
  rep.check("riemann_gap_violations", static_cast<double>(total_violations), "==", 0.0);

  // Witness sets: λ_n(B_n) = 0 while λ(B_n) = 1 - 2^{-n}.
  Json wit = Json::array();
  bool witness_ok = true;
  for (std::int64_t n = 1; n <= 20; ++n) {
    const IntervalUnion B = b_infinity_witness(n);
    const Rational ln = B.lambda_n(n);
    const Rational g = observed_riemann_gap(B, n);
    const Rational expect = Rational(1) - Rational(1, std::int64_t{1} << n);
    witness_ok = witness_ok && ln == Rational(0) && g == expect;
    wit.push_back({{"n", n}, {"lambda_n", ln.to_double()}, {"gap", g.to_double()}, {"gap_exact", g.str()}});
  }
  rep.results["witness"] = wit;
  rep.check_flag("witness_gap_is_one_minus_two_pow_minus_n", witness_ok);

  // Tail bound values and a Monte Carlo exceedance estimate.
  Json tail = Json::array();
  for (auto [eps, k, S] : {std::tuple{0.5, std::int64_t{10000}, 1}, std::tuple{0.5, std::int64_t{2000}, 1},
                           std::tuple{0.1, std::int64_t{1000}, 1}, std::tuple{0.5, std::int64_t{10}, 1}}) {
    const auto b = gc_tail_bound(eps, k, S);
    tail.push_back({{"epsilon", eps}, {"k", k}, {"S", S}, {"value", b.value}, {"log_value", b.log_value},
                    {"applicable", b.applicable}, {"vacuous", b.vacuous}});
  }
  rep.results["tail_bound"] = tail;
  {
    const double eps = 0.5;
    const std::size_t k = 2000;
    GCConfig gc;
    gc.n_schedule = {k};
    gc.replicates = static_cast<std::size_t>(int_or(cfg, "run.replicates", 50));
    gc.seed = sub_seed(seed, "tail-exceedance");
    const auto out = gc_experiment(gc, exec);
    std::size_t hits = 0;
    for (double d : out.rows.front().deviations) hits += d > eps;
    const double frac = static_cast<double>(hits) / static_cast<double>(gc.replicates);
    const auto b = gc_tail_bound(eps, static_cast<std::int64_t>(k), 1);
    rep.results["tail_exceedance"] = {{"epsilon", eps}, {"k", k}, {"replicates", gc.replicates},
                                      {"fraction", frac}, {"bound", b.value}};
    rep.check("tail_exceedance_fraction", frac, "<=", b.value);
  }

  // Closed-form double integral against nested quadrature, and monotonicity in c.
  const double series_tol = cfg.real("tolerance.series");
  Json series = Json::array();
  double worst_rel = 0.0;
  bool monotone = true;
  for (int D1 = 0; D1 <= 2; ++D1)
    for (int D2 = 0; D2 <= 2; ++D2) {
      double prev = std::numeric_limits<double>::infinity();
      for (double c : {0.5, 1.0, 2.0}) {
        const double closed = series_I_closed_form(c, D1, D2);
        const double quad = nested_series_quadrature(c, D1, D2, series_tol);
        const double rel = std::abs(closed - quad) / std::abs(quad);
        worst_rel = std::max(worst_rel, rel);
        monotone = monotone && closed < prev;
        prev = closed;
        series.push_back({{"c", c}, {"D1", D1}, {"D2", D2}, {"closed_form", closed}, {"quadrature", quad},
                          {"relative_error", rel}});
      }
    }
  rep.results["series_I"] = series;
  rep.check("series_I_relative_error", worst_rel, "<=", series_tol);
  rep.check_flag("series_I_decreasing_in_c", monotone);

  const auto N = static_cast<std::size_t>(cfg.integer("run.series_N"));
  Json verdicts = Json::array();
  for (auto [c, want] : {std::pair{0.5, SeriesVerdict::divergent}, std::pair{std::numbers::ln2, SeriesVerdict::divergent},
                         std::pair{2.0, SeriesVerdict::convergent}}) {
    for (int D : {0, 1}) {
      const auto s = series_S_diagnostic(D, c, N);
      verdicts.push_back({{"c", c}, {"D", D}, {"N", N}, {"verdict", verdict_name(s.verdict)},
                          {"log_partial_sum", s.log_partial_sums.empty() ? 0.0 : s.log_partial_sums.back()},
                          {"last_increment_ratio", s.last_increment_ratio}});
      rep.check_flag("series_S_verdict[c=" + std::to_string(c) + ",D=" + std::to_string(D) + "]=" +
                         verdict_name(want),
                     s.verdict == want);
    }
  }
  rep.results["series_S"] = verdicts;
}

// ---------------------------------------------------------------- covering

std::uint64_t sauer_bound(std::size_t m, int d) {
  std::uint64_t total = 0, binom = 1;
  for (int i = 0; i <= d && static_cast<std::size_t>(i) <= m; ++i) {
    total += binom;
    binom = binom * (m - i) / (i + 1);
  }
  return total;
}

std::vector<double> distinct_points(Rng& rng, std::size_t k) {
  std::vector<double> pts;
  while (pts.size() < k) {
    const double x = rng.uniform01();
    if (x > 0.0 && std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
  }
  return pts;
}

void run_covering(const ExperimentConfig& cfg, ExperimentReport& rep, Exec exec) {
  const std::uint64_t seed = cfg.seed();
  const auto trials = static_cast<std::size_t>(int_or(cfg, "run.trials", 1000));

  const LemmaReport lemmas = check_covering_lemmas(trials, sub_seed(seed, "lemmas"), false, exec);
  auto lemma_json = [](const std::vector<LemmaResult>& v) {
    Json out = Json::array();
    for (const auto& l : v)
      out.push_back({{"lemma", l.lemma}, {"trials", l.trials}, {"violations", l.violations},
                     {"worst_margin", l.worst_margin}, {"worst_case", l.worst_case}});
    return out;
  };
  rep.results["lemmas"] = lemma_json(lemmas.lemmas);
  rep.results["diagnostics"] = lemma_json(lemmas.diagnostics);
  for (const auto& l : lemmas.lemmas)
    rep.check("lemma_violations[" + l.lemma + "]", static_cast<double>(l.violations), "==", 0.0);

  // Shatter coefficients.
  Json shat = Json::array();
  Rng rng(sub_seed(seed, "shatter-points"));
  ShatterClass half{ShatterClass::Kind::half_lines, {}};
  ShatterClass b1{ShatterClass::Kind::bvector, BVectorClass{0, Parity::odd}};
  ShatterClass b3{ShatterClass::Kind::bvector, BVectorClass{1, Parity::odd}};
  bool linear_ok = true;
  for (std::size_t k = 1; k <= 12; ++k) {
    const auto pts = distinct_points(rng, k);
    for (const auto* cls : {&half, &b1}) {
      const auto r = shatter_coefficient(*cls, pts);
      linear_ok = linear_ok && r.coefficient == k + 1;
      shat.push_back({{"class", r.class_id}, {"points", k}, {"coefficient", r.coefficient}});
    }
  }
  rep.check_flag("shatter_half_lines_and_B1_equal_k_plus_1", linear_ok);
  const auto three = shatter_coefficient(b3, {0.2, 0.5, 0.8});
  rep.check("shatter_B3_three_points", static_cast<double>(three.coefficient), "==", 8.0);
  std::size_t shattered4 = 0;
  std::uint64_t max4 = 0;
  const std::size_t sets4 = static_cast<std::size_t>(int_or(cfg, "run.trials", 1000));
  for (std::size_t t = 0; t < sets4; ++t) {
    const auto r = shatter_coefficient(b3, distinct_points(rng, 4));
    max4 = std::max(max4, r.coefficient);
    shattered4 += r.coefficient == 16;
  }
  rep.results["shatter"] = shat;
  rep.results["B3_four_point_sets"] = {{"sets", sets4}, {"shattered", shattered4}, {"max_coefficient", max4}};
  rep.check("shatter_B3_four_point_sets_shattered", static_cast<double>(shattered4), "==", 0.0);
  bool sauer_ok = true;
  for (std::size_t m = 1; m <= 10; ++m) {
    const auto r = shatter_coefficient(b3, distinct_points(rng, m));
    sauer_ok = sauer_ok && r.coefficient <= sauer_bound(m, 3);
  }
  rep.check_flag("shatter_B3_within_sauer_bound", sauer_ok);

  // Covering numbers of a fixed product net under the random metric d1_Pn.
  const auto cls = ProductClass::make(BVectorClass{static_cast<int>(cfg.integer("class.j")), parity_of(cfg)},
                                      GClass{GKind::half_lines}, Taxonomy::ub_mvc);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 20; ++s) seeds.push_back(derive_seed(seed, {std::string("covering-seed"), s}));
  const double tau = cfg.real("run.tau");
  const auto cb = random_covering_boundedness(cls, tau, sizes_or(cfg, "run.n_list", {10, 100, 1000}), seeds, 21, 21, exec);
  Json rows = Json::array();
  for (const auto& r : cb.rows)
    rows.push_back({{"n", r.n}, {"seed", r.seed}, {"greedy", r.check.greedy_F},
                    {"product_net", r.check.product_net_size}, {"product_net_covers", r.check.product_net_covers},
                    {"packing_bound", r.check.packing_bound}});
  rep.results["random_covering"] = {{"tau", cb.tau}, {"family_size", cb.family_size}, {"max_observed", cb.max_observed},
                                    {"max_bound", cb.max_bound}, {"rows", rows}};
  rep.check("random_covering_max", static_cast<double>(cb.max_observed), "<=", static_cast<double>(cb.max_bound));
  rep.check_flag("random_covering_within_bound", cb.all_within_bound);
}

// ---------------------------------------------------------------- kiefer

void run_kiefer(const ExperimentConfig& cfg, ExperimentReport& rep, Exec exec) {
  const std::uint64_t seed = cfg.seed();
  const double tol = cfg.real("tolerance.kernel");
  const NuModel uni = NuModel::uniform01();

  const std::vector<double> grid = {0.25, 0.5, 0.75};
  std::vector<QFunction> cells;
  std::vector<std::pair<double, double>> at;
  for (double s : grid)
    for (double x : grid) {
      cells.push_back(kiefer_cell(s, x));
      at.emplace_back(s, x);
    }
  double err_product = 0.0, err_generic = 0.0;
  for (std::size_t a = 0; a < cells.size(); ++a)
    for (std::size_t b = 0; b < cells.size(); ++b) {
      const double want = kiefer_covariance(at[a].first, at[a].second, at[b].first, at[b].second);
      err_product = std::max(err_product, std::abs(cov_kernel(cells[a], cells[b], KernelMode::product, uni) - want));
      err_generic = std::max(err_generic, std::abs(cov_kernel(cells[a], cells[b], KernelMode::generic, uni) - want));
    }
  rep.results["kiefer_grid"] = {{"s", grid}, {"x", grid}, {"max_error_product", err_product},
                                {"max_error_generic", err_generic}};
  rep.check("kiefer_closed_form_product_mode", err_product, "<=", tol);
  rep.check("kiefer_closed_form_generic_mode", err_generic, "<=", tol);

  // Random product pairs: factorized kernel against nested quadrature.
  const auto pairs = static_cast<std::size_t>(int_or(cfg, "run.trials", 100));
  const HolderClass hc{1.0, 1.0, 1.0};
  const GClass gh{GKind::half_lines};
  const GClass gp{GKind::polynomials, 2, 1.0};
  Rng rng(sub_seed(seed, "kernel-pairs"));
  std::vector<std::pair<QFunction, QFunction>> qs;
  for (std::size_t t = 0; t < pairs; ++t) {
    auto make = [&] {
      HolderFunction h = hc.random_member(rng);
      const bool pl = rng.uniform01() < 0.5;
      HFunc hf = pl ? HFunc::holder(HolderFunction(h.xs(), h.ys())) : HFunc::holder(h);
      const GFunc g = rng.uniform01() < 0.5 ? gh.random_member(rng, uni) : gp.random_member(rng, uni);
      return QFunction::product(hf, g);
    };
    QFunction q1 = make();
    QFunction q2 = make();
    qs.emplace_back(q1, q2);
  }
  std::vector<double> diff(pairs);
  parallel_for(pairs, exec, [&](std::size_t t) {
    diff[t] = std::abs(cov_kernel(qs[t].first, qs[t].second, KernelMode::product, uni) -
                       cov_kernel(qs[t].first, qs[t].second, KernelMode::generic, uni));
  });
  const double worst = pairs ? *std::max_element(diff.begin(), diff.end()) : 0.0;
  rep.results["mode_cross_validation"] = {{"pairs", pairs}, {"max_difference", worst}};
  rep.check("kernel_modes_agree", worst, "<=", tol);

  // Gaussian draws reproduce the assembled covariance.
  const Eigen::MatrixXd cov = covariance_matrix(cells, KernelMode::product, uni, 1e-11, exec);
  const auto draws_n = static_cast<std::size_t>(int_or(cfg, "run.replicates", 100000));
  const GaussianSampler sampler(cov);
  const Eigen::MatrixXd draws = gaussian_fidi_sample(cov, draws_n, sub_seed(seed, "kiefer-draws"));
  const Eigen::MatrixXd emp = sample_covariance(draws);
  const double cov_err = (emp - cov).cwiseAbs().maxCoeff();
  const double draw_tol = 0.005;
  rep.results["gaussian"] = {{"draws", draws_n}, {"min_eigenvalue", sampler.min_eigenvalue()},
                             {"analytic_cov", to_json(cov)}, {"empirical_cov", to_json(emp)},
                             {"max_error", cov_err}};
  rep.check("kiefer_cov_psd", sampler.min_eigenvalue(), ">=", 0.0, 1e-10 * cov.trace());
  rep.check("gaussian_empirical_cov", cov_err, "<=", draw_tol);
}

// ---------------------------------------------------------------- fclt

std::vector<QFunction> q_set(const std::string& name) {
  std::vector<QFunction> out;
  if (name == "kiefer-grid") {
    for (double s : {0.75, 1.0})
      for (double x : {0.4, 0.6}) out.push_back(kiefer_cell(s, x));
  } else {
    const HFunc ramp = HFunc::holder(HolderFunction({0.0, 1.0}, {0.0, 1.0}));
    const HFunc tent = HFunc::holder(HolderFunction({0.0, 0.5, 1.0}, {0.0, 0.5, 0.0}));
    for (const auto& h : {ramp, tent})
      for (double w : {0.4, 0.6}) out.push_back(QFunction::product(h, GFunc::half_line(w)));
  }
  return out;
}

void run_fclt(const ExperimentConfig& cfg, ExperimentReport& rep, Exec exec) {
  const std::uint64_t seed = cfg.seed();
  const NuModel model = model_of(cfg);
  const auto n_list = sizes_or(cfg, "run.n_list", {2000});
  const std::size_t n = n_list.back();
  const auto R = static_cast<std::size_t>(int_or(cfg, "run.replicates", 5000));
  rep.results["note"] =
      "weak convergence in l-infinity is checked through its two operational parts: "
      "finite-dimensional convergence and an equicontinuity modulus on nets";

  // Finite-dimensional distributions.
  const auto qs = q_set(cfg.str("run.q_set"));
  const auto fidi = fidi_convergence_test(qs, n, R, sub_seed(seed, "fclt-fidi"), model, cfg.real("tolerance.cov"),
                                          cfg.real("tolerance.ks"), 5, exec);
  Json labels = Json::array();
  for (const auto& q : qs) labels.push_back(q.label());
  const double ks_marg = fidi.ks_marginals.empty() ? 0.0 : *std::max_element(fidi.ks_marginals.begin(), fidi.ks_marginals.end());
  const double ks_comb =
      fidi.ks_combinations.empty() ? 0.0 : *std::max_element(fidi.ks_combinations.begin(), fidi.ks_combinations.end());
  rep.results["fidi"] = {{"q_set", cfg.str("run.q_set")}, {"q", labels}, {"n", n}, {"replicates", R},
                         {"analytic_cov", to_json(fidi.analytic_cov)}, {"empirical_cov", to_json(fidi.empirical_cov)},
                         {"max_cov_error", fidi.max_cov_error},
                         {"ks", {{"marginals", fidi.ks_marginals}, {"combinations", fidi.ks_combinations},
                                 {"directions", fidi.combinations}}}};
  rep.check("fidi_max_cov_error", fidi.max_cov_error, "<=", fidi.cov_tolerance);
  rep.check("fidi_ks_marginals", ks_marg, "<=", fidi.ks_tolerance);
  rep.check("fidi_ks_combinations", ks_comb, "<=", fidi.ks_tolerance);

  // Lindeberg ratios.
  const double lin_tol = cfg.real("tolerance.lindeberg");
  const auto mc = static_cast<std::size_t>(cfg.integer("run.mc_points"));
  {
    const auto eps = reals_or(cfg, "run.epsilon_list", {0.1, 0.2, 0.5});
    const auto lb = lindeberg_check(kiefer_cell(0.5, 0.5), {10, 100, 1000, 10000}, eps, NuModel::uniform01(), mc,
                                    sub_seed(seed, "lindeberg-bounded"), lin_tol, exec);
    Json th = Json::array();
    bool zero_beyond = true;
    for (const auto& [e, n0] : lb.thresholds) {
      th.push_back({{"epsilon", e}, {"threshold_n", n0}});
      for (const auto& r : lb.rows)
        if (r.epsilon == e && r.n >= n0) zero_beyond = zero_beyond && r.ratio == 0.0 && r.truncation_empty;
    }
    Json rows = Json::array();
    for (const auto& r : lb.rows)
      rows.push_back({{"n", r.n}, {"epsilon", r.epsilon}, {"ratio", r.ratio}, {"truncation_empty", r.truncation_empty}});
    rep.results["lindeberg_bounded"] = {{"q", "1{s<=0.5}1{x<=0.5}"}, {"sup_bound", lb.sup_bound}, {"method", lb.method},
                                        {"thresholds", th}, {"rows", rows}};
    rep.check_flag("lindeberg_bounded_zero_beyond_threshold", zero_beyond && !lb.thresholds.empty());
  }
  {
    const QFunction q = QFunction::product(HFunc::holder(HolderFunction({0.0, 1.0}, {0.0, 1.0})), GFunc::polynomial({0.0, 1.0}));
    const std::vector<std::size_t> ns = {100, 1000, 10000, 100000, 1000000};
    const auto lb = lindeberg_check(q, ns, {0.1}, NuModel::standard_normal(), mc,
                                    sub_seed(seed, "lindeberg-unbounded"), lin_tol, exec);
    PlotSeries plot{"fclt_lindeberg.csv", {"n", "lindeberg_ratio"}, {}};
    Json rows = Json::array();
    for (const auto& r : lb.rows) {
      rows.push_back({{"n", r.n}, {"epsilon", r.epsilon}, {"variance", r.variance}, {"ratio", r.ratio}});
      plot.rows.push_back({static_cast<double>(r.n), r.ratio});
    }
    rep.plots.push_back(plot);
    rep.results["lindeberg_unbounded"] = {{"q", "s*x"}, {"model", "standard-normal"}, {"method", lb.method},
                                          {"limit_variance", lb.limit_variance}, {"rows", rows}};
    rep.check("lindeberg_ratio[s*x,eps=0.1,n=" + std::to_string(ns.back()) + "]",
              lb.rows.empty() ? std::nan("") : lb.rows.back().ratio, "<=", lin_tol);
  }

  // Equicontinuity modulus on nets.
  const HolderClass hc{cfg.real("class.T"), cfg.real("class.C"), cfg.real("class.beta")};
  const auto alphas = reals_or(cfg, "run.alpha_list", {0.05, 0.1, 0.2, 0.4});
  const double net_u = real_or(cfg, "run.net_u", 1.5);
  {
    const auto mR = static_cast<std::size_t>(int_or(cfg, "run.modulus_replicates", 100));
    const auto mod = equicontinuity_modulus(hc, n, alphas, net_u, mR, sub_seed(seed, "fclt-modulus"), model,
                                            1000, exec);
    PlotSeries plot{"fclt_modulus.csv", {"alpha", "mean_modulus"}, {}};
    Json by = Json::array();
    for (std::size_t a = 0; a < mod.alphas.size(); ++a) {
      by.push_back({{"alpha", mod.alphas[a]}, {"mean_modulus", mod.mean_modulus[a]}});
      plot.rows.push_back({mod.alphas[a], mod.mean_modulus[a]});
    }
    rep.plots.push_back(plot);
    rep.results["modulus_by_alpha"] = by;
    rep.results["modulus"] = {{"n", n}, {"replicates", mR}, {"net_u", net_u}, {"h_net_size", mod.h_net_size},
                              {"g_net_size", mod.g_net_size}, {"small_to_large_ratio", mod.small_to_large_ratio}};
    rep.check_flag("modulus_monotone_in_alpha", mod.monotone);
    rep.check("modulus_small_to_large_ratio", mod.small_to_large_ratio, "<=", cfg.real("tolerance.modulus_ratio"));
  }

  // Deterministic fluctuation bound.
  {
    const auto fl = fluctuation_bound_check(hc, {100, 1000}, alphas, net_u, model, 100, exec);
    Json rows = Json::array();
    double unit_excess = -std::numeric_limits<double>::infinity();
    for (const auto& r : fl.rows) {
      rows.push_back({{"n", r.n}, {"alpha", r.alpha}, {"observed", r.observed}, {"oscillation", r.oscillation},
                      {"bound", r.bound}, {"unit_bound", r.unit_bound}});
      unit_excess = std::max(unit_excess, r.observed - r.unit_bound);
    }
    rep.results["fluctuation"] = {{"h_envelope", fl.h_envelope}, {"g_second_moment", fl.g_second_moment}, {"rows", rows}};
    rep.check_flag("fluctuation_within_bound", fl.within_bound);
    rep.check("fluctuation_unit_bound_excess", fl.rows.empty() ? 0.0 : unit_excess, "<=", 0.0, 1e-12);
  }

  // (λ_n⊗ν)(q²) → (λ⊗ν)(q²).
  {
    const QFunction q = QFunction::product(HFunc::holder(HolderFunction({0.0, 1.0}, {0.0, 1.0})), GFunc::constant(1.0));
    const auto ql = quadrature_limit_check(q, {10, 100, 1000, 10000}, model, 1e-2);
    Json rows = Json::array();
    for (const auto& r : ql.rows) rows.push_back({{"n", r.n}, {"discrete", r.discrete}, {"gap", r.gap}});
    rep.results["quadrature_limit"] = {{"q", "s"}, {"limit", ql.limit}, {"rows", rows}};
    rep.check("quadrature_limit_gap", ql.rows.empty() ? 0.0 : ql.rows.back().gap, "<=", ql.tolerance);
  }
}

// ---------------------------------------------------------------- selftest

// Small, fast instances of every experiment; statistical tolerances are
// widened to what the reduced sample sizes support.
void run_selftest(const ExperimentConfig& cfg, ExperimentReport& rep, Exec exec) {
  const std::uint64_t seed = cfg.seed();
  struct Part {
    const char* id;
    std::vector<std::pair<const char*, const char*>> keys;
    void (*fn)(const ExperimentConfig&, ExperimentReport&, Exec);
  };
  const std::vector<Part> parts = {
      {"ulln",
       {{"run.n_list", "50,500"}, {"run.replicates", "40"}, {"run.net_u", "0.05"}, {"tolerance.deviation", "0.2"},
        {"tolerance.decade_factor", "1.5"}},
       run_ulln},
      {"bounds", {{"run.n_list", "10,100"}, {"run.trials", "100"}, {"run.replicates", "5"}, {"run.series_N", "500"}}, run_bounds},
      {"covering", {{"run.trials", "60"}, {"run.n_list", "10,50"}}, run_covering},
      {"kiefer", {{"run.trials", "5"}, {"run.replicates", "200000"}}, run_kiefer},
      {"fclt",
       {{"run.n_list", "200"}, {"run.replicates", "400"}, {"run.modulus_replicates", "5"}, {"run.alpha_list", "0.1,0.4"},
        {"tolerance.cov", "0.2"}, {"tolerance.ks", "0.15"}, {"tolerance.modulus_ratio", "1"}},
       run_fclt},
  };
  for (const auto& p : parts) {
    ExperimentConfig sub;
    sub.set("experiment.id", p.id);
    sub.set("experiment.seed", std::to_string(derive_seed(seed, {std::string("selftest"), std::string(p.id)})));
    for (const auto& [k, v] : p.keys) sub.set(k, v);
    ExperimentReport part;
    part.experiment = p.id;
    part.seed = sub.seed();
    p.fn(sub, part, exec);
    rep.results[p.id] = {{"seed", part.seed}, {"results", part.results}};
    for (auto e : part.ledger) {
      e.check = std::string(p.id) + "/" + e.check;
      rep.ledger.push_back(std::move(e));
    }
  }
}

}  // namespace

const std::map<std::string, ExperimentFn>& experiment_registry() {
  static const std::map<std::string, ExperimentFn> reg = {
      {"bounds", run_bounds}, {"covering", run_covering}, {"fclt", run_fclt},
      {"kiefer", run_kiefer}, {"selftest", run_selftest}, {"ulln", run_ulln},
  };
  return reg;
}

}  // namespace semproc
