#include <cmath>

#include "doctest.h"
#include "semproc/error.hpp"
#include "semproc/fclt.hpp"

using namespace semproc;

namespace {
HFunc ramp() { return HFunc::holder(HolderFunction({0.0, 1.0}, {0.0, 1.0})); }
const NuModel uni = NuModel::uniform01();
}  // namespace

TEST_CASE("centering subtracts the conditional mean") {
  const QFunction q = QFunction::product(ramp(), GFunc::polynomial({0.0, 1.0}));
  const QFunction c = center_q(q, uni);
  for (double s : {0.0, 0.3, 1.0})
    for (double x : {0.0, 0.25, 0.9}) CHECK(c(s, x) == doctest::Approx(s * (x - 0.5)).epsilon(1e-13));
}

TEST_CASE("Z_n examples") {
  Sample one;
  one.n = 1;
  one.values = {0.3};
  const QFunction q = QFunction::product(HFunc::constant(1.0), GFunc::initial_interval(0.5));
  CHECK(eval_Zn({q}, one).values[0] == doctest::Approx(0.5).epsilon(1e-14));
  const Sample s = draw_sample(uni, 500, 4);
  CHECK(eval_Zn({QFunction::constant(3.7)}, s).values[0] == 0.0);
}

TEST_CASE("Z_n is linear in q") {
  const Sample s = draw_sample(uni, 400, 12);
  const QFunction a = kiefer_cell(0.5, 0.3);
  const QFunction b = QFunction::product(ramp(), GFunc::polynomial({0.1, 0.0, 1.0}));
  const QFunction comb = QFunction::combination({2.0, -0.5}, {a, b});
  const auto z = eval_Zn({a, b, comb}, s).values;
  CHECK(z[2] == doctest::Approx(2.0 * z[0] - 0.5 * z[1]).epsilon(1e-12));
}

TEST_CASE("Z_n moments match (λ_n⊗ν)(q̃²)") {
  const std::size_t n = 100, R = 4000;
  const QFunction q = kiefer_cell(0.6, 0.4);
  const ZnEvaluator ev({q}, n, uni);
  double s1 = 0, s2 = 0, s4 = 0;
  for (std::size_t r = 0; r < R; ++r) {
    const double z = ev(draw_sample(uni, n, 1000 + r))[0];
    s1 += z, s2 += z * z, s4 += z * z * z * z;
  }
  const double mean = s1 / R, m2 = s2 / R;
  const double var_target = lambda_n_nu_product(center_q(q, uni), center_q(q, uni), n, uni);
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(m2 / R));
  CHECK(std::abs(m2 - var_target) <= 3.0 * std::sqrt((s4 / R - m2 * m2) / R));
}

TEST_CASE("kernel values") {
  CHECK(kiefer_covariance(0.5, 0.5, 0.5, 0.5) == 0.125);
  for (KernelMode mode : {KernelMode::product, KernelMode::generic}) {
    CHECK(cov_kernel(kiefer_cell(0.5, 0.5), kiefer_cell(0.5, 0.5), mode, uni) == doctest::Approx(0.125).epsilon(1e-10));
    const QFunction flat = QFunction::product(ramp(), GFunc::constant(1.0));
    CHECK(cov_kernel(kiefer_cell(0.5, 0.5), flat, mode, uni) == doctest::Approx(0.0).epsilon(1e-12));
  }
  for (double s1 : {0.25, 0.5, 1.0})
    for (double x1 : {0.25, 0.75})
      for (double s2 : {0.5, 0.75})
        for (double x2 : {0.125, 0.5})
          CHECK(cov_kernel(kiefer_cell(s1, x1), kiefer_cell(s2, x2), KernelMode::product, uni) ==
                doctest::Approx(kiefer_covariance(s1, x1, s2, x2)).epsilon(1e-12));
}

TEST_CASE("kernel modes agree on random products") {
  Rng rng(31);
  const HolderClass hc{1.0, 1.0, 0.5};
  const GClass gp{GKind::polynomials, 2, 1.0};
  for (int t = 0; t < 10; ++t) {
    const QFunction a = QFunction::product(HFunc::holder(hc.random_member(rng)), gp.random_member(rng, uni));
    const QFunction b = QFunction::product(HFunc::holder(hc.random_member(rng)), GFunc::half_line(rng.uniform01()));
    CHECK(cov_kernel(a, b, KernelMode::product, uni) ==
          doctest::Approx(cov_kernel(a, b, KernelMode::generic, uni)).epsilon(1e-8));
  }
}

TEST_CASE("covariance matrices are symmetric and PSD") {
  std::vector<QFunction> cells;
  for (double s : {0.25, 0.5, 1.0})
    for (double x : {0.25, 0.5}) cells.push_back(kiefer_cell(s, x));
  const auto K = covariance_matrix(cells, KernelMode::product, uni, 1e-11, Exec::serial);
  CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(GaussianSampler(K).min_eigenvalue() >= -1e-10 * K.trace());
  CHECK(covariance_matrix(cells, KernelMode::product, uni, 1e-11, Exec::parallel) == K);
}

TEST_CASE("Gaussian sampler") {
  Eigen::MatrixXd v(1, 1);
  v << 0.3;
  const auto d = gaussian_fidi_sample(v, 100000, 2);
  CHECK(sample_covariance(d)(0, 0) == doctest::Approx(0.3).epsilon(0.05));
  const std::vector<QFunction> dup = {kiefer_cell(0.5, 0.5), kiefer_cell(0.5, 0.5)};
  const auto e = gaussian_fidi_sample(dup, KernelMode::product, uni, 1000, 3);
  CHECK((e.col(0) - e.col(1)).cwiseAbs().maxCoeff() <= 1e-9);
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  try {
    GaussianSampler g(bad);
    FAIL("expected not-psd");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::not_psd);
  }
}

TEST_CASE("KS distance") {
  CHECK(ks_distance_normal({0.0}, 1.0) == doctest::Approx(0.5));
  CHECK(ks_distance_normal({0.0, 0.0}, 0.0) == 0.0);
  Rng rng(6);
  std::vector<double> z(20000);
  for (auto& x : z) x = 2.0 * rng.normal();
  CHECK(ks_distance_normal(z, 4.0) < 0.015);
  CHECK(ks_distance_normal(z, 1.0) > 0.1);
}

TEST_CASE("fidi test on a small instance") {
  const std::vector<QFunction> qs = {kiefer_cell(0.5, 0.5), kiefer_cell(1.0, 0.25)};
  const auto rep = fidi_convergence_test(qs, 200, 1500, 7, uni, 0.05, 0.06, 3, Exec::parallel);
  CHECK(rep.max_cov_error < 0.02);
  CHECK(rep.ks_marginals.size() == 2);
  CHECK(rep.ks_combinations.size() == 3);
  const auto ser = fidi_convergence_test(qs, 200, 1500, 7, uni, 0.05, 0.06, 3, Exec::serial);
  CHECK(ser.empirical_cov == rep.empirical_cov);
  const auto flat = fidi_convergence_test({QFunction::constant(2.0)}, 50, 100, 1, uni);
  CHECK(flat.degenerate[0]);
  CHECK(flat.max_cov_error == 0.0);
  CHECK(flat.ks_marginals[0] == 0.0);
}

TEST_CASE("quadrature limit") {
  const QFunction q = QFunction::product(ramp(), GFunc::constant(1.0));
  const auto r = quadrature_limit_check(q, {10, 1000}, uni);
  CHECK(r.rows[0].gap == doctest::Approx(0.385 - 1.0 / 3.0).epsilon(1e-12));
  CHECK(r.pass);
  const auto c = quadrature_limit_check(QFunction::constant(2.0), {1, 7, 100}, uni);
  for (const auto& row : c.rows) CHECK(row.gap == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("truncated second moments") {
  const GFunc x = GFunc::polynomial({0.0, 1.0});
  const auto normal = NuModel::standard_normal();
  CHECK(truncated_second_moment(x, 0.0, normal) == doctest::Approx(1.0).epsilon(1e-12));
  // E[X² 1{|X| ≥ 1}] = 2(φ(1) + 1 - Φ(1)).
  const double phi1 = std::exp(-0.5) / std::sqrt(2.0 * M_PI);
  const double tail = 0.5 * std::erfc(1.0 / std::sqrt(2.0));
  CHECK(truncated_second_moment(x, 1.0, normal) == doctest::Approx(2.0 * (phi1 + tail)).epsilon(1e-10));
  const GFunc cubic = GFunc::polynomial({0.0, -1.0, 0.0, 1.0});
  // Crossings of |g| = 0.5 by scanning and bisection.
  std::vector<double> cuts;
  auto excess = [&](double v) { return std::abs(cubic(v)) - 0.5; };
  for (int k = 0; k < 8000; ++k) {
    double lo = -4.0 + k * 1e-3, hi = lo + 1e-3;
    if ((excess(lo) < 0) == (excess(hi) < 0)) continue;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((excess(lo) < 0) == (excess(mid) < 0) ? lo : hi) = mid;
    }
    cuts.push_back(0.5 * (lo + hi));
  }
  CHECK(cuts.size() == 2);
  const double quad = normal.expect([&](double v) {
    const double g = cubic(v);
    return std::abs(g) >= 0.5 ? g * g : 0.0;
  }, cuts, 1e-12);
  CHECK(truncated_second_moment(cubic, 0.5, normal) == doctest::Approx(quad).epsilon(1e-7));
}

TEST_CASE("Lindeberg ratios") {
  const auto bounded = lindeberg_check(kiefer_cell(0.5, 0.5), {10, 100, 1000}, {0.2}, uni);
  REQUIRE(bounded.thresholds.size() == 1);
  for (const auto& r : bounded.rows)
    if (r.n >= bounded.thresholds[0].second) CHECK(r.ratio == 0.0);
  CHECK(bounded.method == "closed-form");
  const QFunction sx = QFunction::product(ramp(), GFunc::polynomial({0.0, 1.0}));
  const auto unb = lindeberg_check(sx, {100, 10000, 1000000}, {0.1}, NuModel::standard_normal());
  CHECK(unb.pass);
  CHECK(unb.rows[0].ratio > unb.rows[1].ratio);
  const auto deg = lindeberg_check(QFunction::product(ramp(), GFunc::constant(1.0)), {10}, {0.1}, uni);
  CHECK(deg.degenerate);
  // A sum of products has no closed form: quadrature, or Monte Carlo in x.
  const QFunction mixed = QFunction::combination({1.0, 0.5}, {sx, QFunction::product(ramp(), GFunc::polynomial({0.0, 0.0, 1.0}))});
  const auto quad = lindeberg_check(mixed, {100}, {0.1}, NuModel::standard_normal());
  const auto mc = lindeberg_check(mixed, {100}, {0.1}, NuModel::standard_normal(), 50000, 5);
  CHECK(quad.method == "quadrature");
  CHECK(mc.method == "monte-carlo");
  CHECK(mc.rows[0].ratio == doctest::Approx(quad.rows[0].ratio).epsilon(0.05));
}

TEST_CASE("modulus and fluctuation checks") {
  const HolderClass cls{1.0, 1.0, 1.0};
  const auto m = equicontinuity_modulus(cls, 200, {0.0, 0.1, 0.4}, 1.5, 4, 3, uni, 50);
  CHECK(m.mean_modulus[0] == 0.0);
  CHECK(m.mean_modulus[1] <= m.mean_modulus[2]);
  const auto ser = equicontinuity_modulus(cls, 200, {0.0, 0.1, 0.4}, 1.5, 4, 3, uni, 50, Exec::serial);
  CHECK(ser.per_replicate == m.per_replicate);
  const auto f = fluctuation_bound_check(cls, {50}, {0.0, 0.2}, 1.5, uni, 20);
  CHECK(f.rows[0].observed == 0.0);
  CHECK(f.within_bound);
  CHECK(f.monotone_in_alpha);
}
