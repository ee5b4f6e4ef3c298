#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "semproc/error.hpp"
#include "semproc/ulln.hpp"

using namespace semproc;

TEST_CASE("single observation") {
  Sample s;
  s.n = 1;
  s.values = {0.5};
  CHECK(sup_deviation_exact_BW(0, Parity::odd, s).value == doctest::Approx(0.5));
  CHECK(sup_deviation_exact_BW_dp(0, Parity::odd, s).value == doctest::Approx(0.5));
}

TEST_CASE("exact sup deviation matches exhaustive enumeration") {
  Rng rng(17);
  for (int t = 0; t < 150; ++t) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 10));
    const int j = static_cast<int>(rng.uniform_int(0, 2));
    const Parity p = (j > 0 && rng.uniform01() < 0.5) ? Parity::even : Parity::odd;
    const NuModel m = rng.uniform01() < 0.7 ? NuModel::uniform01() : NuModel::standard_normal();
    const Sample s = draw_sample(m, n, rng.next());
    const double want = oracle::sup_deviation_BW(j, p, s);
    CHECK(sup_deviation_exact_BW(j, p, s).value == doctest::Approx(want).epsilon(1e-12));
    CHECK(sup_deviation_exact_BW_dp(j, p, s).value == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("fast path, dynamic program and execution modes agree") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Sample s = draw_sample(NuModel::uniform01(), 300, seed);
    const auto fast = sup_deviation_exact_BW(0, Parity::odd, s, Exec::parallel);
    const auto ser = sup_deviation_exact_BW(0, Parity::odd, s, Exec::serial);
    const auto dp = sup_deviation_exact_BW_dp(0, Parity::odd, s);
    CHECK(fast.value == ser.value);
    CHECK(fast.cut == ser.cut);
    CHECK(fast.value == doctest::Approx(dp.value).epsilon(1e-13));
  }
}

TEST_CASE("one-signed increments reduce to the full-grid statistic") {
  // Samples sorted in time order: the maximizing set is a prefix.
  Sample s = draw_sample(NuModel::uniform01(), 50, 9);
  std::sort(s.values.begin(), s.values.end());
  const double full = sup_deviation_exact_BW(0, Parity::odd, s).value;
  double ks = 0.0;
  for (std::size_t k = 0; k <= s.n; ++k) {
    const double lo = k == 0 ? 0.0 : s.values[k - 1], hi = k == s.n ? 1.0 : s.values[k];
    ks = std::max({ks, std::abs(static_cast<double>(k) / s.n - lo), std::abs(static_cast<double>(k) / s.n - hi)});
  }
  CHECK(full >= ks - 1e-15);
}

TEST_CASE("net sandwich brackets the exact statistic") {
  const auto cls = ProductClass::make(BVectorClass{0, Parity::odd}, GClass{GKind::half_lines}, Taxonomy::ub_mvc);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Sample s = draw_sample(NuModel::uniform01(), 80, seed);
    const double exact = sup_deviation_exact_BW(0, Parity::odd, s).value;
    for (Centering c : {Centering::lambda_n, Centering::lambda}) {
      const auto sw = sup_deviation_net(cls, s, 0.02, c);
      CHECK(sw.upper == doctest::Approx(sw.lower + 0.04));
      if (c == Centering::lambda_n) {
        CHECK(sw.lower <= exact + 1e-12);
        CHECK(exact <= sw.upper + 1e-12);
      }
    }
  }
  const auto poly = ProductClass::make(HolderClass{}, GClass{GKind::polynomials, 2, 1.0}, Taxonomy::nuG2_jvc);
  CHECK_THROWS_AS(sup_deviation_net(poly, draw_sample(NuModel::uniform01(), 10, 1), 0.5, Centering::lambda_n), Error);
}

TEST_CASE("oscillation stays under its closed-form bound") {
  const HolderClass cls{1.0, 1.0, 1.0};
  for (std::size_t n : {10u, 100u, 1000u}) {
    const auto r = oscillation_sup(cls, n, 1.0);
    CHECK(r.value <= cls.oscillation_sup_bound(n));
  }
  const auto h = HFunc::holder(HolderFunction({0.0, 1.0}, {0.0, 1.0}));
  CHECK(oscillation_sup(std::vector<HFunc>{h, h}, 50) == 0.0);
}

TEST_CASE("tail bound values") {
  const auto a = gc_tail_bound(0.5, 10000, 1);
  CHECK(a.value == doctest::Approx(9.41623e-30).epsilon(1e-5));
  CHECK(a.applicable);
  CHECK_FALSE(a.vacuous);
  const auto b = gc_tail_bound(1.0, 32, 1);
  CHECK(b.value == doctest::Approx(8.0 * 33.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(b.vacuous);
  CHECK(b.applicable);
  CHECK_FALSE(gc_tail_bound(1.0, 7, 1).applicable);
}

TEST_CASE("double integral closed form against quadrature") {
  CHECK(series_I_closed_form(1.0, 0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(series_I_closed_form(2.0, 0, 0) == doctest::Approx(std::exp(-2.0) / 4.0).epsilon(1e-14));
  boost::math::quadrature::exp_sinh<double> outer, inner;
  for (double c : {0.5, 1.0, 3.0})
    for (int D1 = 0; D1 <= 2; ++D1)
      for (int D2 = 0; D2 <= 2; ++D2) {
        auto f = [&](double t1) {
          const double y = 1.0 + t1;
          return std::pow(y, D1) *
                 inner.integrate([&](double t2) { return std::pow(y + t2, D2) * std::exp(-c * (y + t2)); }, 1e-14);
        };
        const double quad = outer.integrate(f, 1e-13);
        CHECK(series_I_closed_form(c, D1, D2) == doctest::Approx(quad).epsilon(1e-6));
      }
}

TEST_CASE("series verdicts") {
  CHECK(series_S_diagnostic(1, 2.0, 200).verdict == SeriesVerdict::convergent);
  CHECK(series_S_diagnostic(1, 2.0, 200).last_increment_ratio < 1e-12);
  CHECK(series_S_diagnostic(1, 0.5, 200).verdict == SeriesVerdict::divergent);
  const auto b = series_S_diagnostic(1, std::numbers::ln2, 200);
  CHECK(b.verdict == SeriesVerdict::divergent);
  for (double t : b.lower_bound_terms) CHECK(t == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(series_S_diagnostic(1, 2.0, 20000), Error);
}

TEST_CASE("quantiles") {
  CHECK(quantile_sorted({1.0, 2.0, 3.0, 4.0}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_sorted({1.0, 2.0, 3.0, 4.0}, 1.0) == 4.0);
  CHECK(quantile_sorted({5.0}, 0.95) == 5.0);
}

TEST_CASE("ULLN experiment is deterministic and mode independent") {
  GCConfig cfg;
  cfg.n_schedule = {50, 500};
  cfg.replicates = 20;
  cfg.seed = 5;
  const auto a = gc_experiment(cfg, Exec::parallel);
  const auto b = gc_experiment(cfg, Exec::serial);
  REQUIRE(a.rows.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(a.rows[k].deviations == b.rows[k].deviations);
    CHECK(a.rows[k].correction <= a.rows[k].correction_bound);
    CHECK(a.rows[k].lambda_centered_max == doctest::Approx(a.rows[k].max + a.rows[k].correction));
  }
  CHECK(a.rows[1].median < a.rows[0].median);
}
