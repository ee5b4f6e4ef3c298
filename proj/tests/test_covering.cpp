#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "semproc/covering.hpp"
#include "semproc/error.hpp"

using namespace semproc;

namespace {
DistanceMatrix line(const std::vector<double>& pts) {
  return DistanceMatrix::build(pts.size(), [&](std::size_t i, std::size_t j) { return std::abs(pts[i] - pts[j]); });
}
}  // namespace

TEST_CASE("covering numbers on the line") {
  const auto d = line({0, 1, 2, 3});
  CHECK(exact_covering_number(d, 0.6) == 4);
  CHECK(exact_covering_number(d, 10.0) == 1);
  CHECK(exact_covering_number(d, 1.5) == 2);
  // Strict inequality: distance exactly u does not cover.
  CHECK(exact_covering_number(d, 1.0) == 4);
  const auto cn = covering_number(d, 0.6);
  CHECK(cn.greedy == 4);
  REQUIRE(cn.exact);
  CHECK(*cn.exact == 4);
}

TEST_CASE("exhaustive covering matches the brute-force oracle") {
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 9));
    std::vector<double> pts(n);
    for (auto& p : pts) p = static_cast<double>(rng.uniform_int(0, 10));
    const auto d = line(pts);
    const double u = rng.uniform_int(1, 6) * 0.5;
    CHECK(exact_covering_number(d, u) == oracle::covering_number(n, [&](std::size_t a, std::size_t b) { return d(a, b); }, u));
    const auto g = greedy_net(d, u);
    CHECK(g.size() >= exact_covering_number(d, u));
  }
}

TEST_CASE("greedy nets cover") {
  const auto d = line({0, 0.2, 0.9, 1.7, 3.0, 3.1});
  for (double u : {0.1, 0.5, 1.0, 5.0}) {
    const auto c = greedy_net(d, u);
    for (std::size_t p = 0; p < d.size(); ++p) {
      bool hit = false;
      for (auto k : c) hit = hit || d(p, k) < u;
      CHECK(hit);
    }
  }
}

TEST_CASE("pseudo-metric examples") {
  MetricContext ctx;
  const auto a = HFunc::indicator(IntervalUnion::initial(Rational(1, 4)));
  const auto b = HFunc::indicator(IntervalUnion::initial(Rational(1, 2)));
  CHECK(eval_pseudometric(Metric::d2_lambda, a, b, ctx) == doctest::Approx(0.5));
  CHECK(eval_pseudometric(Metric::d2_lambda, a, a, ctx) == 0.0);
  Sample s;
  s.n = 1;
  s.values = {0.4};
  ctx.sample = &s;
  ctx.n = 1;
  CHECK(eval_pseudometric(Metric::d1_Pn, QFunction::constant(0.3), QFunction::constant(1.0), ctx) ==
        doctest::Approx(0.7));
}

TEST_CASE("covering lemmas hold on random spaces") {
  const auto rep = check_covering_lemmas(300, 99);
  CHECK(rep.lemmas.size() == 4);
  CHECK(rep.total_violations() == 0);
  for (const auto& l : rep.lemmas) CHECK(l.trials == 300);
}

TEST_CASE("product of two 3-point spaces") {
  const auto dh = line({0, 1, 2});
  const auto dg = line({0, 0.5, 5});
  const auto r = check_product_cover(dh, dg, 0.5, [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return dh(i, k) + dg(j, l);
  });
  CHECK(r.product_net_covers);
  CHECK(r.greedy_F <= r.packing_bound);
}

TEST_CASE("isometric relabeling keeps covering numbers") {
  const std::vector<double> pts = {0, 0.3, 1.1, 2.0, 2.2};
  const auto d = line(pts);
  const std::vector<std::size_t> perm = {3, 0, 4, 1, 2};
  const auto e = DistanceMatrix::build(5, [&](std::size_t i, std::size_t j) { return d(perm[i], perm[j]); });
  for (double u : {0.25, 0.5, 1.0, 3.0}) CHECK(exact_covering_number(d, u) == exact_covering_number(e, u));
}

TEST_CASE("shatter coefficients against brute force") {
  ShatterClass half{ShatterClass::Kind::half_lines, {}};
  CHECK(shatter_coefficient(half, {0.1, 0.5, 0.9}).coefficient == 4);
  Rng rng(4);
  for (int t = 0; t < 40; ++t) {
    const std::size_t k = static_cast<std::size_t>(rng.uniform_int(1, 7));
    std::vector<double> pts;
    while (pts.size() < k) {
      const double x = 0.01 + 0.98 * rng.uniform01();
      if (std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
    }
    CHECK(shatter_coefficient(half, pts).coefficient == oracle::shatter_count_half_lines(pts));
    CHECK(shatter_coefficient(half, pts).coefficient == k + 1);
    for (const BVectorClass cls : {BVectorClass{0, Parity::odd}, BVectorClass{1, Parity::odd}, BVectorClass{1, Parity::even},
                                   BVectorClass{2, Parity::even}}) {
      ShatterClass sc{ShatterClass::Kind::bvector, cls};
      CHECK(shatter_coefficient(sc, pts).coefficient == oracle::shatter_count_bvector(cls, pts));
    }
  }
  ShatterClass b3{ShatterClass::Kind::bvector, BVectorClass{1, Parity::odd}};
  CHECK(shatter_coefficient(b3, {0.2, 0.5, 0.8}).coefficient == 8);
  CHECK(shatter_coefficient(b3, {0.2, 0.4, 0.6, 0.8}).coefficient == 15);
  std::vector<double> many(21, 0.0);
  for (std::size_t i = 0; i < many.size(); ++i) many[i] = (i + 1) / 22.0;
  try {
    (void)shatter_coefficient(half, many);
    FAIL("expected instance-too-large");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::instance_too_large);
  }
}

TEST_CASE("random covering numbers stay bounded") {
  const auto cls = ProductClass::make(BVectorClass{0, Parity::odd}, GClass{GKind::half_lines}, Taxonomy::ub_mvc);
  const auto rep = random_covering_boundedness(cls, 0.5, {10, 100}, {1, 2, 3});
  CHECK(rep.rows.size() == 6);
  CHECK(rep.all_within_bound);
  const auto big = random_covering_boundedness(cls, 2.0, {10}, {1});
  CHECK(big.max_observed == 1);
}
