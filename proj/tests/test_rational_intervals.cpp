#include "doctest.h"
#include "semproc/error.hpp"
#include "semproc/function_classes.hpp"
#include "semproc/interval_set.hpp"
#include "semproc/rational.hpp"
#include "semproc/rng.hpp"

using namespace semproc;

TEST_CASE("rational arithmetic reduces and compares exactly") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, -3) == Rational(-1, 3));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(1, 3) * Rational(3, 7) == Rational(1, 7));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(7, 3).floor_times(3) == 7);
  CHECK(Rational(1, 4).floor_times(10) == 2);
  CHECK_THROWS_AS(Rational(1, 0), Error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), Error);
}

TEST_CASE("rational overflow is reported") {
  const Rational big(std::int64_t{1} << 62, 1);
  try {
    (void)(big * big);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::overflow);
  }
}

TEST_CASE("interval unions normalize to sorted disjoint pieces") {
  IntervalUnion u({{Rational(1, 2), Rational(3, 4)}, {Rational(0), Rational(1, 4)}, {Rational(1, 4), Rational(1, 3)},
                   {Rational(1, 5), Rational(1, 5)}});
  REQUIRE(u.size() == 2);
  CHECK(u.pieces()[0] == IntervalUnion::Interval{Rational(0), Rational(1, 3)});
  CHECK(u.lebesgue() == Rational(1, 3) + Rational(1, 4));
}

TEST_CASE("half-open membership on the grid") {
  const IntervalUnion B({{Rational(2, 5), Rational(1)}});
  CHECK_FALSE(B.contains_grid(2, 5));  // 0.4 is the open end
  CHECK(B.contains_grid(3, 5));
  CHECK(B.contains_grid(5, 5));
  CHECK(B.contains(Rational(1)));
  CHECK_FALSE(B.contains(Rational(2, 5)));
}

TEST_CASE("grid counts") {
  CHECK(IntervalUnion::full().grid_count(7) == 7);
  CHECK(IntervalUnion::initial(Rational(1, 2)).grid_count(10) == 5);
  CHECK(IntervalUnion::initial(Rational(1, 4)).lambda_n(10) == Rational(1, 5));
  CHECK(IntervalUnion().grid_count(10) == 0);
}

TEST_CASE("grid count agrees with direct membership on random unions") {
  Rng rng(11);
  const BVectorClass cls{2, Parity::odd};
  for (int t = 0; t < 300; ++t) {
    const auto B = cls.random_member(rng);
    const std::int64_t n = rng.uniform_int(1, 200);
    std::int64_t direct = 0;
    for (std::int64_t i = 1; i <= n; ++i) direct += B.contains(Rational(i, n));
    CHECK(B.grid_count(n) == direct);
  }
}

TEST_CASE("set algebra on unions") {
  const IntervalUnion a({{Rational(0), Rational(1, 2)}});
  const IntervalUnion b({{Rational(1, 4), Rational(3, 4)}});
  CHECK(a.intersect(b) == IntervalUnion({{Rational(1, 4), Rational(1, 2)}}));
  CHECK(a.unite(b) == IntervalUnion({{Rational(0), Rational(3, 4)}}));
  CHECK(a.symmetric_difference(b).lebesgue() == Rational(1, 2));
  CHECK(a.complement() == IntervalUnion({{Rational(1, 2), Rational(1)}}));
}

TEST_CASE("dyadic snapping is exact for dyadic inputs") {
  CHECK(dyadic(0.75) == Rational(3, 4));
  CHECK(dyadic(0.0) == Rational(0));
  CHECK(dyadic(1.0) == Rational(1));
  CHECK(std::abs(dyadic(0.1).to_double() - 0.1) < 1e-12);
}

TEST_CASE("witness sets") {
  CHECK(b_infinity_witness(1) == IntervalUnion::initial(Rational(1, 2)));
  for (std::int64_t n = 1; n <= 20; ++n) {
    const auto B = b_infinity_witness(n);
    CHECK(B.lambda_n(n) == Rational(0));
    CHECK(observed_riemann_gap(B, n) == Rational(1) - Rational(1, std::int64_t{1} << n));
  }
  CHECK(observed_riemann_gap(b_infinity_witness(10), 10).to_double() == 0.9990234375);
}
