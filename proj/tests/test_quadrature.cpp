#include <cmath>
#include <vector>

#include "doctest.h"
#include "semproc/error.hpp"
#include "semproc/quadrature.hpp"

using namespace semproc;

TEST_CASE("polynomials and smooth integrands") {
  CHECK(integrate([](double x) { return x; }, 0.0, 1.0, {1e-10}).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 2.0, {1e-12}).value ==
        doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-11));
  CHECK(integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, {1e-10}).value ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("breakpoints handle jumps exactly") {
  const std::vector<double> br = {0.3};
  const auto r = integrate([](double x) { return x <= 0.3 ? 1.0 : 0.0; }, 0.0, 1.0, {1e-12}, br);
  CHECK(r.value == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("reversed and empty ranges") {
  CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0).value == 0.0);
  CHECK(integrate([](double x) { return x; }, 1.0, 0.0, {1e-10}).value == doctest::Approx(-0.5));
}

TEST_CASE("depth cap raises with a partial value") {
  QuadOptions opt;
  opt.tol = 1e-300;
  opt.max_depth = 4;
  opt.max_intervals = 64;
  try {
    (void)integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, opt);
    FAIL("expected quadrature failure");
  } catch (const QuadratureError& e) {
    CHECK(e.code() == Errc::quadrature_failure);
    CHECK(std::isfinite(e.partial_value()));
  }
}
