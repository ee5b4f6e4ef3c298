#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace semproc {

struct QuadOptions {
  double tol = 1e-9;  // absolute error target for the whole integral
  int max_depth = 40;
  std::size_t max_intervals = 1u << 20;
  int initial_panels = 8;  // per breakpoint segment
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

// Globally adaptive Simpson with Richardson acceptance on [a, b]. Interior
// breakpoints (discontinuities, kinks) seed the initial partition. Throws
// QuadratureError with the partial value when the depth cap is reached
// before the error target.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {}, std::span<const double> breaks = {});

}  // namespace semproc
