#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "semproc/rational.hpp"

namespace semproc {

// Finite union of half-open intervals (a, b] inside [0, 1] with exact
// rational endpoints. Stored normalized: sorted, nonempty, non-touching.
class IntervalUnion {
 public:
  using Interval = std::pair<Rational, Rational>;

  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<Interval> pieces);

  static IntervalUnion full() { return IntervalUnion({{Rational(0), Rational(1)}}); }
  static IntervalUnion initial(const Rational& t) { return IntervalUnion({{Rational(0), t}}); }

  const std::vector<Interval>& pieces() const noexcept { return pieces_; }
  bool empty() const noexcept { return pieces_.empty(); }
  std::size_t size() const noexcept { return pieces_.size(); }

  bool contains(const Rational& x) const;
  bool contains(double x) const;
  // Exact membership of the grid point i/n.
  bool contains_grid(std::int64_t i, std::int64_t n) const;

  // card(B ∩ {i/n : i = 1..n})
  std::int64_t grid_count(std::int64_t n) const;
  Rational lambda_n(std::int64_t n) const { return Rational(grid_count(n), n); }
  Rational lebesgue() const;

  IntervalUnion intersect(const IntervalUnion& other) const;
  IntervalUnion unite(const IntervalUnion& other) const;
  IntervalUnion symmetric_difference(const IntervalUnion& other) const;
  IntervalUnion complement() const;  // within (0, 1]

  std::vector<double> breakpoints() const;
  std::string str() const;

  friend bool operator==(const IntervalUnion& a, const IntervalUnion& b) { return a.pieces_ == b.pieces_; }

 private:
  std::vector<Interval> pieces_;
};

// Nearest rational k / 2^bits to x in [0,1] (exact dyadic snapping of doubles).
Rational dyadic(double x, int bits = 40);

}  // namespace semproc
