#include "semproc/interval_set.hpp"

#include <algorithm>
#include <cmath>

namespace semproc {

IntervalUnion::IntervalUnion(std::vector<Interval> pieces) {
  const Rational zero(0), one(1);
  std::vector<Interval> kept;
  for (auto [a, b] : pieces) {
    a = std::max(a, zero);
    b = std::min(b, one);
    if (a < b) kept.emplace_back(a, b);
  }
  std::sort(kept.begin(), kept.end(), [](const Interval& x, const Interval& y) { return x.first < y.first; });
  for (const auto& iv : kept) {
    if (!pieces_.empty() && iv.first <= pieces_.back().second) {
      pieces_.back().second = std::max(pieces_.back().second, iv.second);
    } else {
      pieces_.push_back(iv);
    }
  }
}

bool IntervalUnion::contains(const Rational& x) const {
  for (const auto& [a, b] : pieces_)
    if (a < x && x <= b) return true;
  return false;
}

bool IntervalUnion::contains(double x) const {
  for (const auto& [a, b] : pieces_)
    if (a.to_double() < x && x <= b.to_double()) return true;
  return false;
}

bool IntervalUnion::contains_grid(std::int64_t i, std::int64_t n) const {
  for (const auto& [a, b] : pieces_)
    if (a.floor_times(n) < i && i <= b.floor_times(n)) return true;
  return false;
}

std::int64_t IntervalUnion::grid_count(std::int64_t n) const {
  std::int64_t count = 0;
  for (const auto& [a, b] : pieces_) count += b.floor_times(n) - a.floor_times(n);
  return count;
}

Rational IntervalUnion::lebesgue() const {
  Rational total(0);
  for (const auto& [a, b] : pieces_) total = total + (b - a);
  return total;
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion& other) const {
  std::vector<Interval> out;
  for (const auto& [a, b] : pieces_)
    for (const auto& [c, d] : other.pieces_) {
      const Rational lo = std::max(a, c), hi = std::min(b, d);
      if (lo < hi) out.emplace_back(lo, hi);
    }
  return IntervalUnion(std::move(out));
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const {
  std::vector<Interval> all = pieces_;
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return IntervalUnion(std::move(all));
}

IntervalUnion IntervalUnion::complement() const {
  std::vector<Interval> out;
  Rational cursor(0);
  for (const auto& [a, b] : pieces_) {
    if (cursor < a) out.emplace_back(cursor, a);
    cursor = b;
  }
  if (cursor < Rational(1)) out.emplace_back(cursor, Rational(1));
  return IntervalUnion(std::move(out));
}

IntervalUnion IntervalUnion::symmetric_difference(const IntervalUnion& other) const {
  return intersect(other.complement()).unite(other.intersect(complement()));
}

std::vector<double> IntervalUnion::breakpoints() const {
  std::vector<double> out;
  for (const auto& [a, b] : pieces_) {
    out.push_back(a.to_double());
    out.push_back(b.to_double());
  }
  return out;
}

std::string IntervalUnion::str() const {
  if (pieces_.empty()) return "{}";
  std::string s;
  for (const auto& [a, b] : pieces_) {
    if (!s.empty()) s += " U ";
    s += "(" + a.str() + ", " + b.str() + "]";
  }
  return s;
}

Rational dyadic(double x, int bits) {
  const std::int64_t den = std::int64_t{1} << bits;
  const double clamped = std::clamp(x, 0.0, 1.0);
  return Rational(static_cast<std::int64_t>(std::llround(clamped * static_cast<double>(den))), den);
}

}  // namespace semproc
