#pragma once

// Independent brute-force reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "semproc/function_classes.hpp"
#include "semproc/measures.hpp"

namespace oracle {

inline int runs_of(std::uint32_t mask, int n, bool* starts_at_first) {
  int runs = 0;
  bool prev = false;
  for (int i = 0; i < n; ++i) {
    const bool cur = (mask >> i) & 1u;
    if (cur && !prev) ++runs;
    prev = cur;
  }
  if (starts_at_first) *starts_at_first = mask & 1u;
  return runs;
}

// Grid subsets realizable by B(2j+1) (odd) or B(2j) (even).
inline bool realizable(std::uint32_t mask, int n, int j, semproc::Parity parity) {
  bool first = false;
  const int r = runs_of(mask, n, &first);
  if (r <= j) return true;
  return parity == semproc::Parity::odd && r == j + 1 && first;
}

// sup over realizable grid subsets S and half-lines W of
// |(1/n) Σ_{i∈S} 1{X_i ≤ w} - (|S|/n) F(w)|, by enumerating every subset
// and both ends of every F-interval between order statistics.
inline double sup_deviation_BW(int j, semproc::Parity parity, const semproc::Sample& s) {
  const int n = static_cast<int>(s.n);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return s.values[a] < s.values[b]; });
  std::vector<double> F(n);
  for (int k = 0; k < n; ++k) F[k] = s.model.cdf(s.values[order[k]]);
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (!realizable(mask, n, j, parity)) continue;
    const double lam = static_cast<double>(std::popcount(mask)) / n;
    int count = 0;
    for (int k = 0; k <= n; ++k) {
      if (k > 0 && ((mask >> order[k - 1]) & 1u)) ++count;
      const double lo = k == 0 ? 0.0 : F[k - 1];
      const double hi = k == n ? 1.0 : F[k];
      const double p = static_cast<double>(count) / n;
      best = std::max({best, std::abs(p - lam * lo), std::abs(p - lam * hi)});
    }
  }
  return best;
}

// Dichotomies of `pts` cut out by B(2j+1)/B(2j) with breakpoints drawn from
// 0, 1 and the midpoints between sorted points.
inline std::size_t shatter_count_bvector(const semproc::BVectorClass& cls, std::vector<double> pts) {
  std::vector<double> cand = {0.0, 1.0};
  std::vector<double> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) cand.push_back(0.5 * (sorted[i] + sorted[i + 1]));
  std::sort(cand.begin(), cand.end());
  const int m = cls.breakpoint_count();
  std::set<std::uint32_t> seen;
  std::vector<std::size_t> idx(m, 0);
  auto member = [&](double x) {
    // Pieces (t_{2k-1}, t_{2k}] plus (0, t_0] for odd classes.
    std::vector<double> t;
    for (auto i : idx) t.push_back(cand[i]);
    const int off = cls.parity == semproc::Parity::odd ? 1 : 0;
    if (off && x > 0.0 && x <= t[0]) return true;
    for (int k = off; k + 1 < m; k += 2)
      if (x > t[k] && x <= t[k + 1]) return true;
    return false;
  };
  while (true) {
    bool sorted_ok = true;
    for (int k = 0; k + 1 < m; ++k) sorted_ok = sorted_ok && cand[idx[k]] <= cand[idx[k + 1]];
    if (sorted_ok) {
      std::uint32_t mask = 0;
      for (std::size_t p = 0; p < pts.size(); ++p)
        if (member(pts[p])) mask |= 1u << p;
      seen.insert(mask);
    }
    int k = 0;
    while (k < m && ++idx[k] == cand.size()) idx[k++] = 0;
    if (k == m) break;
  }
  if (m == 0) seen.insert(0);
  return seen.size();
}

inline std::size_t shatter_count_half_lines(const std::vector<double>& pts) {
  std::set<std::uint32_t> seen;
  std::vector<double> ws = {-1.0, 2.0};
  for (double p : pts) ws.push_back(p);
  for (double w : ws) {
    std::uint32_t mask = 0;
    for (std::size_t p = 0; p < pts.size(); ++p)
      if (pts[p] <= w) mask |= 1u << p;
    seen.insert(mask);
  }
  return seen.size();
}

// Minimal number of centers (taken from the space) covering every point
// within distance < u, by exhaustive search over subsets.
template <class D>
std::size_t covering_number(std::size_t n, D&& d, double u) {
  std::size_t best = n;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size >= best) continue;
    bool ok = true;
    for (std::size_t p = 0; p < n && ok; ++p) {
      bool hit = false;
      for (std::size_t c = 0; c < n && !hit; ++c)
        if (((mask >> c) & 1u) && d(p, c) < u) hit = true;
      ok = hit;
    }
    if (ok) best = size;
  }
  return best;
}

}  // namespace oracle
