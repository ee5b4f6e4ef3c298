#include "semproc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "semproc/error.hpp"

namespace semproc {

namespace {

struct Panel {
  double a, b;
  double fa, fm, fb;
  double whole;   // Simpson on [a,b]
  double refined; // composite Simpson on the halves, Richardson-corrected
  double err;
  double fl, fr;  // midpoints of the halves
  int depth;
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const { return x.err < y.err; }
};

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt,
                     std::span<const double> breaks) {
  QuadResult res;
  if (b < a) {
    res = integrate(f, b, a, opt, breaks);
    res.value = -res.value;
    return res;
  }
  if (!(a < b)) return res;

  auto eval = [&](double x) {
    ++res.evaluations;
    const double v = f(x);
    if (!std::isfinite(v)) throw Error(Errc::invalid_argument, "integrand not finite");
    return v;
  };
  auto make = [&](double lo, double hi, double flo, double fmid, double fhi, int depth) {
    Panel p{lo, hi, flo, fmid, fhi, 0, 0, 0, 0, 0, depth};
    const double m = 0.5 * (lo + hi);
    const double h = hi - lo;
    p.fl = eval(0.5 * (lo + m));
    p.fr = eval(0.5 * (m + hi));
    p.whole = h / 6.0 * (flo + 4.0 * fmid + fhi);
    const double halves = h / 12.0 * (flo + 4.0 * p.fl + 2.0 * fmid + 4.0 * p.fr + fhi);
    p.refined = halves + (halves - p.whole) / 15.0;
    p.err = std::abs(halves - p.whole) / 15.0;
    return p;
  };

  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Panel> heap;
  const ByError cmp;
  double total = 0.0, total_err = 0.0;
  const int k = std::max(1, opt.initial_panels);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s], hi = cuts[s + 1];
    // Endpoint values use one-sided limits by nudging inward.
    double prev_x = lo;
    double prev_f = eval(std::nextafter(lo, hi));
    for (int i = 1; i <= k; ++i) {
      const double x = (i == k) ? hi : lo + (hi - lo) * i / k;
      const double fx = (i == k) ? eval(std::nextafter(hi, lo)) : eval(x);
      const double fm = eval(0.5 * (prev_x + x));
      Panel p = make(prev_x, x, prev_f, fm, fx, 0);
      total += p.refined;
      total_err += p.err;
      heap.push_back(p);
      std::push_heap(heap.begin(), heap.end(), cmp);
      prev_x = x;
      prev_f = fx;
    }
  }

  std::size_t steps = 0;
  while (total_err > opt.tol) {
    if (++steps % 1024 == 0) {
      total_err = 0.0;
      for (const auto& q : heap) total_err += q.err;
      if (total_err <= opt.tol) break;
    }
    Panel p = heap.front();
    if (p.depth >= opt.max_depth || heap.size() >= opt.max_intervals) {
      res.value = total;
      res.error = total_err;
      throw QuadratureError("quadrature did not reach tolerance before depth cap", total, total_err);
    }
    std::pop_heap(heap.begin(), heap.end(), cmp);
    heap.pop_back();
    total -= p.refined;
    total_err -= p.err;
    const double m = 0.5 * (p.a + p.b);
    Panel left = make(p.a, m, p.fa, p.fl, p.fm, p.depth + 1);
    Panel right = make(m, p.b, p.fm, p.fr, p.fb, p.depth + 1);
    total += left.refined + right.refined;
    total_err += left.err + right.err;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), cmp);
  }

  // Re-sum from the panels to shed accumulated cancellation in `total`.
  double sum = 0.0, err = 0.0;
  std::vector<Panel>& panels = heap;
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : panels) {
    sum += p.refined;
    err += p.err;
  }
  res.value = sum;
  res.error = err;
  return res;
}

}  // namespace semproc
