#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "semproc/covering.hpp"
#include "semproc/fclt.hpp"
#include "semproc/parallel.hpp"
#include "semproc/ulln.hpp"

using namespace semproc;

namespace {

// Median wall time over `reps` calls.
double time_it(int reps, const std::function<void()>& f) {
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

template <class R>
void compare(const char* name, int reps, const std::function<R(Exec)>& kernel) {
  R serial_out{}, parallel_out{};
  const double ts = time_it(reps, [&] { serial_out = kernel(Exec::serial); });
  const double tp = time_it(reps, [&] { parallel_out = kernel(Exec::parallel); });
  std::printf("%-34s serial %9.4fs  parallel %9.4fs  speedup %5.2fx  %s\n", name, ts, tp, ts / tp,
              serial_out == parallel_out ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const int reps = quick ? 1 : 3;
  std::printf("threads: %d\n", configured_threads());

  {
    const Sample s = draw_sample(NuModel::uniform01(), quick ? 20000 : 200000, 1);
    compare<double>("exact sup deviation, j=0", reps,
                    [&](Exec e) { return sup_deviation_exact_BW(0, Parity::odd, s, e).value; });
  }
  {
    GCConfig gc;
    gc.n_schedule = {quick ? std::size_t{1000} : std::size_t{5000}};
    gc.replicates = 40;
    gc.j = 1;
    gc.seed = 2;
    compare<std::vector<double>>("ulln replicates, j=1", reps,
                                 [&](Exec e) { return gc_experiment(gc, e).rows.front().deviations; });
  }
  {
    std::vector<QFunction> qs;
    for (double s : {0.25, 0.5, 0.75, 1.0})
      for (double x : {0.3, 0.6}) qs.push_back(kiefer_cell(s, x));
    const std::size_t R = quick ? 500 : 5000;
    compare<std::vector<double>>("fidi Z_n replicates", reps, [&](Exec e) {
      const auto r = fidi_convergence_test(qs, 2000, R, 3, NuModel::uniform01(), 0.05, 0.03, 5, e);
      std::vector<double> flat(r.empirical_cov.data(), r.empirical_cov.data() + r.empirical_cov.size());
      return flat;
    });
  }
  {
    const Sample s = draw_sample(NuModel::uniform01(), 500, 4);
    const BVectorClass cls{1, Parity::odd};
    Rng rng(5);
    std::vector<QFunction> family;
    for (int k = 0; k < (quick ? 150 : 600); ++k)
      family.push_back(QFunction::product(HFunc::indicator(cls.random_member(rng)), GFunc::half_line(rng.uniform01())));
    MetricContext ctx;
    ctx.sample = &s;
    ctx.n = s.n;
    compare<std::vector<double>>("covering distance matrix, d1_Pn", reps, [&](Exec e) {
      const auto m = DistanceMatrix::build(
          family.size(), [&](std::size_t i, std::size_t j) { return eval_pseudometric(Metric::d1_Pn, family[i], family[j], ctx); },
          e);
      std::vector<double> flat;
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) flat.push_back(m(i, j));
      return flat;
    });
  }
  return 0;
}
