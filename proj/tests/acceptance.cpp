#include <boost/math/quadrature/exp_sinh.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "semproc/covering.hpp"
#include "semproc/fclt.hpp"
#include "semproc/function_classes.hpp"
#include "semproc/harness.hpp"
#include "semproc/rng.hpp"
#include "semproc/ulln.hpp"

using namespace semproc;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240917;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt < limit_s;
  const bool ok = o.pass && in_time;
  failures += !ok;
  std::printf("AC%-2d %s  %s  (%s; %.2fs, limit %.0fs%s)\n", id, ok ? "PASS" : "FAIL", title, o.detail.c_str(), dt,
              limit_s, in_time ? "" : ", over time");
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const LedgerEntry* find_entry(const ExperimentReport& r, const std::string& name) {
  for (const auto& e : r.ledger)
    if (e.check == name) return &e;
  return nullptr;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  criterion(1, "closed-form gap bounds, zero violations", 1.0, [] {
    std::size_t violations = 0, checked = 0;
    const std::vector<std::int64_t> ns = {10, 100, 1000};
    for (const BVectorClass cls : {BVectorClass{0, Parity::odd}, BVectorClass{1, Parity::odd}, BVectorClass{2, Parity::odd},
                                   BVectorClass{1, Parity::even}, BVectorClass{2, Parity::even}}) {
      Rng rng(derive_seed(kSeed, {std::string("ac1"), cls.name()}));
      for (int m = 0; m < 1000; ++m) {
        const auto B = cls.random_member(rng);
        for (std::int64_t n : ns) {
          const Rational bound(cls.parity == Parity::odd ? 2 * (2 * cls.j + 1) : 4 * cls.j, n);
          violations += observed_riemann_gap(B, n) > bound;
          ++checked;
        }
      }
    }
    for (double beta : {0.5, 1.0}) {
      const HolderClass cls{1.0, 1.0, beta};
      Rng rng(derive_seed(kSeed, {std::string("ac1-holder"), static_cast<std::uint64_t>(beta * 2)}));
      for (int m = 0; m < 1000; ++m) {
        const auto h = cls.random_member(rng);
        for (std::int64_t n : ns) {
          const double bound = 1.0 / std::pow(static_cast<double>(n), beta);
          violations += observed_riemann_gap(h, static_cast<std::size_t>(n)) > bound * (1.0 + 1e-12);
          ++checked;
        }
      }
    }
    return Outcome{violations == 0, std::to_string(violations) + " violations in " + std::to_string(checked)};
  });

  criterion(2, "witness sets: lambda_n = 0, gap = 1 - 2^-n, n = 1..20", 5.0, [] {
    int bad = 0;
    for (std::int64_t n = 1; n <= 20; ++n) {
      const auto B = b_infinity_witness(n);
      bad += !(B.lambda_n(n) == Rational(0) && observed_riemann_gap(B, n) == Rational(1) - Rational(1, std::int64_t{1} << n));
    }
    return Outcome{bad == 0, std::to_string(bad) + " mismatches"};
  });

  criterion(3, "exact sup deviation vs exhaustive enumeration", 30.0, [] {
    Rng rng(derive_seed(kSeed, {std::string("ac3")}));
    int mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
      const auto n = static_cast<std::size_t>(rng.uniform_int(1, 12));
      const int j = static_cast<int>(rng.uniform_int(0, 2));
      const Parity p = (j > 0 && rng.uniform01() < 0.5) ? Parity::even : Parity::odd;
      const NuModel m = rng.uniform01() < 0.5 ? NuModel::uniform01() : NuModel::standard_normal();
      const Sample s = draw_sample(m, n, rng.next());
      const double want = oracle::sup_deviation_BW(j, p, s);
      const double got = sup_deviation_exact_BW(j, p, s).value;
      mismatches += std::abs(got - want) > 1e-12 * std::max(1.0, std::abs(want));
    }
    return Outcome{mismatches == 0, std::to_string(mismatches) + " mismatches in 1000"};
  });

  criterion(4, "ULLN convergence, B(1) x half-lines, R = 200", 120.0, [] {
    GCConfig gc;
    gc.n_schedule = {100, 1000, 10000};
    gc.replicates = 200;
    gc.seed = kSeed;
    const auto out = gc_experiment(gc);
    const double last = out.rows.back().mean;
    bool ok = last <= 0.02;
    std::string d = "mean at n=1e4 " + fmt("%.5f", last) + " (<= 0.02); decade ratios";
    for (std::size_t k = 0; k + 1 < out.rows.size(); ++k) {
      const double r = out.rows[k].mean / out.rows[k + 1].mean;
      ok = ok && r >= 2.0;
      d += " " + fmt("%.3f", r);
    }
    return Outcome{ok, d + " (>= 2)"};
  });

  criterion(5, "covering lemmas on 1000 random finite metric spaces", 30.0, [] {
    const auto rep = check_covering_lemmas(1000, derive_seed(kSeed, {std::string("ac5")}));
    std::string d;
    for (const auto& l : rep.lemmas) d += l.lemma + "=" + std::to_string(l.violations) + " ";
    return Outcome{rep.lemmas.size() == 4 && rep.total_violations() == 0, d + "violations"};
  });

  criterion(6, "shatter coefficients", 60.0, [] {
    Rng rng(derive_seed(kSeed, {std::string("ac6")}));
    auto points = [&](std::size_t k) {
      std::vector<double> pts;
      while (pts.size() < k) {
        const double x = rng.uniform01();
        if (x > 0.0 && std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
      }
      return pts;
    };
    const ShatterClass half{ShatterClass::Kind::half_lines, {}};
    const ShatterClass b1{ShatterClass::Kind::bvector, BVectorClass{0, Parity::odd}};
    const ShatterClass b3{ShatterClass::Kind::bvector, BVectorClass{1, Parity::odd}};
    bool linear = true;
    for (std::size_t k = 1; k <= 12; ++k) {
      const auto pts = points(k);
      linear = linear && shatter_coefficient(half, pts).coefficient == k + 1 &&
               shatter_coefficient(b1, pts).coefficient == k + 1;
    }
    const bool three = shatter_coefficient(b3, {0.2, 0.5, 0.8}).coefficient == 8;
    int shattered4 = 0;
    for (int t = 0; t < 1000; ++t) shattered4 += shatter_coefficient(b3, points(4)).coefficient == 16;
    return Outcome{linear && three && shattered4 == 0,
                   std::string("k+1 law ") + (linear ? "holds" : "broken") + ", B(3) 3-point " +
                       (three ? "shattered" : "not shattered") + ", 4-point sets shattered " + std::to_string(shattered4)};
  });

  criterion(7, "covariance kernel: factorized vs quadrature, Kiefer cells", 10.0, [] {
    const NuModel uni = NuModel::uniform01();
    const HolderClass hc{1.0, 1.0, 1.0};
    const GClass gh{GKind::half_lines};
    const GClass gp{GKind::polynomials, 2, 1.0};
    Rng rng(derive_seed(kSeed, {std::string("ac7")}));
    auto make = [&] {
      const HFunc h = HFunc::holder(hc.random_member(rng));
      const GFunc g = rng.uniform01() < 0.5 ? gh.random_member(rng, uni) : gp.random_member(rng, uni);
      return QFunction::product(h, g);
    };
    double pair_err = 0.0;
    for (int t = 0; t < 100; ++t) {
      const QFunction a = make(), b = make();
      pair_err = std::max(pair_err, std::abs(cov_kernel(a, b, KernelMode::product, uni) -
                                             cov_kernel(a, b, KernelMode::generic, uni)));
    }
    double cell_err = 0.0;
    for (int t = 0; t < 100; ++t) {
      const double s1 = rng.uniform01(), x1 = rng.uniform01(), s2 = rng.uniform01(), x2 = rng.uniform01();
      const double want = std::min(s1, s2) * (std::min(x1, x2) - x1 * x2);
      for (KernelMode mode : {KernelMode::product, KernelMode::generic})
        cell_err = std::max(cell_err, std::abs(cov_kernel(kiefer_cell(s1, x1), kiefer_cell(s2, x2), mode, uni) - want));
    }
    return Outcome{pair_err <= 1e-8 && cell_err <= 1e-8,
                   "pairs " + fmt("%.2e", pair_err) + ", cells " + fmt("%.2e", cell_err) + " (<= 1e-8)"};
  });

  // The fclt experiment at its defaults covers AC8, AC9 and AC11 in one run.
  ExperimentConfig fcfg;
  fcfg.set("experiment.id", "fclt");
  fcfg.set("experiment.seed", std::to_string(kSeed));
  fcfg.set("class.h", "holder");
  fcfg.set("class.beta", "1");
  fcfg.set("run.n_list", "2000");
  fcfg.set("run.replicates", "5000");
  fcfg.set("run.modulus_replicates", "100");
  fcfg.set("run.alpha_list", "0.05,0.1,0.2,0.4");
  fcfg.set("tolerance.cov", "0.05");
  fcfg.set("tolerance.ks", "0.03");
  fcfg.set("tolerance.lindeberg", "1e-3");
  fcfg.set("tolerance.modulus_ratio", "0.5");
  ExperimentReport fclt;
  double fclt_seconds = 0.0;
  bool fclt_ran = false;
  std::string fclt_error;
  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fclt = run_experiment(fcfg);
      fclt_ran = true;
    } catch (const std::exception& e) {
      fclt_error = e.what();
    }
    fclt_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  auto from_fclt = [&](std::vector<std::string> names, double limit) {
    return [&, names, limit] {
      if (!fclt_ran) return Outcome{false, "fclt run failed: " + fclt_error};
      bool ok = fclt_seconds < limit;
      std::string d;
      for (const auto& n : names) {
        const auto* e = find_entry(fclt, n);
        if (!e) return Outcome{false, "missing ledger entry " + n};
        ok = ok && e->pass;
        d += n + " " + fmt("%.5g", e->observed) + " " + e->relation + " " + fmt("%.5g", e->threshold) + "; ";
      }
      return Outcome{ok, d + "shared run " + fmt("%.2fs", fclt_seconds)};
    };
  };
  criterion(8, "fidi convergence, Kiefer cells, n = 2000, R = 5000", 300.0,
            from_fclt({"fidi_max_cov_error", "fidi_ks_marginals", "fidi_ks_combinations"}, 300.0));
  criterion(9, "Lindeberg ratios", 30.0,
            from_fclt({"lindeberg_bounded_zero_beyond_threshold", "lindeberg_ratio[s*x,eps=0.1,n=1000000]"}, 30.0));

  criterion(10, "series identities and dichotomy", 30.0, [] {
    boost::math::quadrature::exp_sinh<double> outer, inner;
    double worst = 0.0;
    for (double c : {0.5, 1.0, 2.0})
      for (int D1 = 0; D1 <= 2; ++D1)
        for (int D2 = 0; D2 <= 2; ++D2) {
          auto f = [&](double t1) {
            const double y = 1.0 + t1;
            return std::pow(y, D1) *
                   inner.integrate([&](double t2) { return std::pow(y + t2, D2) * std::exp(-c * (y + t2)); }, 1e-14);
          };
          const double quad = outer.integrate(f, 1e-13);
          worst = std::max(worst, std::abs(series_I_closed_form(c, D1, D2) - quad) / std::abs(quad));
        }
    const bool verdicts = series_S_diagnostic(1, 0.5, 2000).verdict == SeriesVerdict::divergent &&
                          series_S_diagnostic(1, std::numbers::ln2, 2000).verdict == SeriesVerdict::divergent &&
                          series_S_diagnostic(1, 2.0, 2000).verdict == SeriesVerdict::convergent;
    return Outcome{worst <= 1e-6 && verdicts, "max relative error " + fmt("%.2e", worst) + " (<= 1e-6), verdicts " +
                                                   (verdicts ? "divergent/divergent/convergent" : "wrong")};
  });

  criterion(11, "equicontinuity modulus, Hölder(1,1,1) x half-lines", 300.0,
            from_fclt({"modulus_monotone_in_alpha", "modulus_small_to_large_ratio"}, 300.0));

  criterion(12, "selftest reports are byte-identical across runs", 300.0, [] {
    const fs::path dir = fs::temp_directory_path() / "semproc-acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::vector<std::string> reports;
    const fs::path out = dir / "selftest.json";
    for (int k = 0; k < 2; ++k) {
      fs::remove(out);
      const std::string cmd = std::string("\"") + SEMPROC_CLI_PATH + "\" selftest --seed 7 --out \"" + out.string() +
                              "\" > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      if (!fs::exists(out)) return Outcome{false, "no report written (exit status " + std::to_string(rc) + ")"};
      reports.push_back(slurp(out));
    }
    fs::remove_all(dir);
    const bool same = reports[0] == reports[1] && !reports[0].empty();
    return Outcome{same, std::to_string(reports[0].size()) + " bytes, " + (same ? "identical" : "differ")};
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
