#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "semproc/error.hpp"
#include "semproc/harness.hpp"

namespace {

struct Options {
  std::string config_file;
  std::vector<std::string> sets;
  std::string n_list;
  std::string replicates;
  std::string alpha_list;
  std::string seed;
  std::string out;
  std::string q_set;
  std::string plot_dir;
  bool timing = false;
  bool serial = false;
};

int run(const std::string& id, const Options& o) {
  using namespace semproc;
  ExperimentConfig cfg = o.config_file.empty() ? ExperimentConfig() : ExperimentConfig::load(o.config_file);
  if (cfg.is_set("experiment.id") && cfg.experiment() != id)
    throw Error(Errc::config_error,
                "experiment.id: config file names '" + cfg.experiment() + "' but the subcommand is '" + id + "'");
  cfg.set("experiment.id", id);
  if (!o.n_list.empty()) cfg.set("run.n_list", o.n_list);
  if (!o.replicates.empty()) cfg.set("run.replicates", o.replicates);
  if (!o.alpha_list.empty()) cfg.set("run.alpha_list", o.alpha_list);
  if (!o.seed.empty()) cfg.set("experiment.seed", o.seed);
  if (!o.q_set.empty()) cfg.set("run.q_set", o.q_set);
  if (!o.out.empty()) cfg.set("output.report", o.out);
  if (!o.plot_dir.empty()) cfg.set("output.plot_dir", o.plot_dir);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(Errc::config_error, "--set expects section.key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }

  const ExperimentReport rep = run_experiment(cfg, o.serial ? Exec::serial : Exec::parallel, o.timing);
  const std::string text = rep.to_json().dump(2) + "\n";
  const std::string report_path = cfg.str("output.report");
  if (report_path.empty()) std::cout << text;
  else write_file_atomic(report_path, text);
  const std::string plot_dir = cfg.str("output.plot_dir");
  if (!plot_dir.empty()) emit_plotdata(rep, plot_dir);

  for (const auto& e : rep.ledger)
    if (!e.pass)
      std::cerr << "FAIL " << e.check << ": observed " << e.observed << " " << e.relation << " " << e.threshold
                << " (tolerance " << e.tolerance << ")\n";
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential empirical measure processes: numerical checks of uniform laws and functional CLTs"};
  app.require_subcommand(1);
  Options o;
  std::string chosen;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"ulln", "uniform law of large numbers: exact sup deviations over set classes x half-lines"},
      {"fclt", "functional CLT: fidi convergence, Lindeberg ratios, equicontinuity modulus"},
      {"covering", "covering-number lemmas, shatter coefficients, random covering numbers"},
      {"bounds", "closed-form Riemann-gap bounds, tail bounds and series diagnostics"},
      {"kiefer", "covariance kernel against the Kiefer closed form; Gaussian sampling"},
      {"selftest", "small deterministic run of every experiment"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config_file, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("--set", o.sets, "override: section.key=value (repeatable)");
    sub->add_option("--n", o.n_list, "n schedule, comma separated");
    sub->add_option("--replicates", o.replicates, "replicate count");
    sub->add_option("--alpha-list", o.alpha_list, "modulus radii, comma separated");
    sub->add_option("--seed", o.seed, "root seed (64-bit)");
    sub->add_option("--out", o.out, "report path (default: stdout)");
    sub->add_option("--q-set", o.q_set, "fclt index set: kiefer-grid | holder-product");
    sub->add_option("--plot-dir", o.plot_dir, "directory for plot-data CSV files");
    sub->add_flag("--timing", o.timing, "add wall-clock timing to the report");
    sub->add_flag("--serial", o.serial, "run the serial reference path");
    sub->callback([&chosen, n = std::string(name)] { chosen = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run(chosen, o);
  } catch (const semproc::Error& e) {
    std::cerr << "error (" << semproc::errc_name(e.code()) << "): " << e.what() << "\n";
    return e.code() == semproc::Errc::config_error || e.code() == semproc::Errc::invalid_argument ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
