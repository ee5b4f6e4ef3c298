#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "semproc/error.hpp"
#include "semproc/harness.hpp"
#include "semproc/rng.hpp"

using namespace semproc;
namespace fs = std::filesystem;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::invalid_argument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("semproc-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parses, validates and round-trips") {
  const auto cfg = ExperimentConfig::parse(
      "[experiment]\nid = ulln\nseed = 7\n[run]\nn_list = 10, 100\nreplicates = \"5\"\n[tolerance]\ncov = 0.1\n");
  CHECK(cfg.experiment() == "ulln");
  CHECK(cfg.seed() == 7);
  CHECK(cfg.size_list("run.n_list") == std::vector<std::size_t>{10, 100});
  CHECK(cfg.integer("run.replicates") == 5);
  CHECK(cfg.real("tolerance.cov") == 0.1);
  CHECK(cfg.is_set("run.n_list"));
  CHECK_FALSE(cfg.is_set("run.alpha_list"));
  const auto back = ExperimentConfig::parse(cfg.serialize());
  CHECK(back == cfg);
  CHECK(back.serialize() == cfg.serialize());
}

TEST_CASE("unknown keys are rejected with their path") {
  const auto msg = message_of([] { (void)ExperimentConfig::parse("[run]\nreplicate = 5\n"); });
  CHECK(msg.find("run.replicate") != std::string::npos);
  CHECK(msg.find("run.replicates") != std::string::npos);
  CHECK(code_of([] { (void)ExperimentConfig::parse("[runs]\nn_list = 5\n"); }) == Errc::config_error);
  CHECK(code_of([] { (void)ExperimentConfig::parse("seed = 5\n"); }) == Errc::config_error);
}

TEST_CASE("fuzzed typos are never accepted") {
  const std::vector<std::string> keys = {"experiment.seed", "run.n_list", "run.replicates", "tolerance.ks", "class.beta"};
  Rng rng(13);
  for (int t = 0; t < 300; ++t) {
    std::string k = keys[static_cast<std::size_t>(rng.uniform_int(0, 4))];
    const auto dot = k.find('.');
    auto pos = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(k.size()) - 1));
    if (pos == dot) pos = k.size() - 1;
    const char c = static_cast<char>('a' + rng.uniform_int(0, 25));
    if (k[pos] == c) continue;
    k[pos] = c;
    ExperimentConfig cfg;
    CHECK(code_of([&] { cfg.set(k, "1"); }) == Errc::config_error);
  }
}

TEST_CASE("values are type checked") {
  ExperimentConfig cfg;
  CHECK(code_of([&] { cfg.set("run.replicates", "1.5"); }) == Errc::config_error);
  CHECK(code_of([&] { cfg.set("run.replicates", "ten"); }) == Errc::config_error);
  CHECK(code_of([&] { cfg.set("experiment.seed", "-1"); }) == Errc::config_error);
  CHECK(code_of([&] { cfg.set("class.parity", "odds"); }) == Errc::config_error);
  CHECK(code_of([&] { cfg.set("model.nu", "cauchy"); }) == Errc::config_error);
  CHECK(code_of([&] { cfg.set("run.n_list", "10,0"); }) == Errc::config_error);
  cfg.set("run.replicates", "1e4");
  CHECK(cfg.integer("run.replicates") == 10000);
  cfg.set("experiment.seed", "0xff");
  CHECK(cfg.seed() == 255);
}

TEST_CASE("ledger relations") {
  ExperimentReport r;
  r.check("a", 1.0, "<=", 1.0);
  r.check("b", 1.1, "<=", 1.0, 0.05);
  r.check("c", 0.5, "within", 0.45, 0.1);
  r.check("d", std::nan(""), "<=", 1.0);
  r.check_flag("e", true);
  CHECK(r.ledger[0].pass);
  CHECK_FALSE(r.ledger[1].pass);
  CHECK(r.ledger[2].pass);
  CHECK_FALSE(r.ledger[3].pass);
  CHECK(r.ledger[4].pass);
  CHECK_FALSE(r.passed());
  const auto j = r.to_json();
  CHECK(j["summary"]["failed"] == 2);
  CHECK(j["ledger"][1]["tolerance"] == 0.05);
  CHECK_FALSE(j.contains("timing"));
  CHECK_THROWS_AS(r.check("x", 0.0, "<", 1.0), Error);
}

TEST_CASE("unknown experiment ids list the registry") {
  ExperimentConfig cfg;
  cfg.set("experiment.id", "nope");
  const auto msg = message_of([&] { (void)run_experiment(cfg); });
  for (const char* id : {"bounds", "covering", "fclt", "kiefer", "selftest", "ulln"})
    CHECK(msg.find(id) != std::string::npos);
}

TEST_CASE("same config, byte-identical report") {
  ExperimentConfig cfg;
  cfg.set("experiment.id", "ulln");
  cfg.set("run.n_list", "30,300");
  cfg.set("run.replicates", "6");
  cfg.set("tolerance.deviation", "1");
  const auto a = run_experiment(cfg, Exec::parallel).to_json().dump(2);
  const auto b = run_experiment(cfg, Exec::serial).to_json().dump(2);
  CHECK(a == b);
  const auto timed = run_experiment(cfg, Exec::serial, true).to_json();
  CHECK(timed.contains("timing"));
}

TEST_CASE("quickstart config passes its ledger") {
  const auto cfg = ExperimentConfig::load(fs::path(SEMPROC_SOURCE_DIR) / "configs" / "ulln_quickstart.ini");
  const auto rep = run_experiment(cfg);
  CHECK(rep.passed());
  CHECK(rep.to_json()["schema_version"] == report_schema_version);
}

TEST_CASE("plot data contracts") {
  const auto dir = scratch("plots");
  ExperimentConfig cfg;
  cfg.set("experiment.id", "ulln");
  cfg.set("run.n_list", "20,200");
  cfg.set("run.replicates", "4");
  const auto rep = run_experiment(cfg);
  const auto files = emit_plotdata(rep, dir);
  REQUIRE(files.size() == 1);
  std::ifstream in(files[0]);
  std::string header;
  std::getline(in, header);
  CHECK(header == "n,mean,median,q95,max,bound");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 2);

  cfg.set("run.n_list", "");
  const auto empty = run_experiment(cfg);
  const auto f2 = emit_plotdata(empty, dir);
  std::ifstream in2(f2[0]);
  std::stringstream ss;
  ss << in2.rdbuf();
  CHECK(ss.str() == "n,mean,median,q95,max,bound\n");

  PlotSeries s{"m.csv", {"alpha", "mean_modulus"}, {{0.1, 0.25}}};
  CHECK(format_csv(s) == "alpha,mean_modulus\n0.10000000000000001,0.25\n");
  fs::remove_all(dir);
}

TEST_CASE("atomic writes") {
  const auto dir = scratch("atomic");
  write_file_atomic(dir / "sub" / "r.json", "{}");
  std::ifstream in(dir / "sub" / "r.json");
  std::string s;
  in >> s;
  CHECK(s == "{}");
  int leftovers = 0;
  for (const auto& e : fs::directory_iterator(dir / "sub")) leftovers += e.path().filename() != "r.json";
  CHECK(leftovers == 0);
  write_file_atomic(dir / "blocker", "x");
  CHECK(code_of([&] { write_file_atomic(dir / "blocker" / "r.json", "{}"); }) == Errc::io_error);
  fs::remove_all(dir);
}
