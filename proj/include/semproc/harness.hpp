#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "semproc/parallel.hpp"

namespace semproc {

using Json = nlohmann::ordered_json;

// Flat INI configuration: [section] key = value. Every key is declared in a
// fixed schema with a type and default; unknown sections or keys are errors
// naming the offending "section.key".
class ExperimentConfig {
 public:
  ExperimentConfig();

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
  std::string serialize() const;

  // Override one key ("section.key"), validated against the schema.
  void set(const std::string& path, const std::string& value);
  bool is_set(const std::string& path) const;  // given explicitly (file or override)

  std::string str(const std::string& path) const;
  double real(const std::string& path) const;
  std::int64_t integer(const std::string& path) const;
  std::uint64_t seed() const;
  std::vector<std::size_t> size_list(const std::string& path) const;
  std::vector<double> real_list(const std::string& path) const;

  std::string experiment() const { return str("experiment.id"); }
  Json to_json() const;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return a.values_ == b.values_; }

 private:
  std::map<std::string, std::string> values_;  // "section.key" -> raw text
  std::map<std::string, bool> explicit_;
};

// One pass/fail entry of a report: `observed relation threshold` judged with
// the cited tolerance.
struct LedgerEntry {
  std::string check;
  double observed = 0.0;
  std::string relation;  // "<=", ">=", "==", "within"
  double threshold = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct PlotSeries {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  std::string experiment;
  Json config;
  Json results = Json::object();
  std::vector<LedgerEntry> ledger;
  std::vector<PlotSeries> plots;
  std::uint64_t seed = 0;
  double wall_seconds = -1.0;  // emitted only when measured

  void check(std::string name, double observed, std::string relation, double threshold, double tolerance = 0.0);
  void check_flag(std::string name, bool ok);
  bool passed() const;
  Json to_json() const;
};

inline constexpr int report_schema_version = 1;
const char* version_hash() noexcept;

using ExperimentFn = std::function<void(const ExperimentConfig&, ExperimentReport&, Exec)>;
const std::map<std::string, ExperimentFn>& experiment_registry();

// Dispatches on experiment.id; unknown ids raise config-error listing the
// registered ones.
ExperimentReport run_experiment(const ExperimentConfig& config, Exec exec = Exec::parallel, bool timing = false);

// Write-temp-then-rename; io-error on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
// CSV per plot series under `dir`; returns the written paths.
std::vector<std::filesystem::path> emit_plotdata(const ExperimentReport& report, const std::filesystem::path& dir);
std::string format_csv(const PlotSeries& series);

}  // namespace semproc
