#include "semproc/harness.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "semproc/error.hpp"
#include "semproc/measures.hpp"

#ifndef SEMPROC_VERSION_HASH
#define SEMPROC_VERSION_HASH "unknown"
#endif

namespace semproc {

const char* version_hash() noexcept { return SEMPROC_VERSION_HASH; }

namespace {

enum class Type { text, real, integer, uint64, size_list, real_list, choice };

struct KeySpec {
  const char* path;
  Type type;
  const char* fallback;
  std::vector<std::string> choices;
};

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"experiment.id", Type::text, "", {}},
      {"experiment.seed", Type::uint64, "20240917", {}},
      {"class.h", Type::choice, "bvector", {"bvector", "holder"}},
      {"class.T", Type::real, "1", {}},
      {"class.C", Type::real, "1", {}},
      {"class.beta", Type::real, "1", {}},
      {"class.j", Type::integer, "0", {}},
      {"class.parity", Type::choice, "odd", {"odd", "even"}},
      {"class.g", Type::choice, "halflines", {"halflines", "initial-intervals", "polynomials"}},
      {"class.degree", Type::integer, "1", {}},
      {"class.coef_bound", Type::real, "1", {}},
      {"model.nu", Type::text, "uniform01", {}},
      {"run.n_list", Type::size_list, "", {}},
      {"run.replicates", Type::integer, "0", {}},
      {"run.alpha_list", Type::real_list, "", {}},
      {"run.epsilon_list", Type::real_list, "", {}},
      {"run.net_u", Type::real, "0", {}},
      {"run.trials", Type::integer, "0", {}},
      {"run.modulus_replicates", Type::integer, "0", {}},
      {"run.q_set", Type::choice, "kiefer-grid", {"kiefer-grid", "holder-product"}},
      {"run.mc_points", Type::integer, "0", {}},
      {"run.tau", Type::real, "0.5", {}},
      {"run.series_N", Type::integer, "2000", {}},
      {"tolerance.cov", Type::real, "0.05", {}},
      {"tolerance.ks", Type::real, "0.03", {}},
      {"tolerance.lindeberg", Type::real, "1e-3", {}},
      {"tolerance.deviation", Type::real, "0.02", {}},
      {"tolerance.decade_factor", Type::real, "2", {}},
      {"tolerance.modulus_ratio", Type::real, "0.5", {}},
      {"tolerance.kernel", Type::real, "1e-8", {}},
      {"tolerance.series", Type::real, "1e-6", {}},
      {"output.report", Type::text, "", {}},
      {"output.plot_dir", Type::text, "", {}},
  };
  return keys;
}

const KeySpec& spec_of(const std::string& path) {
  for (const auto& k : schema())
    if (path == k.path) return k;
  std::string known;
  for (const auto& k : schema()) known += std::string(known.empty() ? "" : ", ") + k.path;
  throw Error(Errc::config_error, "unknown key '" + path + "' (known: " + known + ")");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_real(const std::string& path, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(x))
    throw Error(Errc::config_error, path + ": expected a real number, got '" + v + "'");
  return x;
}

std::int64_t parse_integer(const std::string& path, const std::string& v) {
  const double x = parse_real(path, v);
  if (x != std::floor(x) || std::abs(x) > 9.0e15) throw Error(Errc::config_error, path + ": expected an integer, got '" + v + "'");
  return static_cast<std::int64_t>(x);
}

void validate(const KeySpec& k, const std::string& v) {
  const std::string path = k.path;
  switch (k.type) {
    case Type::text:
      if (path == "model.nu") {
        try {
          (void)NuModel::parse(v);
        } catch (const Error& e) {
          throw Error(Errc::config_error, path + ": " + e.what());
        }
      }
      break;
    case Type::real: (void)parse_real(path, v); break;
    case Type::integer: (void)parse_integer(path, v); break;
    case Type::uint64: {
      std::size_t used = 0;
      try {
        (void)std::stoull(v, &used, 0);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != v.size() || v.empty() || v.front() == '-')
        throw Error(Errc::config_error, path + ": expected an unsigned 64-bit integer, got '" + v + "'");
      break;
    }
    case Type::size_list:
      for (const auto& item : split_list(v))
        if (parse_integer(path, item) < 1) throw Error(Errc::config_error, path + ": entries must be >= 1");
      break;
    case Type::real_list:
      for (const auto& item : split_list(v)) (void)parse_real(path, item);
      break;
    case Type::choice: {
      bool ok = false;
      std::string allowed;
      for (const auto& c : k.choices) {
        ok = ok || c == v;
        allowed += std::string(allowed.empty() ? "" : "|") + c;
      }
      if (!ok) throw Error(Errc::config_error, path + ": expected one of " + allowed + ", got '" + v + "'");
      break;
    }
  }
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (const auto& k : schema()) values_[k.path] = k.fallback;
}

void ExperimentConfig::set(const std::string& path, const std::string& value) {
  const KeySpec& k = spec_of(path);
  const std::string v = trim(value);
  validate(k, v);
  values_[path] = v;
  explicit_[path] = true;
}

bool ExperimentConfig::is_set(const std::string& path) const {
  (void)spec_of(path);
  return explicit_.count(path) > 0;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(Errc::config_error, std::string("malformed config: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw Error(Errc::config_error, "key '" + section + "' must live inside a [section]");
    for (const auto& [key, value] : body) cfg.set(section + "." + key, value.get_value<std::string>());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_error, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  std::string section;
  for (const auto& k : schema()) {
    if (!explicit_.count(k.path)) continue;
    const std::string path = k.path;
    const auto dot = path.find('.');
    const std::string sec = path.substr(0, dot);
    if (sec != section) {
      out << (section.empty() ? "" : "\n") << "[" << sec << "]\n";
      section = sec;
    }
    out << path.substr(dot + 1) << " = " << values_.at(path) << "\n";
  }
  return out.str();
}

std::string ExperimentConfig::str(const std::string& path) const {
  (void)spec_of(path);
  return values_.at(path);
}

double ExperimentConfig::real(const std::string& path) const { return parse_real(path, str(path)); }

std::int64_t ExperimentConfig::integer(const std::string& path) const { return parse_integer(path, str(path)); }

std::uint64_t ExperimentConfig::seed() const { return std::stoull(str("experiment.seed"), nullptr, 0); }

std::vector<std::size_t> ExperimentConfig::size_list(const std::string& path) const {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(str(path))) out.push_back(static_cast<std::size_t>(parse_integer(path, item)));
  return out;
}

std::vector<double> ExperimentConfig::real_list(const std::string& path) const {
  std::vector<double> out;
  for (const auto& item : split_list(str(path))) out.push_back(parse_real(path, item));
  return out;
}

Json ExperimentConfig::to_json() const {
  Json j = Json::object();
  for (const auto& k : schema()) {
    const std::string path = k.path;
    const auto dot = path.find('.');
    j[path.substr(0, dot)][path.substr(dot + 1)] = values_.at(path);
  }
  return j;
}

// ---------------------------------------------------------------- reports

void ExperimentReport::check(std::string name, double observed, std::string relation, double threshold,
                             double tolerance) {
  LedgerEntry e{std::move(name), observed, std::move(relation), threshold, tolerance, false};
  if (e.relation == "<=") e.pass = observed <= threshold + tolerance;
  else if (e.relation == ">=") e.pass = observed >= threshold - tolerance;
  else if (e.relation == "==" || e.relation == "within") e.pass = std::abs(observed - threshold) <= tolerance;
  else throw Error(Errc::invalid_argument, "unknown ledger relation " + e.relation);
  if (std::isnan(observed)) e.pass = false;
  ledger.push_back(std::move(e));
}

void ExperimentReport::check_flag(std::string name, bool ok) { check(std::move(name), ok ? 1.0 : 0.0, "==", 1.0, 0.0); }

bool ExperimentReport::passed() const {
  for (const auto& e : ledger)
    if (!e.pass) return false;
  return true;
}

Json ExperimentReport::to_json() const {
  Json j;
  j["schema_version"] = report_schema_version;
  j["experiment"] = experiment;
  j["version"] = version_hash();
  j["config"] = config;
  j["rng"] = {{"root_seed", seed},
              {"engine", "mt19937_64"},
              {"stream_derivation", "splitmix64 chain over labels and indices"}};
  j["results"] = results;
  Json led = Json::array();
  std::size_t failed = 0;
  for (const auto& e : ledger) {
    led.push_back({{"check", e.check},
                   {"observed", e.observed},
                   {"relation", e.relation},
                   {"threshold", e.threshold},
                   {"tolerance", e.tolerance},
                   {"pass", e.pass}});
    if (!e.pass) ++failed;
  }
  j["ledger"] = led;
  j["summary"] = {{"checks", ledger.size()}, {"failed", failed}, {"pass", failed == 0}};
  if (wall_seconds >= 0.0) j["timing"] = {{"wall_seconds", wall_seconds}};
  return j;
}

ExperimentReport run_experiment(const ExperimentConfig& config, Exec exec, bool timing) {
  const auto& reg = experiment_registry();
  const std::string id = config.experiment();
  const auto it = reg.find(id);
  if (it == reg.end()) {
    std::string ids;
    for (const auto& [name, fn] : reg) ids += std::string(ids.empty() ? "" : ", ") + name;
    throw Error(Errc::config_error, "experiment.id: unknown experiment '" + id + "' (registered: " + ids + ")");
  }
  ExperimentReport rep;
  rep.experiment = id;
  rep.config = config.to_json();
  rep.seed = config.seed();
  const auto t0 = std::chrono::steady_clock::now();
  it->second(config, rep, exec);
  if (timing) rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// ---------------------------------------------------------------- output

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(Errc::io_error, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::io_error, "cannot rename into " + path.string());
  }
}

std::string format_csv(const PlotSeries& series) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t c = 0; c < series.header.size(); ++c) out << (c ? "," : "") << series.header[c];
  out << "\n";
  for (const auto& row : series.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << "\n";
  }
  return out.str();
}

std::vector<std::filesystem::path> emit_plotdata(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  for (const auto& s : report.plots) {
    const auto path = dir / s.file;
    write_file_atomic(path, format_csv(s));
    written.push_back(path);
  }
  return written;
}

}  // namespace semproc
