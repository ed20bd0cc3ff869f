#include "fracdiff/experiment_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fracdiff/core.hpp"

namespace fracdiff {

namespace {

enum class Kind {
  text,
  flag,
  seed,
  count,
  count0,
  positive,
  nonnegative,
  hurst,
  open_unit,
  positive_list,
  open_unit_list,
  nonnegative_list,
  hurst_list,
  count_list,
  sampler,
};

struct KeySpec {
  const char* key;
  const char* fallback;
  Kind kind;
};

const std::vector<KeySpec>& common_keys() {
  static const std::vector<KeySpec> keys{
      {"experiment", "", Kind::text},
      {"seed", "20240917", Kind::seed},
      {"replicates", "100", Kind::count},
      {"threads", "1", Kind::count},
      {"output", "", Kind::text},
  };
  return keys;
}

const std::map<std::string, std::vector<KeySpec>>& schemas() {
  static const std::map<std::string, std::vector<KeySpec>> table{
      {"bias-sweep",
       {{"replicates", "2000", Kind::count},
        {"model.hurst", "0.5", Kind::hurst},
        {"model.sigma", "1", Kind::positive},
        {"grid.horizon", "10", Kind::positive},
        {"grid.deltas", "0.05", Kind::positive_list},
        {"grid.epsilons", "0.005,0.05,0.5", Kind::open_unit_list},
        {"sim.method", "recursion", Kind::sampler},
        {"sim.substeps", "16", Kind::count}}},
      {"consistency-rate",
       {{"replicates", "500", Kind::count},
        {"model.hurst", "0.7", Kind::hurst},
        {"model.sigma", "1", Kind::positive},
        {"model.alpha", "0.5", Kind::positive},
        {"grid.horizon", "1", Kind::positive},
        {"schedule.epsilons",
         "0.0625,0.03125,0.015625,0.0078125,0.00390625,0.001953125,0.0009765625",
         Kind::open_unit_list},
        {"sim.method", "exact", Kind::sampler},
        {"sim.substeps", "16", Kind::count}}},
      {"clt",
       {{"replicates", "2000", Kind::count},
        {"model.hurst", "0.7", Kind::hurst},
        {"model.sigma", "1", Kind::positive},
        {"model.alpha", "0.5", Kind::positive},
        {"grid.horizon", "1", Kind::positive},
        {"grid.delta", "0.00048828125", Kind::positive},
        {"sim.method", "exact", Kind::sampler},
        {"sim.substeps", "16", Kind::count}}},
      {"score-consistency",
       {{"replicates", "200", Kind::count},
        {"model.hurst", "0.7", Kind::hurst},
        {"model.theta", "1", Kind::positive},
        {"model.sigma", "1", Kind::positive},
        {"grid.horizon", "10", Kind::positive},
        {"grid.deltas", "0.1,0.05,0.025,0.0125", Kind::positive_list}}},
      {"expansion-residual",
       {{"replicates", "200", Kind::count},
        {"model.hurst", "0.7", Kind::hurst},
        {"model.theta", "1", Kind::nonnegative},
        {"model.sigma", "1", Kind::positive},
        {"grid.horizon", "10", Kind::positive},
        {"grid.delta0", "0.1", Kind::positive},
        {"grid.levels", "4", Kind::count}}},
      {"hurst-sweep",
       {{"replicates", "200", Kind::count},
        {"model.hurst", "0.7", Kind::hurst},
        {"model.sigma", "1", Kind::positive},
        {"model.ratio", "0.01", Kind::positive},
        {"grid.horizon", "1", Kind::positive},
        {"grid.count", "4096", Kind::count},
        {"sim.method", "exact", Kind::sampler},
        {"sim.substeps", "16", Kind::count}}},
      {"conjecture-scan",
       {{"replicates", "1", Kind::count},
        {"scan.hursts", "0.3,0.55,0.7", Kind::hurst_list},
        {"scan.sizes", "32,64,128,256", Kind::count_list},
        {"scan.growth_limit", "1.5", Kind::positive},
        {"scan.full_table", "false", Kind::flag},
        {"wick.hursts", "0.3,0.7", Kind::hurst_list},
        {"wick.size", "64", Kind::count},
        {"wick.pairs", "10", Kind::count0},
        {"wick.samples", "10000", Kind::count}}},
      {"calibration-convergence",
       {{"replicates", "20", Kind::count},
        {"model.hurst", "0.7", Kind::hurst},
        {"model.theta", "1", Kind::nonnegative},
        {"model.sigma", "1", Kind::positive},
        {"model.p", "1.6", Kind::positive},
        {"grid.horizon", "1", Kind::positive},
        {"grid.delta0", "0.125", Kind::positive},
        {"grid.levels", "6", Kind::count0},
        {"sim.oversampling", "16", Kind::count}}},
      {"signature-check",
       {{"replicates", "100", Kind::count},
        {"sig.dimension", "3", Kind::count},
        {"sig.level", "3", Kind::count},
        {"grid.count", "20", Kind::count},
        {"pvar.max_count", "10", Kind::count},
        {"pvar.exponents", "1,1.5,2.5", Kind::positive_list}}},
      {"tfe-sweep",
       {{"replicates", "200", Kind::count},
        {"model.theta", "1", Kind::positive},
        {"model.hurst", "0.7", Kind::hurst},
        {"model.x0", "1", Kind::positive},
        {"grid.horizon", "2", Kind::positive},
        {"grid.delta", "0.01", Kind::positive},
        {"sweep.epsilons", "0.01,0.001,0.0001", Kind::open_unit_list},
        {"sweep.etas", "0.01,0.001,0.0001", Kind::nonnegative_list},
        {"search.lower", "0", Kind::nonnegative},
        {"search.upper", "5", Kind::positive},
        {"sim.substeps", "16", Kind::count}}},
  };
  return table;
}

[[noreturn]] void reject(const std::string& key, const std::string& value, const std::string& why) {
  fail(ErrorKind::config_error, "key '" + key + "' = '" + value + "': " + why);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_unsigned(const std::string& s, unsigned long long& out) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return false;
  errno = 0;
  out = std::strtoull(s.c_str(), nullptr, 10);
  return errno == 0;
}

void check_number(const std::string& key, const std::string& item, const std::string& whole,
                  Kind kind) {
  double v = 0.0;
  if (!parse_double(item, v)) reject(key, whole, "not a finite number");
  switch (kind) {
    case Kind::positive:
    case Kind::positive_list:
      if (!(v > 0.0)) reject(key, whole, "must be positive");
      break;
    case Kind::nonnegative:
    case Kind::nonnegative_list:
      if (!(v >= 0.0)) reject(key, whole, "must be non-negative");
      break;
    case Kind::hurst:
    case Kind::hurst_list:
      if (!(v > 0.0 && v < 1.0)) reject(key, whole, "Hurst index must lie in (0,1)");
      break;
    case Kind::open_unit:
    case Kind::open_unit_list:
      if (!(v > 0.0 && v < 1.0)) reject(key, whole, "must lie in (0,1)");
      break;
    default:
      break;
  }
}

void check_value(const std::string& key, const std::string& value, Kind kind) {
  unsigned long long u = 0;
  switch (kind) {
    case Kind::text:
      return;
    case Kind::sampler:
      if (value != "exact" && value != "recursion") reject(key, value, "expected exact or recursion");
      return;
    case Kind::flag:
      if (value != "true" && value != "false") reject(key, value, "expected true or false");
      return;
    case Kind::seed:
      if (!parse_unsigned(value, u)) reject(key, value, "expected an unsigned 64-bit integer");
      return;
    case Kind::count:
      if (!parse_unsigned(value, u) || u == 0) reject(key, value, "expected a positive integer");
      return;
    case Kind::count0:
      if (!parse_unsigned(value, u)) reject(key, value, "expected a non-negative integer");
      return;
    case Kind::count_list: {
      const auto items = split_list(value);
      if (items.empty()) reject(key, value, "empty list");
      for (const auto& item : items) {
        if (!parse_unsigned(item, u) || u == 0) reject(key, value, "expected positive integers");
      }
      return;
    }
    case Kind::positive_list:
    case Kind::open_unit_list:
    case Kind::nonnegative_list:
    case Kind::hurst_list: {
      const auto items = split_list(value);
      if (items.empty()) reject(key, value, "empty list");
      for (const auto& item : items) check_number(key, item, value, kind);
      return;
    }
    default:
      check_number(key, value, value, kind);
  }
}

const KeySpec* find_spec(const std::string& experiment, const std::string& key) {
  const auto& specific = schemas().at(experiment);
  for (const auto& s : specific) {
    if (key == s.key) return &s;
  }
  for (const auto& s : common_keys()) {
    if (key == s.key) return &s;
  }
  return nullptr;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "bias-sweep",      "consistency-rate",        "clt",            "score-consistency",
      "expansion-residual", "hurst-sweep",          "conjecture-scan", "calibration-convergence",
      "signature-check", "tfe-sweep"};
  return names;
}

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
  if (schemas().count(experiment) == 0) {
    fail(ErrorKind::config_error, "key 'experiment' = '" + experiment + "': unknown experiment");
  }
  ExperimentConfig cfg(experiment);
  for (const auto& s : common_keys()) cfg.values_[s.key] = s.fallback;
  for (const auto& s : schemas().at(experiment)) cfg.values_[s.key] = s.fallback;
  cfg.values_["experiment"] = experiment;
  return cfg;
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "line " << lineno << ": expected 'key = value'";
      fail(ErrorKind::config_error, os.str());
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  const auto named = std::find_if(entries.begin(), entries.end(),
                                  [](const auto& e) { return e.first == "experiment"; });
  if (named == entries.end()) fail(ErrorKind::config_error, "missing key 'experiment'");
  ExperimentConfig cfg = defaults(named->second);
  std::map<std::string, bool> seen;
  for (const auto& [key, value] : entries) {
    if (seen[key]) fail(ErrorKind::config_error, "key '" + key + "' given twice");
    seen[key] = true;
    if (key != "experiment") cfg.set(key, value);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config_error, "cannot read config file '" + path.string() + "'");
  return parse(in);
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const KeySpec* spec = find_spec(experiment_, key);
  if (spec == nullptr) {
    fail(ErrorKind::config_error, "unknown key '" + key + "' for experiment '" + experiment_ + "'");
  }
  if (key == "experiment" && value != experiment_) {
    fail(ErrorKind::config_error, "key 'experiment' cannot be changed after parsing");
  }
  check_value(key, value, spec->kind);
  values_[key] = value;
}

const std::string& ExperimentConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    fail(ErrorKind::config_error, "unknown key '" + key + "' for experiment '" + experiment_ + "'");
  }
  return it->second;
}

std::string ExperimentConfig::text(const std::string& key) const { return raw(key); }

double ExperimentConfig::number(const std::string& key) const { return std::strtod(raw(key).c_str(), nullptr); }

std::size_t ExperimentConfig::count(const std::string& key) const {
  return static_cast<std::size_t>(std::strtoull(raw(key).c_str(), nullptr, 10));
}

bool ExperimentConfig::flag(const std::string& key) const { return raw(key) == "true"; }

std::vector<double> ExperimentConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key))) out.push_back(std::strtod(item.c_str(), nullptr));
  return out;
}

std::vector<std::size_t> ExperimentConfig::counts(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(raw(key))) {
    out.push_back(static_cast<std::size_t>(std::strtoull(item.c_str(), nullptr, 10)));
  }
  return out;
}

std::uint64_t ExperimentConfig::seed() const { return std::strtoull(raw("seed").c_str(), nullptr, 10); }

}  // namespace fracdiff
