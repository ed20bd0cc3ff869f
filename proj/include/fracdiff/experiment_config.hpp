#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fracdiff {

/// Names accepted by run_experiment, in a fixed order.
const std::vector<std::string>& experiment_names();

/// Flat `section.key = value` settings for one named experiment. Every key the
/// experiment understands has a default; unknown keys and invalid values raise
/// config-error naming the key.
class ExperimentConfig {
 public:
  static ExperimentConfig defaults(const std::string& experiment);
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);

  const std::string& experiment() const noexcept { return experiment_; }

  /// Validates the key against the experiment's schema and the value against its kind.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string text(const std::string& key) const;
  double number(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& key) const;

  std::uint64_t seed() const;
  std::size_t replicates() const { return count("replicates"); }
  std::size_t threads() const { return count("threads"); }
  std::string output() const { return text("output"); }

  /// Sorted key/value pairs, for echoing into summaries.
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  explicit ExperimentConfig(std::string experiment) : experiment_(std::move(experiment)) {}
  const std::string& raw(const std::string& key) const;

  std::string experiment_;
  std::map<std::string, std::string> values_;
};

}  // namespace fracdiff
