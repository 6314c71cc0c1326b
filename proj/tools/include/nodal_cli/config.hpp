#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Run configuration: an experiment name plus a flat set of typed parameters.
// Each experiment declares its parameters (with defaults) in a schema; config
// files and command-line flags both write into the same map, flags last.
namespace nodal::cli {

/// Malformed config file, unknown key or unparsable value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ParamType { Int, Real, Seed, Bool, String, IntList, RealList };

struct ParamSpec {
  std::string key;
  ParamType type;
  std::string default_value;
  std::string help;
  /// false for output plumbing (out, format, threads, check, timing), which
  /// never changes results and is left out of the config hash.
  bool hashed = true;
};

/// Known experiments, in help order.
const std::vector<std::string>& experiment_names();

/// Parameters of an experiment, common ones included. Throws ConfigError
/// for an unknown experiment.
const std::vector<ParamSpec>& experiment_schema(std::string_view experiment);

class RunConfig {
 public:
  RunConfig() = default;
  /// All parameters at their defaults. Throws ConfigError for an unknown experiment.
  explicit RunConfig(std::string experiment);

  const std::string& experiment() const { return experiment_; }

  /// Validates and canonicalizes the value ("20, 40" -> "20,40", "7.0" -> "7").
  /// Throws ConfigError for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  const std::string& raw(std::string_view key) const;

  int get_int(std::string_view key) const;
  double get_real(std::string_view key) const;
  std::uint64_t get_seed(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  const std::string& get_string(std::string_view key) const;
  std::vector<int> get_int_list(std::string_view key) const;
  std::vector<double> get_real_list(std::string_view key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  /// `key = value` lines, experiment first, then keys in schema order.
  std::string serialize() const;
  /// Inverse of serialize(). `#` starts a comment; blank lines are skipped.
  /// An `experiment` line is required unless `experiment` is given, in which
  /// case a conflicting one is an error.
  static RunConfig parse(std::string_view text, std::optional<std::string> experiment = std::nullopt);

  /// Merges the file's keys into this config (the file may omit `experiment`).
  void apply_file(std::string_view text);

  /// FNV-1a over the canonical text of the hashed parameters, as 16 hex digits.
  std::string hash() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

 private:
  const ParamSpec& spec(std::string_view key) const;

  std::string experiment_;
  std::map<std::string, std::string> values_;
};

std::string read_text_file(const std::string& path);

}  // namespace nodal::cli
