#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nodal/experiments.hpp"

namespace nodal::cli {

inline constexpr int kSchemaVersion = 1;

/// Header or schema_version of an output file does not match this build.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Truncated or corrupt trial table.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an output file cannot be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kTrialColumns =
    "config_hash,experiment,degree,dist,trial_index,seed,count_total,count_contained,length_estimate,runtime_ms";

struct TrialTable {
  std::string config_hash;  // empty when the table has no rows
  std::vector<TrialRecord> records;
};

/// One header row, then one row per record. Empty optionals are empty fields.
std::string format_trials_csv(const std::string& config_hash, std::span<const TrialRecord> records);
std::string format_trials_json(const std::string& config_hash, std::span<const TrialRecord> records);

/// Throws SchemaError for a foreign header and IntegrityError for malformed
/// or truncated rows (including a missing final newline) and for rows whose
/// config_hash disagrees with the first row.
TrialTable parse_trials_csv(const std::string& text);
TrialTable parse_trials_json(const std::string& text);

void write_file(const std::string& path, const std::string& content);

}  // namespace nodal::cli
