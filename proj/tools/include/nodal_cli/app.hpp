#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nodal/experiments.hpp"
#include "nodal_cli/checks.hpp"
#include "nodal_cli/config.hpp"
#include "nodal_cli/plot.hpp"

namespace nodal::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,       // --check and an acceptance rule failed, or replay differs
  kExitUsage = 2,             // unknown experiment or flag, bad config file
  kExitInvalidParameter = 3,  // e.g. q < 4, R/n beyond the injectivity margin
  kExitOutput = 4,            // output path not writable
  kExitIntegrity = 5,         // replay: schema mismatch, truncated or corrupt records
  kExitStatistics = 6,        // too few trials for the requested statistic
  kExitResource = 7,          // grid over budget
  kExitInternal = 70,
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::string summary_json;
  std::vector<Check> checks;
  std::vector<std::string> report;
  std::vector<std::pair<std::string, Chart>> plots;  // file name, chart
};

/// Runs (or, given recorded trials, only re-summarizes) one experiment.
/// recorded_hash != "" marks a replay whose stored hash differs from the config.
ExperimentResult run_experiment(const RunConfig& config, const std::vector<TrialRecord>* recorded = nullptr,
                                const std::string& mismatched_hash = "");

/// Files written into the output directory.
inline constexpr const char* kConfigFile = "config.txt";
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kReplayFile = "summary.replay.json";

/// Runs the experiment and writes config.txt, trials.{csv,json}, summary.json
/// and plots into config.get_string("out"). Returns the exit code.
int run_to_directory(const RunConfig& config, std::ostream& out, std::ostream& err);

struct ReplayOutcome {
  std::string summary_json;
  bool identical = false;      // byte-identical to the stored summary.json
  bool hash_mismatch = false;  // config.txt no longer matches the stored hash
};

/// Recomputes the summary of a finished run. Throws SchemaError or
/// IntegrityError for foreign or damaged files.
ReplayOutcome replay_directory(const std::string& dir, std::ostream& err, int threads = 0);

/// Command-line entry point of nodal-census.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nodal::cli
