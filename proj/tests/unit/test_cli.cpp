#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "nodal_cli/app.hpp"
#include "nodal_cli/checks.hpp"
#include "nodal_cli/config.hpp"
#include "nodal_cli/plot.hpp"
#include "nodal_cli/records.hpp"

using namespace nodal;
using namespace nodal::cli;
namespace fs = std::filesystem;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Cli {
  int code = 0;
  std::string out;
  std::string err;
};

Cli invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "nodal-census");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Cli r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nodal_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

void spit(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
}

TrialRecord record(int degree, std::uint64_t index) {
  TrialRecord r;
  r.experiment = "cns";
  r.degree = degree;
  r.dist = "gaussian";
  r.trial_index = index;
  r.seed = 0xfedcba9876543210ULL + index;
  r.count_total = 40 + static_cast<int>(index);
  if (index % 2) r.length_estimate = 0.1 + index;
  return r;
}

}  // namespace

TEST_CASE("config round-trips through its text form") {
  RunConfig c("cns");
  c.set("degrees", "20, 40 ,60");
  c.set("seed", "7");
  c.set("level", "0.950");
  CHECK(c.raw("degrees") == "20,40,60");
  CHECK(c.raw("level") == "0.95");
  const RunConfig back = RunConfig::parse(c.serialize());
  CHECK(back == c);
  CHECK(back.hash() == c.hash());
  CHECK(back.get_int_list("degrees") == std::vector<int>{20, 40, 60});
  CHECK(back.get_seed("seed") == 7);
}

TEST_CASE("config hash is FNV-1a of the canonical parameters") {
  const RunConfig c("demo-basis");
  const std::string canonical = "experiment=demo-basis\nseed=0\nn=25\ndist=rademacher\ntrials=2000\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
  CHECK(c.hash() == buf);
  CHECK(c.hash() == "b437f9fd38d9e6be");
  RunConfig d = c;
  d.set("threads", "3");
  d.set("out", "elsewhere");
  d.set("format", "json");
  CHECK(d.hash() == c.hash());
  d.set("trials", "2001");
  CHECK(d.hash() != c.hash());
}

TEST_CASE("config parsing errors") {
  CHECK_THROWS_AS(RunConfig("nope"), ConfigError);
  RunConfig c("cns");
  CHECK_THROWS_AS(c.set("bogus", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("trials", "ten"), ConfigError);
  CHECK_THROWS_AS(c.set("degrees", "20,,40"), ConfigError);
  CHECK_THROWS_AS(c.set("check", "maybe"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("trials = 5\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("experiment = cns\ntrials\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("experiment = cns\n", std::string("rwm")), ConfigError);
  const RunConfig ok = RunConfig::parse("# comment\n\nexperiment = cns  # trailing\ntrials = 80\n");
  CHECK(ok.get_int("trials") == 80);
}

TEST_CASE("trial tables round-trip with empty fields kept empty") {
  const std::vector<TrialRecord> recs{record(20, 0), record(20, 1), record(40, 2)};
  const std::string csv = format_trials_csv("00000000deadbeef", recs);
  CHECK(csv.rfind(std::string(kTrialColumns) + "\n", 0) == 0);
  CHECK(csv.find(",40,,,\n") != std::string::npos);  // no count_contained, no length, no runtime
  const TrialTable t = parse_trials_csv(csv);
  CHECK(t.config_hash == "00000000deadbeef");
  REQUIRE(t.records.size() == 3);
  CHECK(t.records[1].seed == recs[1].seed);
  CHECK(t.records[1].length_estimate == recs[1].length_estimate);
  CHECK_FALSE(t.records[0].length_estimate.has_value());
  CHECK_FALSE(t.records[0].count_contained.has_value());
  CHECK(format_trials_csv(t.config_hash, t.records) == csv);
  const TrialTable j = parse_trials_json(format_trials_json("00000000deadbeef", recs));
  CHECK(format_trials_csv(j.config_hash, j.records) == csv);
}

TEST_CASE("damaged trial tables are rejected") {
  const std::string csv = format_trials_csv("00000000deadbeef", std::vector<TrialRecord>{record(20, 0), record(20, 1)});
  CHECK_THROWS_AS(parse_trials_csv(csv.substr(0, csv.size() - 3)), IntegrityError);
  CHECK_THROWS_AS(parse_trials_csv("config_hash,experiment\n"), SchemaError);
  std::string other = csv;
  other.replace(other.rfind("00000000deadbeef"), 16, "00000000deadbeee");
  CHECK_THROWS_AS(parse_trials_csv(other), IntegrityError);
  std::string short_row = csv.substr(0, csv.size() - 1);
  short_row = short_row.substr(0, short_row.rfind(',')) + "\n";
  CHECK_THROWS_AS(parse_trials_csv(short_row), IntegrityError);
  CHECK_THROWS_AS(parse_trials_json(R"({"schema_version": 99, "config_hash": "", "records": []})"), SchemaError);
}

TEST_CASE("svg rendering") {
  Chart c{"t", "x", "y", {{"s", {1, 2, 3}, {1, 4, 9}, {0.1, 0.1, 0.1}, false}}};
  const std::string svg = render_svg(c);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  Chart empty{"t", "x", "y", {{"s", {1}, {std::nan("")}, {}, false}}};
  CHECK_THROWS_AS(render_svg(empty), std::runtime_error);
}

TEST_CASE("planar/spherical agreement uses the combined half-width") {
  CnsEstimate s;
  s.c_hat = 4 * std::numbers::pi * 0.0044;
  s.ci = {4 * std::numbers::pi * 0.0043, 4 * std::numbers::pi * 0.0045};
  RwmEstimate p;
  p.c_hat = 0.00455;
  p.ci = {0.0044, 0.0047};
  // Half-widths 0.0001 and 0.00015: allowance 0.00018 >= 0.00015.
  CHECK(planar_spherical_agreement(s, p).pass);
  p.c_hat = 0.0047;
  CHECK_FALSE(planar_spherical_agreement(s, p).pass);
}

TEST_CASE("cli exit codes") {
  CHECK(invoke({"bogus"}).code == kExitUsage);
  CHECK(invoke({"cns", "--no-such-flag", "1"}).code == kExitUsage);
  CHECK(invoke({}).code == kExitUsage);
  const fs::path dir = scratch("codes");
  const Cli q = invoke({"cns", "--degrees", "10", "--trials", "50", "--oversample", "2", "--out", dir.string()});
  CHECK(q.code == kExitInvalidParameter);
  CHECK(q.err.find("oversample") != std::string::npos);
  CHECK(invoke({"cns", "--trials", "10", "--out", dir.string()}).code == kExitStatistics);
  CHECK(invoke({"demo-basis", "--out", "/proc/forbidden/run"}).code == kExitOutput);
  CHECK(invoke({"demo-basis", "--config", (dir / "missing.txt").string()}).code == kExitUsage);
  CHECK(invoke({"--help"}).code == kExitOk);
}

TEST_CASE("demo-basis run writes a self-describing summary") {
  const fs::path dir = scratch("demo");
  const Cli r = invoke({"demo-basis", "--n", "25", "--trials", "2000", "--seed", "3", "--check", "--out", dir.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("{-1: ") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["config_hash"] == RunConfig::parse(slurp(dir / "config.txt")).hash());
  const auto& demo = j["demo_basis"];
  for (const char* key : {"estimate", "se", "ci_low", "ci_high", "n_trials", "checks"}) CHECK(demo.contains(key));
  CHECK(demo["rotated"]["support"].size() == 3);
  CHECK(demo["checks"][0]["pass"] == true);
}

TEST_CASE("config file with flag overrides") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  spit(dir / "run.txt", "experiment = demo-basis\n# fewer trials\ntrials = 1000\nn = 9\n");
  const fs::path out = dir / "out";
  CHECK(invoke({"demo-basis", "--config", (dir / "run.txt").string(), "--n", "11", "--out", out.string()}).code == 0);
  const RunConfig used = RunConfig::parse(slurp(out / "config.txt"));
  CHECK(used.get_int("trials") == 1000);
  CHECK(used.get_int("n") == 11);
}

TEST_CASE("--check turns a failing rule into exit code 1") {
  // Seven Rademacher terms at n = 3 are far from Gaussian: KS < 0.05 fails.
  const fs::path dir = scratch("check");
  const Cli r = invoke({"clt", "--degrees", "2,3", "--dist", "rademacher", "--samples", "1000", "--check", "--out", dir.string()});
  CHECK(r.code == kExitCheckFailed);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("replay reproduces, detects truncation, and flags tampering") {
  const fs::path dir = scratch("replay");
  REQUIRE(invoke({"cns", "--degrees", "10,14", "--trials", "60", "--bootstrap", "1000", "--seed", "7", "--out", dir.string()}).code == 0);
  const std::string original = slurp(dir / "summary.json");

  const Cli same = invoke({"replay", dir.string()});
  CHECK(same.code == kExitOk);
  CHECK(slurp(dir / "summary.replay.json") == original);

  const fs::path cut = scratch("replay_cut");
  fs::copy(dir, cut);
  const std::string csv = slurp(dir / "trials.csv");
  spit(cut / "trials.csv", csv.substr(0, csv.size() - 20));
  CHECK(invoke({"replay", cut.string()}).code == kExitIntegrity);
  // Dropping whole rows keeps the file well formed but short.
  std::string rows = csv.substr(0, csv.size() - 1);
  rows = rows.substr(0, rows.rfind('\n') + 1);
  spit(cut / "trials.csv", rows);
  CHECK(invoke({"replay", cut.string()}).code == kExitIntegrity);

  const fs::path tamper = scratch("replay_tamper");
  fs::copy(dir, tamper);
  std::string cfg = slurp(dir / "config.txt");
  cfg.replace(cfg.find("bootstrap = 1000"), 16, "bootstrap = 1500");
  spit(tamper / "config.txt", cfg);
  const Cli t = invoke({"replay", tamper.string()});
  CHECK(t.code == kExitOk);
  CHECK(t.err.find("hash mismatch") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(tamper / "summary.replay.json"));
  CHECK(j["integrity"]["config_hash_mismatch"] == true);
  CHECK(j["integrity"]["recorded_config_hash"] == nlohmann::json::parse(original)["config_hash"]);

  const fs::path schema = scratch("replay_schema");
  fs::copy(dir, schema);
  std::string s = original;
  s.replace(s.find("\"schema_version\": 1"), 19, "\"schema_version\": 2");
  spit(schema / "summary.json", s);
  CHECK(invoke({"replay", schema.string()}).code == kExitIntegrity);
}

TEST_CASE("json trial format replays too") {
  const fs::path dir = scratch("json");
  REQUIRE(invoke({"rwm", "--radii", "5,6,7", "--trials", "20", "--waves", "128", "--bootstrap", "500", "--format", "json", "--out", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "trials.json"));
  CHECK(fs::exists(dir / "rwm.svg"));
  CHECK(invoke({"replay", dir.string()}).code == kExitOk);
}

TEST_CASE("reruns are byte identical across thread counts") {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  REQUIRE(invoke({"universality", "--n", "10", "--trials", "200", "--bootstrap", "500", "--threads", "1", "--out", a.string()}).code == 0);
  REQUIRE(invoke({"universality", "--n", "10", "--trials", "200", "--bootstrap", "500", "--threads", "4", "--out", b.string()}).code == 0);
  CHECK(slurp(a / "trials.csv") == slurp(b / "trials.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}
