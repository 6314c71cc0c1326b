#include "nodal_cli/config.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nodal/rng.hpp"

namespace nodal::cli {

namespace {

std::vector<ParamSpec> with_common(std::vector<ParamSpec> own) {
  std::vector<ParamSpec> all = {
      {"seed", ParamType::Seed, "0", "master seed"},
      {"threads", ParamType::Int, "0", "worker threads (0: NODAL_CENSUS_THREADS or hardware)", false},
      {"out", ParamType::String, "nodal-out", "output directory", false},
      {"format", ParamType::String, "csv", "trial table format: csv or json", false},
      {"check", ParamType::Bool, "false", "exit nonzero when an acceptance check fails", false},
      {"timing", ParamType::Bool, "false", "record per-trial runtime_ms", false},
  };
  all.insert(all.end(), own.begin(), own.end());
  return all;
}

const std::map<std::string, std::vector<ParamSpec>, std::less<>>& schemas() {
  static const std::map<std::string, std::vector<ParamSpec>, std::less<>> table = {
      {"cns", with_common({
                  {"degrees", ParamType::IntList, "20,40,60,80", "degree ladder"},
                  {"dist", ParamType::String, "gaussian", "coefficient law"},
                  {"trials", ParamType::Int, "200", "trials per degree"},
                  {"oversample", ParamType::Int, "8", "grid oversampling q"},
                  {"basis", ParamType::String, "standard", "standard or pole-rotated-pair"},
                  {"crofton", ParamType::Int, "0", "great circles for the length estimate (0: off)"},
                  {"bootstrap", ParamType::Int, "10000", "bootstrap resamples"},
                  {"level", ParamType::Real, "0.95", "confidence level"},
              })},
      {"universality", with_common({
                           {"n", ParamType::Int, "60", "degree"},
                           {"dist-a", ParamType::String, "gaussian", "first coefficient law"},
                           {"dist-b", ParamType::String, "rademacher", "second coefficient law"},
                           {"trials", ParamType::Int, "400", "trials per arm"},
                           {"oversample", ParamType::Int, "8", "grid oversampling q"},
                           {"bootstrap", ParamType::Int, "10000", "bootstrap resamples"},
                           {"level", ParamType::Real, "0.95", "confidence level"},
                       })},
      {"clt", with_common({
                  {"degrees", ParamType::IntList, "10,40,160", "degrees"},
                  {"dist", ParamType::String, "rademacher", "coefficient law"},
                  {"samples", ParamType::Int, "2000", "samples per degree"},
              })},
      {"covariance", with_common({
                         {"degrees", ParamType::IntList, "40,80,160", "degrees"},
                         {"radius", ParamType::Real, "10", "patch scale R"},
                         {"dist", ParamType::String, "gaussian", "coefficient law"},
                         {"trials", ParamType::Int, "2000", "trials per degree"},
                     })},
      {"diagnostics", with_common({
                          {"dist", ParamType::String, "gaussian", "coefficient law"},
                          {"l4-degrees", ParamType::IntList, "20,40,80,160", "L4 census degrees"},
                          {"badset-degrees", ParamType::IntList, "40,80,160", "bad-set degrees"},
                          {"badset-k", ParamType::Real, "2", "bad-set K used for the trend check"},
                          {"badset-radius", ParamType::Real, "2", "bad-set ball radius R (in units of 1/n)"},
                          {"points", ParamType::Int, "2000", "bad-set sample points"},
                          {"sup-degrees", ParamType::IntList, "40,160", "local sup degrees"},
                          {"sup-radius", ParamType::Real, "1", "local sup R"},
                          {"draws", ParamType::Int, "200", "local sup draws per degree"},
                          {"semilocal-degree", ParamType::Int, "80", "semi-locality degree"},
                          {"semilocal-radii", ParamType::RealList, "10,20", "semi-locality patch scales"},
                          {"centers", ParamType::Int, "500", "semi-locality patch centers"},
                          {"inner-degrees", ParamType::IntList, "40,80", "inner-radius degrees"},
                          {"realizations", ParamType::Int, "10", "inner-radius realizations per degree"},
                          {"oversample", ParamType::Int, "8", "grid oversampling q"},
                      })},
      {"rwm", with_common({
                  {"radii", ParamType::RealList, "5,10,20", "disk radii (integers)"},
                  {"waves", ParamType::Int, "1024", "plane waves M"},
                  {"trials", ParamType::Int, "1000", "trials per radius"},
                  {"oversample", ParamType::Int, "8", "lattice oversampling q"},
                  {"fit-order", ParamType::Int, "2", "polynomial order in 1/R of the density fit"},
                  {"bootstrap", ParamType::Int, "10000", "bootstrap resamples"},
                  {"level", ParamType::Real, "0.95", "confidence level"},
              })},
      {"demo-basis", with_common({
                         {"n", ParamType::Int, "25", "degree"},
                         {"dist", ParamType::String, "rademacher", "coefficient law"},
                         {"trials", ParamType::Int, "2000", "trials per basis"},
                     })},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
  throw ConfigError(std::string(key) + ": '" + std::string(value) + "' is not " + std::string(what));
}

std::string canonical_int(std::string_view key, std::string_view v) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || x < -2147483648LL || x > 2147483647LL) {
    bad_value(key, v, "an integer");
  }
  return std::to_string(x);
}

std::string canonical_real(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) bad_value(key, v, "a finite number");
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string canonical_seed(std::string_view key, std::string_view v) {
  std::uint64_t x = 0;
  std::string_view digits = v;
  int base = 10;
  if (digits.starts_with("0x") || digits.starts_with("0X")) {
    digits.remove_prefix(2);
    base = 16;
  }
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), x, base);
  if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
    bad_value(key, v, "an unsigned 64-bit seed");
  }
  return std::to_string(x);
}

std::string canonical_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return "true";
  if (v == "false" || v == "0" || v == "no" || v == "off") return "false";
  bad_value(key, v, "a boolean");
}

std::string canonical(const ParamSpec& spec, std::string_view raw) {
  const std::string_view v = trim(raw);
  switch (spec.type) {
    case ParamType::Int:
      return canonical_int(spec.key, v);
    case ParamType::Real:
      return canonical_real(spec.key, v);
    case ParamType::Seed:
      return canonical_seed(spec.key, v);
    case ParamType::Bool:
      return canonical_bool(spec.key, v);
    case ParamType::String:
      if (v.empty()) bad_value(spec.key, v, "a non-empty string");
      if (v.find_first_of("#\n\r") != std::string_view::npos) bad_value(spec.key, v, "a single-line string");
      return std::string(v);
    case ParamType::IntList:
    case ParamType::RealList: {
      std::string out;
      for (std::string_view item : split(v, ',')) {
        if (!out.empty()) out += ',';
        out += spec.type == ParamType::IntList ? canonical_int(spec.key, item) : canonical_real(spec.key, item);
      }
      return out;
    }
  }
  return std::string(v);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"cns", "universality", "clt", "covariance",
                                                 "diagnostics", "rwm", "demo-basis"};
  return names;
}

const std::vector<ParamSpec>& experiment_schema(std::string_view experiment) {
  const auto& table = schemas();
  const auto it = table.find(experiment);
  if (it == table.end()) throw ConfigError("unknown experiment: " + std::string(experiment));
  return it->second;
}

RunConfig::RunConfig(std::string experiment) : experiment_(std::move(experiment)) {
  for (const ParamSpec& p : experiment_schema(experiment_)) values_[p.key] = canonical(p, p.default_value);
}

const ParamSpec& RunConfig::spec(std::string_view key) const {
  for (const ParamSpec& p : experiment_schema(experiment_)) {
    if (p.key == key) return p;
  }
  throw ConfigError("experiment '" + experiment_ + "' has no parameter '" + std::string(key) + "'");
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const ParamSpec& p = spec(key);
  values_[p.key] = canonical(p, value);
}

const std::string& RunConfig::raw(std::string_view key) const {
  const auto it = values_.find(std::string(key));
  if (it == values_.end()) spec(key);  // throws for unknown keys
  return it->second;
}

int RunConfig::get_int(std::string_view key) const { return std::stoi(raw(key)); }

double RunConfig::get_real(std::string_view key) const { return std::strtod(raw(key).c_str(), nullptr); }

std::uint64_t RunConfig::get_seed(std::string_view key) const { return std::stoull(raw(key)); }

bool RunConfig::get_bool(std::string_view key) const { return raw(key) == "true"; }

const std::string& RunConfig::get_string(std::string_view key) const { return raw(key); }

std::vector<int> RunConfig::get_int_list(std::string_view key) const {
  std::vector<int> out;
  for (std::string_view item : split(raw(key), ',')) out.push_back(std::stoi(std::string(item)));
  return out;
}

std::vector<double> RunConfig::get_real_list(std::string_view key) const {
  std::vector<double> out;
  for (std::string_view item : split(raw(key), ',')) out.push_back(std::strtod(std::string(item).c_str(), nullptr));
  return out;
}

std::string RunConfig::serialize() const {
  std::string out = "experiment = " + experiment_ + "\n";
  for (const ParamSpec& p : experiment_schema(experiment_)) out += p.key + " = " + values_.at(p.key) + "\n";
  return out;
}

namespace {

std::vector<std::pair<std::string, std::string>> parse_lines(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  int line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

}  // namespace

RunConfig RunConfig::parse(std::string_view text, std::optional<std::string> experiment) {
  const auto lines = parse_lines(text);
  std::optional<std::string> named;
  for (const auto& [k, v] : lines) {
    if (k == "experiment") named = v;
  }
  if (named && experiment && *named != *experiment) {
    throw ConfigError("config file is for experiment '" + *named + "', not '" + *experiment + "'");
  }
  if (!named && !experiment) throw ConfigError("config file does not name an experiment");
  RunConfig config(named ? *named : *experiment);
  for (const auto& [k, v] : lines) {
    if (k != "experiment") config.set(k, v);
  }
  return config;
}

void RunConfig::apply_file(std::string_view text) {
  const RunConfig parsed = parse(text, experiment_);
  for (const auto& [k, v] : parse_lines(text)) {
    if (k != "experiment") values_[k] = parsed.values_.at(k);
  }
}

std::string RunConfig::hash() const {
  std::string canonical_text = "experiment=" + experiment_ + "\n";
  for (const ParamSpec& p : experiment_schema(experiment_)) {
    if (p.hashed) canonical_text += p.key + "=" + values_.at(p.key) + "\n";
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng::hash_string(canonical_text)));
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nodal::cli
