#include "nodal_cli/records.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nodal::cli {

namespace {

std::string shortest(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

template <class T>
std::string opt_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return shortest(*v);
  } else {
    return std::to_string(*v);
  }
}

void check_field(const std::string& s, const char* what) {
  if (s.find_first_of(",\n\r\"") != std::string::npos) {
    throw OutputError(std::string(what) + " contains a character that cannot be stored in CSV: " + s);
  }
}

template <class T>
T parse_number(std::string_view s, std::size_t line, const char* column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw IntegrityError("trials.csv line " + std::to_string(line) + ": bad " + column + " '" + std::string(s) + "'");
  }
  return value;
}

template <class T>
std::optional<T> parse_optional(std::string_view s, std::size_t line, const char* column) {
  if (s.empty()) return std::nullopt;
  return parse_number<T>(s, line, column);
}

}  // namespace

std::string format_trials_csv(const std::string& config_hash, std::span<const TrialRecord> records) {
  std::string out = kTrialColumns;
  out += '\n';
  for (const TrialRecord& r : records) {
    check_field(r.experiment, "experiment");
    check_field(r.dist, "dist");
    out += config_hash + ',' + r.experiment + ',' + std::to_string(r.degree) + ',' + r.dist + ',' +
           std::to_string(r.trial_index) + ',' + std::to_string(r.seed) + ',' + opt_field(r.count_total) + ',' +
           opt_field(r.count_contained) + ',' + opt_field(r.length_estimate) + ',' + opt_field(r.runtime_ms) + '\n';
  }
  return out;
}

TrialTable parse_trials_csv(const std::string& text) {
  TrialTable table;
  const std::string header = kTrialColumns;
  if (text.compare(0, header.size(), header) != 0 ||
      (text.size() > header.size() && text[header.size()] != '\n' && text[header.size()] != '\r')) {
    throw SchemaError("trials.csv: unexpected header (expected '" + header + "')");
  }
  if (!text.empty() && text.back() != '\n') throw IntegrityError("trials.csv: truncated (no final newline)");
  std::size_t pos = text.find('\n');
  std::size_t line = 1;
  while (pos != std::string::npos && pos + 1 < text.size()) {
    const std::size_t start = pos + 1;
    pos = text.find('\n', start);
    ++line;
    std::string_view row(text.data() + start, (pos == std::string::npos ? text.size() : pos) - start);
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    std::array<std::string_view, 10> f;
    std::size_t count = 0;
    std::size_t s = 0;
    while (count < f.size()) {
      const std::size_t comma = row.find(',', s);
      f[count++] = row.substr(s, comma == std::string_view::npos ? std::string_view::npos : comma - s);
      if (comma == std::string_view::npos) break;
      s = comma + 1;
    }
    if (count != f.size() || row.find(',', s) != std::string_view::npos) {
      throw IntegrityError("trials.csv line " + std::to_string(line) + ": expected 10 fields");
    }
    if (table.config_hash.empty()) {
      table.config_hash = std::string(f[0]);
    } else if (f[0] != table.config_hash) {
      throw IntegrityError("trials.csv line " + std::to_string(line) + ": config_hash differs from the first row");
    }
    TrialRecord r;
    r.experiment = std::string(f[1]);
    r.degree = parse_number<int>(f[2], line, "degree");
    r.dist = std::string(f[3]);
    r.trial_index = parse_number<std::uint64_t>(f[4], line, "trial_index");
    r.seed = parse_number<std::uint64_t>(f[5], line, "seed");
    r.count_total = parse_optional<int>(f[6], line, "count_total");
    r.count_contained = parse_optional<int>(f[7], line, "count_contained");
    r.length_estimate = parse_optional<double>(f[8], line, "length_estimate");
    r.runtime_ms = parse_optional<double>(f[9], line, "runtime_ms");
    table.records.push_back(std::move(r));
  }
  return table;
}

std::string format_trials_json(const std::string& config_hash, std::span<const TrialRecord> records) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["config_hash"] = config_hash;
  doc["columns"] = kTrialColumns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const TrialRecord& r : records) {
    nlohmann::ordered_json row;
    row["config_hash"] = config_hash;
    row["experiment"] = r.experiment;
    row["degree"] = r.degree;
    row["dist"] = r.dist;
    row["trial_index"] = r.trial_index;
    row["seed"] = r.seed;
    row["count_total"] = r.count_total ? nlohmann::ordered_json(*r.count_total) : nlohmann::ordered_json(nullptr);
    row["count_contained"] =
        r.count_contained ? nlohmann::ordered_json(*r.count_contained) : nlohmann::ordered_json(nullptr);
    row["length_estimate"] =
        r.length_estimate ? nlohmann::ordered_json(*r.length_estimate) : nlohmann::ordered_json(nullptr);
    row["runtime_ms"] = r.runtime_ms ? nlohmann::ordered_json(*r.runtime_ms) : nlohmann::ordered_json(nullptr);
    rows.push_back(std::move(row));
  }
  doc["records"] = std::move(rows);
  return doc.dump(1) + "\n";
}

TrialTable parse_trials_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IntegrityError(std::string("trials.json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version") || doc["schema_version"] != kSchemaVersion) {
    throw SchemaError("trials.json: unsupported schema_version");
  }
  TrialTable table;
  try {
    table.config_hash = doc.at("config_hash").get<std::string>();
    for (const auto& row : doc.at("records")) {
      TrialRecord r;
      if (row.at("config_hash").get<std::string>() != table.config_hash) {
        throw IntegrityError("trials.json: record config_hash differs from the table");
      }
      r.experiment = row.at("experiment").get<std::string>();
      r.degree = row.at("degree").get<int>();
      r.dist = row.at("dist").get<std::string>();
      r.trial_index = row.at("trial_index").get<std::uint64_t>();
      r.seed = row.at("seed").get<std::uint64_t>();
      if (!row.at("count_total").is_null()) r.count_total = row["count_total"].get<int>();
      if (!row.at("count_contained").is_null()) r.count_contained = row["count_contained"].get<int>();
      if (!row.at("length_estimate").is_null()) r.length_estimate = row["length_estimate"].get<double>();
      if (!row.at("runtime_ms").is_null()) r.runtime_ms = row["runtime_ms"].get<double>();
      table.records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("trials.json: ") + e.what());
  }
  return table;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot write " + path);
  out << content;
  out.flush();
  if (!out) throw OutputError("error while writing " + path);
}

}  // namespace nodal::cli
