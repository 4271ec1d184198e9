#pragma once

// CSV and JSON output. Numbers are written in the shortest form that reads
// back to the same double, so files are byte-stable and round-trip exactly.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "zopo/algorithms.hpp"
#include "zopo/analysis.hpp"
#include "zopo/core/error.hpp"

namespace zopo::io {

inline constexpr int kSchemaVersion = 1;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

inline std::string format_cell(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const { return s; }
  } visit;
  return std::visit(visit, c);
}

template <class T>
Cell opt_cell(const std::optional<T>& v) {
  if (!v) return std::monostate{};
  if constexpr (std::is_floating_point_v<T>) return static_cast<double>(*v);
  else return static_cast<std::int64_t>(*v);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw Error("table row width does not match the header");
    rows.push_back(std::move(row));
  }
};

inline std::string join_point(const Point& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += ';';
    s += format_double(x[i]);
  }
  return s;
}

/// CSV text: a '#'-prefixed header line carrying the schema version and the
/// resolved configuration, then the column names and rows.
inline std::string to_csv(const Table& t, const nlohmann::json& config) {
  std::ostringstream os;
  os << "# zopo schema=" << kSchemaVersion << " config=" << config.dump() << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

inline void write_csv(const std::filesystem::path& path, const Table& t, const nlohmann::json& config) {
  write_text(path, to_csv(t, config));
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Traces

inline const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{"iter",       "x",         "f",   "env_value", "env_grad_norm",
                                             "step_norm", "ess", "n_samples", "lambda",    "delta"};
  return cols;
}

inline Table trace_table(const RunTrace& trace) {
  Table t;
  t.columns = trace_columns();
  for (const auto& r : trace.records) {
    t.add({static_cast<std::int64_t>(r.k), join_point(r.x), r.f_value, opt_cell(r.env_value),
           opt_cell(r.env_grad_norm), opt_cell(r.step_norm), opt_cell(r.ess), opt_cell(r.n_samples), r.lambda,
           r.delta});
  }
  return t;
}

inline nlohmann::json trace_summary(const RunTrace& trace) {
  const auto& last = trace.final_record();
  nlohmann::json s = {{"terminated_by", to_string(trace.terminated_by)},
                      {"iterations", last.k},
                      {"final_x", std::vector<double>(last.x.data(), last.x.data() + last.x.size())},
                      {"final_f", last.f_value},
                      {"path_length", trace.path_length()}};
  if (last.env_value) s["final_env_value"] = *last.env_value;
  if (last.env_grad_norm) s["final_env_grad_norm"] = *last.env_grad_norm;
  const bool sampled = !trace.records.empty() && trace.records.front().env_grad_estimated;
  s["env_grad_norm_source"] = sampled ? "step_norm/lambda (sampled surrogate)" : "exact oracle";
  return s;
}

inline nlohmann::json warnings_json(const RunTrace& trace) {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& x : trace.warnings) w.push_back({{"k", x.k}, {"message", x.message}, {"log_ratio", x.log_ratio}});
  return w;
}

/// Writes <stem>.csv and <stem>.json (config echo, summary, warnings).
inline void write_trace(const std::filesystem::path& stem, const RunTrace& trace) {
  std::filesystem::path csv = stem;
  csv += ".csv";
  std::filesystem::path js = stem;
  js += ".json";
  write_csv(csv, trace_table(trace), trace.config_echo);
  write_json(js, {{"schema", kSchemaVersion},
                  {"config_echo", trace.config_echo},
                  {"summary", trace_summary(trace)},
                  {"warnings", warnings_json(trace)}});
}

// ---------------------------------------------------------------------------
// Bound reports

inline nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j = {{"name", r.name}, {"inputs", r.inputs}, {"bound", r.bound}, {"log_bound", r.log_bound}};
  j["empirical"] = r.empirical ? nlohmann::json(*r.empirical) : nlohmann::json(nullptr);
  j["satisfied"] = r.satisfied ? nlohmann::json(*r.satisfied) : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------
// Reading traces back (for the bounds command)

struct TraceRow {
  std::size_t k;
  Point x;
  double f;
  std::optional<double> env_grad_norm;
  double lambda;
  double delta;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw InvalidInput("not a number: '" + s + "'");
  return v;
}

/// The config JSON from a `# zopo schema=... config=...` first line, or null.
inline nlohmann::json read_csv_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line) || line.rfind("# zopo schema=", 0) != 0) return nullptr;
  const auto pos = line.find("config=");
  if (pos == std::string::npos) return nullptr;
  return nlohmann::json::parse(line.substr(pos + 7), nullptr, false);
}

inline std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open trace file " + path.string());
  std::string line;
  std::vector<std::string> header;
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (header.empty()) {
      header = cells;
      if (header != trace_columns()) throw InvalidInput("trace file " + path.string() + " has an unexpected header");
      continue;
    }
    if (cells.size() != header.size()) throw InvalidInput("malformed trace row in " + path.string());
    TraceRow r;
    r.k = static_cast<std::size_t>(parse_double(cells[0]));
    const auto xs = split(cells[1], ';');
    r.x.resize(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) r.x[static_cast<Eigen::Index>(i)] = parse_double(xs[i]);
    r.f = parse_double(cells[2]);
    if (!cells[4].empty()) r.env_grad_norm = parse_double(cells[4]);
    r.lambda = parse_double(cells[8]);
    r.delta = parse_double(cells[9]);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw InvalidInput("trace file " + path.string() + " has no rows");
  return rows;
}

}  // namespace zopo::io
