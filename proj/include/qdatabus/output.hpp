#pragma once

// CSV and JSON writers. Every double goes out with 17 significant digits so
// a rerun can be compared byte for byte.

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qdatabus/errors.hpp"
#include "qdatabus/experiments.hpp"

namespace qdatabus {

enum class OutputFormat { csv, json };

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::ordered_json metadata(const ExperimentResult& r, bool stamp) {
  nlohmann::ordered_json m;
  m["experiment"] = to_string(r.kind);
  m["version"] = kVersion;
  if (stamp) m["timestamp"] = utc_timestamp();
  m["config"] = r.config;
  return m;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace detail

inline std::string series_to_csv(const Series& s, const nlohmann::ordered_json& meta) {
  for (const auto& col : s.values)
    detail::require(col.size() == s.rows(), "series '" + s.name + "' has ragged columns");
  nlohmann::ordered_json header = meta;
  header["series"] = s.name;
  std::string out = "# " + header.dump() + "\n";
  for (std::size_t i = 0; i < s.columns.size(); ++i) out += (i ? "," : "") + s.columns[i];
  out += "\n";
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = 0; c < s.columns.size(); ++c) {
      if (c) out += ",";
      out += format_double(s.values[c][r]);
    }
    out += "\n";
  }
  return out;
}

inline nlohmann::ordered_json summary_document(const ExperimentResult& r, bool stamp) {
  nlohmann::ordered_json doc = detail::metadata(r, stamp);
  doc["summary"] = r.summary;
  doc["warnings"] = r.warnings;
  return doc;
}

inline nlohmann::ordered_json result_document(const ExperimentResult& r, bool stamp) {
  nlohmann::ordered_json doc = summary_document(r, stamp);
  nlohmann::ordered_json series = nlohmann::ordered_json::object();
  for (const auto& s : r.series) {
    nlohmann::ordered_json cols = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < s.columns.size(); ++i) cols[s.columns[i]] = s.values[i];
    series[s.name] = cols;
  }
  doc["series"] = series;
  return doc;
}

// Returns the files written, in a fixed order.
inline std::vector<std::filesystem::path> write_result(const ExperimentResult& r,
                                                       const std::filesystem::path& dir,
                                                       OutputFormat format, bool stamp = false) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  const std::string stem = to_string(r.kind);
  std::vector<std::filesystem::path> written;
  if (format == OutputFormat::csv) {
    const auto meta = detail::metadata(r, stamp);
    for (const auto& s : r.series) {
      written.push_back(dir / (stem + "_" + s.name + ".csv"));
      detail::write_text(written.back(), series_to_csv(s, meta));
    }
    written.push_back(dir / (stem + "_summary.json"));
    detail::write_text(written.back(), summary_document(r, stamp).dump(2) + "\n");
  } else {
    written.push_back(dir / (stem + ".json"));
    detail::write_text(written.back(), result_document(r, stamp).dump(2) + "\n");
  }
  return written;
}

}  // namespace qdatabus
