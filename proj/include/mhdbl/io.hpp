#pragma once

// Output files: CSV with a provenance header line, versioned JSON documents,
// trajectory records and field snapshots.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mhdbl/energy.hpp"
#include "mhdbl/errors.hpp"
#include "mhdbl/field.hpp"
#include "mhdbl/shear.hpp"

namespace mhdbl::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

inline std::string config_hash(const json& config) { return fnv1a_hex(config.dump()); }

// 17 significant digits, so values round-trip exactly.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string header_line(const std::string& hash) {
  return std::string("# mhdbl ") + kToolVersion + " schema_version=" + std::to_string(kSchemaVersion) +
         " config_hash=" + hash;
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'");
}

// Row-at-a-time CSV writer; every row is flushed so an aborted run keeps
// what it produced.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& hash, const std::vector<std::string>& columns)
      : out_(path), n_cols_(columns.size()) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    out_ << header_line(hash) << '\n';
    write_cells(columns);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != n_cols_) throw InvalidParameter("CsvWriter: row has the wrong number of cells");
    write_cells(cells);
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    row(cells);
  }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    out_.flush();
  }

  std::ofstream out_;
  std::size_t n_cols_;
};

// Common leading fields of every JSON document.
inline json envelope(const std::string& kind, const std::string& hash) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = hash;
  j["kind"] = kind;
  return j;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

// Non-finite numbers become null in JSON.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json records_to_json(const std::vector<EnergyRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json norms = json::object();
    for (const auto& [k, v] : r.norms) norms[k] = number(v);
    arr.push_back({{"t", r.t}, {"norms", norms}});
  }
  return arr;
}

inline std::vector<EnergyRecord> records_from_json(const json& arr) {
  if (!arr.is_array()) throw IoError("records: expected an array");
  std::vector<EnergyRecord> out;
  out.reserve(arr.size());
  for (const auto& item : arr) {
    EnergyRecord r;
    r.t = item.at("t").get<double>();
    for (const auto& [k, v] : item.at("norms").items())
      r.norms[k] = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

inline json shear_norms_to_json(const ShearNorms& n) {
  return {{"d1", n.d1}, {"d2", n.d2}, {"z_d1", n.z_d1}, {"z_d2", n.z_d2}, {"z_d3", n.z_d3}, {"min_d1", n.min_d1}};
}

inline ShearNorms shear_norms_from_json(const json& j) {
  ShearNorms n;
  n.d1 = j.at("d1").get<double>();
  n.d2 = j.at("d2").get<double>();
  n.z_d1 = j.at("z_d1").get<double>();
  n.z_d2 = j.at("z_d2").get<double>();
  n.z_d3 = j.at("z_d3").get<double>();
  n.min_d1 = j.at("min_d1").get<double>();
  return n;
}

enum class Format { Csv, Json };

inline Format format_from_string(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw InvalidParameter("unknown format '" + std::string(s) + "' (expected csv|json)");
}

using Cell = std::variant<double, std::string, bool>;

// Tabular output in either format. CSV rows are flushed as they come; the
// JSON document is written on close(), or with "complete": false if the
// writer is destroyed first.
class TableWriter {
 public:
  TableWriter(const std::filesystem::path& stem, Format fmt, const std::string& hash, const std::string& kind,
              std::vector<std::string> columns)
      : fmt_(fmt), hash_(hash), kind_(kind), columns_(std::move(columns)) {
    path_ = stem;
    path_ += fmt == Format::Csv ? ".csv" : ".json";
    if (fmt_ == Format::Csv) {
      csv_ = std::make_unique<CsvWriter>(path_, hash_, columns_);
    } else {
      rows_ = json::array();
      std::ofstream probe(path_);
      if (!probe) throw IoError("cannot open '" + path_.string() + "' for writing");
    }
  }
  TableWriter(const TableWriter&) = delete;
  TableWriter& operator=(const TableWriter&) = delete;

  ~TableWriter() {
    if (!closed_) {
      try {
        close(false);
      } catch (...) {
      }
    }
  }

  const std::filesystem::path& path() const { return path_; }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_.size()) throw InvalidParameter("TableWriter: row has the wrong number of cells");
    if (fmt_ == Format::Csv) {
      std::vector<std::string> out;
      out.reserve(cells.size());
      for (const auto& c : cells) {
        if (const auto* d = std::get_if<double>(&c)) out.push_back(format_double(*d));
        else if (const auto* b = std::get_if<bool>(&c)) out.push_back(*b ? "true" : "false");
        else out.push_back(std::get<std::string>(c));
      }
      csv_->row(out);
    } else {
      json r = json::array();
      for (const auto& c : cells) {
        if (const auto* d = std::get_if<double>(&c)) r.push_back(number(*d));
        else if (const auto* b = std::get_if<bool>(&c)) r.push_back(*b);
        else r.push_back(std::get<std::string>(c));
      }
      rows_.push_back(std::move(r));
    }
  }

  void row(const std::vector<double>& values) { row(std::vector<Cell>(values.begin(), values.end())); }

  void close(bool complete = true) {
    if (closed_) return;
    closed_ = true;
    if (fmt_ == Format::Csv) {
      csv_.reset();
      return;
    }
    json j = envelope(kind_, hash_);
    j["complete"] = complete;
    j["columns"] = columns_;
    j["rows"] = std::move(rows_);
    write_json(path_, j);
  }

 private:
  Format fmt_;
  std::string hash_, kind_;
  std::vector<std::string> columns_;
  std::filesystem::path path_;
  std::unique_ptr<CsvWriter> csv_;
  json rows_;
  bool closed_ = false;
};

// Union of norm names over all records, in map order.
inline std::vector<std::string> norm_names(const std::vector<EnergyRecord>& records) {
  std::set<std::string> seen;
  for (const auto& r : records)
    for (const auto& kv : r.norms) seen.insert(kv.first);
  return {seen.begin(), seen.end()};
}

inline void write_records_table(const std::filesystem::path& stem, Format fmt, const std::string& hash,
                                const std::vector<EnergyRecord>& records) {
  const auto names = norm_names(records);
  std::vector<std::string> cols{"t"};
  cols.insert(cols.end(), names.begin(), names.end());
  TableWriter w(stem, fmt, hash, "records", cols);
  for (const auto& r : records) {
    std::vector<double> row{r.t};
    for (const auto& n : names) {
      auto it = r.norms.find(n);
      row.push_back(it == r.norms.end() ? std::numeric_limits<double>::quiet_NaN() : it->second);
    }
    w.row(row);
  }
  w.close();
}

// Physical-space values of every stored unknown on the (z, x) grid.
inline void write_snapshot(const std::filesystem::path& stem, Format fmt, const std::string& hash, const Grid& g,
                           const Field& f, double t) {
  const Spectral sp(g);
  std::vector<std::string> cols{"t", "z", "x"};
  std::vector<RMat> phys;
  for (const auto& [name, spec] : f.columns) {
    cols.push_back(name);
    phys.push_back(sp.to_physical(spec));
  }
  TableWriter w(stem, fmt, hash, "snapshot", cols);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n_modes(); ++j) {
      std::vector<double> row{t, g.z(i), sp.x(j)};
      for (const auto& p : phys) row.push_back(p(i, j));
      w.row(row);
    }
  w.close();
}

}  // namespace mhdbl::io
