#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadsub/core.hpp"

namespace quadsub {

using Json = nlohmann::ordered_json;

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// A measured-vs-expected check: pass iff |measured - expected| <= tolerance.
inline CheckResult make_check(const std::string& name, double measured,
                              double expected, double tolerance) {
  return CheckResult{name, measured, expected, tolerance,
                     std::abs(measured - expected) <= tolerance};
}

/// A bound check: pass iff measured <= bound.
inline CheckResult make_bound_check(const std::string& name, double measured,
                                    double bound) {
  return CheckResult{name, measured, bound, 0.0, measured <= bound};
}

struct RunReport {
  std::string command;
  Json inputs = Json::object();
  std::vector<CheckResult> checks;
  Json extra = Json::object();
  double elapsed_seconds = 0.0;
  bool with_timing = true;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  Json to_json() const {
    Json j;
    j["schema"] = "quadsub-report/1";
    j["command"] = command;
    j["inputs"] = inputs;
    Json checks_json = Json::array();
    for (const auto& c : checks) {
      Json cj;
      cj["name"] = c.name;
      cj["measured"] = c.measured;
      cj["expected"] = c.expected;
      cj["tolerance"] = c.tolerance;
      cj["pass"] = c.pass;
      checks_json.push_back(cj);
    }
    j["checks"] = checks_json;
    if (!extra.empty()) j["extra"] = extra;
    j["pass"] = all_pass();
    if (with_timing) j["timings"] = Json{{"elapsed_seconds", elapsed_seconds}};
    return j;
  }
};

/// Writes through a temp file and renames, so readers never see partial data.
inline void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp + " for writing");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

// CSV with a header row, snake_case columns, '.' decimal independent of
// locale. Rows accumulate in memory; flush() writes atomically, so a partial
// table can still be emitted after a failure.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(const std::vector<double>& row) {
    if (row.size() != columns_.size()) throw Error("CsvWriter: column count mismatch");
    rows_.push_back(row);
  }

  std::string str() const {
    std::string out;
    for (size_t i = 0; i < columns_.size(); ++i)
      out += (i ? "," : "") + columns_[i];
    out += "\n";
    char buf[64];
    for (const auto& row : rows_) {
      for (size_t i = 0; i < row.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
        if (i) out += ",";
        out += buf;
      }
      out += "\n";
    }
    return out;
  }

  void flush(const std::string& path) const { write_atomic(path, str()); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// Parses {"n": int, "Q_re": [[...]], "Q_im": [[...]]}, row-major 2n x 2n.
inline QuadraticSymbol symbol_from_json(const Json& j) {
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw std::invalid_argument("symbol: missing integer field 'n'");
  const int n = j["n"].get<int>();
  if (n <= 0) throw std::invalid_argument("symbol: n must be positive");
  const int d = 2 * n;

  const auto parse_matrix = [&](const char* key, bool required) -> Mat {
    if (!j.contains(key)) {
      if (required) throw std::invalid_argument(std::string("symbol: missing ") + key);
      return Mat::Zero(d, d);
    }
    const auto& rows = j[key];
    if (!rows.is_array() || static_cast<int>(rows.size()) != d)
      throw std::invalid_argument(std::string("symbol: ") + key + " must be " +
                                  std::to_string(d) + " rows");
    Mat m(d, d);
    for (int r = 0; r < d; ++r) {
      const auto& row = rows[r];
      if (!row.is_array() || static_cast<int>(row.size()) != d)
        throw std::invalid_argument(std::string("symbol: ") + key + " row " +
                                    std::to_string(r) + " must have " +
                                    std::to_string(d) + " entries");
      for (int c = 0; c < d; ++c) {
        if (!row[c].is_number())
          throw std::invalid_argument(std::string("symbol: ") + key + " entries must be numbers");
        m(r, c) = row[c].get<double>();
      }
    }
    return m;
  };

  return QuadraticSymbol(n, parse_matrix("Q_re", true), parse_matrix("Q_im", false));
}

}  // namespace quadsub
