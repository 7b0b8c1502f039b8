// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace spikecp {

// RFC-4180 style writer: header row, CRLF-free LF lines, quoting only where
// needed, deterministic numeric formatting.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }

  std::string header() const { return join(columns_); }

  void add_row(std::vector<std::string> fields) { rows_.push_back(std::move(fields)); }

  std::string serialize() const {
    std::string out = header();
    out.push_back('\n');
    for (const auto& row : rows_) {
      out += join(row);
      out.push_back('\n');
    }
    return out;
  }

  static std::string field(const std::string& s) { return s; }
  static std::string field(std::int64_t v) { return std::to_string(v); }
  static std::string field(std::uint64_t v) { return std::to_string(v); }
  static std::string field(int v) { return std::to_string(v); }

  // Fixed formatting keeps rerun output byte-identical.
  static std::string field(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
  }

  static std::string quote(const std::string& raw) {
    bool needs = false;
    for (char c : raw)
      if (c == ',' || c == '"' || c == '\n' || c == '\r') needs = true;
    if (!needs) return raw;
    std::string out = "\"";
    for (char c : raw) {
      if (c == '"') out += "\"\"";
      else out.push_back(c);
    }
    out += "\"";
    return out;
  }

 private:
  static std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out.push_back(',');
      out += quote(fields[i]);
    }
    return out;
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace spikecp
