#pragma once

// Deterministic CSV output. Every file starts with a header whose first
// column is `schema_version`; every data row repeats the schema tag there.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ksfrag/errors.hpp"

namespace ksfrag::experiment {

/// Shortest round-trip-safe fixed formatting (%.17g), with -0 printed as 0.
inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string schema, const std::vector<std::string>& columns)
      : out_(path, std::ios::binary), schema_(std::move(schema)) {
    if (!out_) throw ConfigError("output: cannot write '" + path.string() + "'");
    out_ << "schema_version";
    for (const auto& c : columns) out_ << ',' << c;
    out_ << '\n';
  }

  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w) { w_.out_ << w_.schema_; }
    Row& operator<<(double v) { return cell(format_double(v)); }
    Row& operator<<(long long v) { return cell(std::to_string(v)); }
    Row& operator<<(long v) { return cell(std::to_string(v)); }
    Row& operator<<(int v) { return cell(std::to_string(v)); }
    Row& operator<<(bool v) { return cell(v ? "1" : "0"); }
    Row& operator<<(std::string_view v) { return cell(v); }
    Row& operator<<(const char* v) { return cell(v); }
    ~Row() { w_.out_ << '\n'; }

   private:
    Row& cell(std::string_view v) {
      w_.out_ << ',' << v;
      return *this;
    }
    CsvWriter& w_;
  };

  Row row() { return Row(*this); }

  /// Trailing `# key=value` record.
  void footer(std::string_view key, double value) { out_ << "# " << key << '=' << format_double(value) << '\n'; }

 private:
  std::ofstream out_;
  std::string schema_;
};

}  // namespace ksfrag::experiment
