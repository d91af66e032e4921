#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace biot {

/// Comma-separated output with LF line endings; reals use 17 significant
/// digits so that values round-trip exactly.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  }

  static std::string format(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
  }

  void header(const std::vector<std::string>& columns) { write_cells(columns); }
  /// Row of preformatted cells.
  void text_row(const std::vector<std::string>& cells) { write_cells(cells); }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format(v));
    write_cells(cells);
  }

  /// Row with possibly-missing entries, written as empty cells.
  void row(const std::vector<std::optional<double>>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (const auto& v : values) cells.push_back(v ? format(*v) : std::string{});
    write_cells(cells);
  }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("CSV write failed");
  }

  std::ofstream out_;
};

}  // namespace biot
