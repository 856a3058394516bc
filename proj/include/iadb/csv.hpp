#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "iadb/vec.hpp"

namespace iadb {

/// Formats a double with enough digits to round-trip exactly ("%.17g",
/// C-locale decimal point).
std::string format_double(double v);

/// Point-set CSV: one point per row, columns x0..x(d-1), '.' decimal
/// separator. Written without a header; readers accept an optional header
/// row.
void write_points_csv(const std::filesystem::path& path, const std::vector<Vec>& points,
                      bool header = false);
std::vector<Vec> read_points_csv(const std::filesystem::path& path);

/// Generic row writer used by reports (step/alpha/deviation tables, loss
/// traces, histograms).
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  ~CsvWriter();

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace iadb
