#include "iadb/csv.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace iadb {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_points_csv(const std::filesystem::path& path, const std::vector<Vec>& points,
                      bool header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_points_csv: cannot open " + path.string());
  if (header && !points.empty()) {
    for (std::size_t k = 0; k < points.front().size(); ++k)
      out << (k ? "," : "") << "x" << k;
    out << "\n";
  }
  for (const auto& p : points) {
    for (std::size_t k = 0; k < p.size(); ++k) out << (k ? "," : "") << format_double(p[k]);
    out << "\n";
  }
}

namespace {

bool looks_like_header(const std::string& line) {
  for (char c : line)
    if (std::isalpha(static_cast<unsigned char>(c))) return true;
  return false;
}

}  // namespace

std::vector<Vec> read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_points_csv: cannot open " + path.string());
  std::vector<Vec> points;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && looks_like_header(line)) continue;
    Vec p;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw std::runtime_error("read_points_csv: bad number '" + cell + "' at line " +
                                 std::to_string(lineno) + " of " + path.string());
      }
      p.push_back(v);
    }
    if (p.empty())
      throw std::runtime_error("read_points_csv: empty row at line " + std::to_string(lineno));
    if (dim == 0)
      dim = p.size();
    else if (p.size() != dim)
      throw std::runtime_error("read_points_csv: inconsistent column count at line " +
                               std::to_string(lineno) + " of " + path.string());
    points.push_back(std::move(p));
  }
  return points;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::filesystem::path& path) : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) {
    delete impl_;
    throw std::runtime_error("CsvWriter: cannot open " + path.string());
  }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) impl_->out << (i ? "," : "") << names[i];
  impl_->out << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    impl_->out << (i ? "," : "") << format_double(values[i]);
  impl_->out << "\n";
}

void CsvWriter::raw_row(const std::string& line) { impl_->out << line << "\n"; }

}  // namespace iadb
