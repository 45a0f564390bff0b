#ifndef FSVI_IO_CSV_HPP
#define FSVI_IO_CSV_HPP

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fsvi/error.hpp"
#include "fsvi/io/atomic_write.hpp"
#include "fsvi/types.hpp"

namespace fsvi::io {

struct CsvSchema {
  enum class Kind { kRegression, kBinary, kOneHot };
  Kind kind = Kind::kRegression;
  int classes = 0;  // one-hot only

  static CsvSchema regression() { return {Kind::kRegression, 0}; }
  static CsvSchema binary() { return {Kind::kBinary, 0}; }
  static CsvSchema one_hot(int k) { return {Kind::kOneHot, k}; }

  Index target_columns() const { return kind == Kind::kOneHot ? classes : 1; }
};

struct Dataset {
  Mat inputs;   // N x D
  Mat targets;  // N x 1, or N x K one-hot
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] inline void data_error(const std::filesystem::path& path,
                                    size_t line, const std::string& what) {
  fsvi::detail::fail(ErrorKind::kData, path.string() + ":" +
                                           std::to_string(line) + ": " + what);
}

}  // namespace detail

// Rectangular numeric CSV. Features are all columns but the last (or the
// last K for one-hot targets).
inline Dataset load_csv_dataset(const std::filesystem::path& path,
                                const CsvSchema& schema,
                                bool has_header = false) {
  std::ifstream in(path);
  fsvi::detail::require(static_cast<bool>(in), ErrorKind::kData,
                        "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::vector<size_t> line_of_row;
  std::string line;
  size_t line_no = 0, width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (has_header && line_no == 1) continue;
    if (detail::trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest = line;
    while (true) {
      const size_t comma = rest.find(',');
      const std::string_view cell = detail::trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        detail::data_error(path, line_no,
                           "non-numeric cell '" + std::string(cell) + "'");
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      detail::data_error(path, line_no,
                         "ragged row: expected " + std::to_string(width) +
                             " cells, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
    line_of_row.push_back(line_no);
  }
  fsvi::detail::require(!rows.empty(), ErrorKind::kData,
                        path.string() + ": no data rows");
  const Index t = schema.target_columns();
  if (static_cast<Index>(width) <= t)
    detail::data_error(path, line_of_row.front(),
                       "too few columns for the target schema");

  const Index n = static_cast<Index>(rows.size());
  const Index f = static_cast<Index>(width) - t;
  Dataset d{Mat(n, f), Mat(n, t)};
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<size_t>(i)];
    for (Index j = 0; j < f; ++j) d.inputs(i, j) = row[static_cast<size_t>(j)];
    for (Index j = 0; j < t; ++j) d.targets(i, j) = row[static_cast<size_t>(f + j)];
    const size_t ln = line_of_row[static_cast<size_t>(i)];
    if (schema.kind == CsvSchema::Kind::kBinary) {
      const double y = d.targets(i, 0);
      if (y != 0.0 && y != 1.0)
        detail::data_error(path, ln, "invalid binary label " + std::to_string(y));
    } else if (schema.kind == CsvSchema::Kind::kOneHot) {
      int ones = 0;
      for (Index j = 0; j < t; ++j) {
        const double y = d.targets(i, j);
        if (y != 0.0 && y != 1.0)
          detail::data_error(path, ln, "invalid one-hot entry");
        ones += y == 1.0;
      }
      if (ones != 1) detail::data_error(path, ln, "row is not one-hot");
    }
  }
  return d;
}

inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void write_csv_dataset(const std::filesystem::path& path,
                              const Dataset& d) {
  std::ostringstream os;
  for (Index i = 0; i < d.inputs.rows(); ++i) {
    for (Index j = 0; j < d.inputs.cols(); ++j)
      os << format_double(d.inputs(i, j)) << ',';
    for (Index j = 0; j < d.targets.cols(); ++j)
      os << format_double(d.targets(i, j))
         << (j + 1 < d.targets.cols() ? "," : "");
    os << '\n';
  }
  write_file_atomic(path, os.str());
}

// Header row plus rows of already formatted cells.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header)
      : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells) {
    fsvi::detail::require(cells.size() == header_.size(), ErrorKind::kDimension,
                          "CSV row width differs from header");
    rows_.push_back(std::move(cells));
  }

  std::string str() const {
    std::ostringstream os;
    write_row(os, header_);
    for (const auto& r : rows_) write_row(os, r);
    return os.str();
  }

  void save(const std::filesystem::path& path) const {
    write_file_atomic(path, str());
  }

 private:
  static void write_row(std::ostringstream& os,
                        const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i)
      os << cells[i] << (i + 1 < cells.size() ? "," : "\n");
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace fsvi::io

#endif  // FSVI_IO_CSV_HPP
