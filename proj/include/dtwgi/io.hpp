#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtwgi/time_series.hpp"

namespace dtwgi {

/// Shortest decimal that reads back to the same double (17 significant digits).
std::string format_double(double v);
/// Strict decimal parse; the whole string must be consumed.
double parse_double(const std::string &s);

// Series files: a `# dims=<p> length=<T>` header, then one comma-separated
// row per observation. Parse failures throw DataError.
void write_series(std::ostream &os, const TimeSeries &x);
TimeSeries read_series(std::istream &is);
void save_series(const std::filesystem::path &path, const TimeSeries &x);
TimeSeries load_series(const std::filesystem::path &path);

/// Rectangular CSV table with a header row. Cells are kept as text so a
/// read-write cycle reproduces the file byte for byte.
class ResultTable {
public:
  ResultTable() = default;
  explicit ResultTable(std::vector<std::string> header);

  const std::vector<std::string> &header() const { return header_; }
  const std::vector<std::vector<std::string>> &rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// Throws ConfigError if the row width differs from the header.
  void add_row(std::vector<std::string> row);

  std::size_t column_index(const std::string &name) const;
  std::vector<std::string> column(const std::string &name) const;
  std::vector<double> numeric_column(const std::string &name) const;

  void write(std::ostream &os) const;
  static ResultTable read(std::istream &is);
  void save(const std::filesystem::path &path) const;
  static ResultTable load(const std::filesystem::path &path);

  bool operator==(const ResultTable &other) const = default;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

} // namespace dtwgi
