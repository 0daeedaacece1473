#include "dtwgi/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dtwgi/error.hpp"

namespace dtwgi {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string &s) {
  if (s.empty() || std::isspace(static_cast<unsigned char>(s.front())))
    throw DataError("not a number: '" + s + "'");
  errno = 0;
  char *end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  // ERANGE on underflow still yields the nearest subnormal; only overflow is fatal.
  if (end != s.c_str() + s.size() || (errno == ERANGE && std::isinf(v)))
    throw DataError("not a number: '" + s + "'");
  return v;
}

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

long long header_field(const std::string &header, const std::string &key) {
  const auto pos = header.find(key + "=");
  if (pos == std::string::npos) throw DataError("series header lacks '" + key + "='");
  const std::string rest = header.substr(pos + key.size() + 1);
  const auto stop = rest.find_first_of(" \t\r");
  const std::string num = rest.substr(0, stop);
  char *end = nullptr;
  const long long v = std::strtoll(num.c_str(), &end, 10);
  if (num.empty() || *end != '\0' || v < 1)
    throw DataError("bad " + key + " in series header: '" + num + "'");
  return v;
}

// Minimal RFC 4180 quoting: only cells containing separators get quotes.
std::string quote(const std::string &cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> parse_csv_line(const std::string &line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (quoted) throw DataError("unterminated quote in CSV line");
  cells.push_back(std::move(cell));
  return cells;
}

} // namespace

void write_series(std::ostream &os, const TimeSeries &x) {
  os << "# dims=" << x.dims() << " length=" << x.length() << '\n';
  for (Eigen::Index t = 0; t < x.length(); ++t) {
    for (Eigen::Index c = 0; c < x.dims(); ++c) {
      if (c) os << ',';
      os << format_double(x.values()(t, c));
    }
    os << '\n';
  }
}

TimeSeries read_series(std::istream &is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("#", 0) != 0)
    throw DataError("series file must start with '# dims=<p> length=<T>'");
  const long long p = header_field(header, "dims");
  const long long T = header_field(header, "length");
  Matrix values(T, p);
  std::string line;
  long long t = 0;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    if (t == T) throw DataError("series file has more rows than length=" + std::to_string(T));
    const auto cells = split_commas(line);
    if (static_cast<long long>(cells.size()) != p)
      throw DimensionError("series row " + std::to_string(t + 1) + " has wrong width",
                           static_cast<long long>(cells.size()), p);
    for (long long c = 0; c < p; ++c) {
      const double v = parse_double(cells[c]);
      if (!std::isfinite(v)) throw DataError("non-finite value in series file");
      values(t, c) = v;
    }
    ++t;
  }
  if (t != T)
    throw DataError("series file has " + std::to_string(t) + " rows, header says " +
                    std::to_string(T));
  return TimeSeries(std::move(values));
}

void save_series(const std::filesystem::path &path, const TimeSeries &x) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  write_series(os, x);
  if (!os) throw DataError("write failed: " + path.string());
}

TimeSeries load_series(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot read " + path.string());
  try {
    return read_series(is);
  } catch (const DimensionError &) {
    throw;
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

ResultTable::ResultTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw ConfigError("result table needs at least one column");
}

void ResultTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw ConfigError("row has " + std::to_string(row.size()) + " cells, table has " +
                      std::to_string(header_.size()) + " columns");
  rows_.push_back(std::move(row));
}

std::size_t ResultTable::column_index(const std::string &name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return i;
  throw ConfigError("no column '" + name + "'");
}

std::vector<std::string> ResultTable::column(const std::string &name) const {
  const std::size_t j = column_index(name);
  std::vector<std::string> out;
  out.reserve(rows_.size());
  for (const auto &r : rows_) out.push_back(r[j]);
  return out;
}

std::vector<double> ResultTable::numeric_column(const std::string &name) const {
  std::vector<double> out;
  for (const auto &cell : column(name)) out.push_back(parse_double(cell));
  return out;
}

void ResultTable::write(std::ostream &os) const {
  auto line = [&os](const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << quote(cells[i]);
    }
    os << '\n';
  };
  line(header_);
  for (const auto &r : rows_) line(r);
}

ResultTable ResultTable::read(std::istream &is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("empty CSV");
  ResultTable table(parse_csv_line(line));
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = parse_csv_line(line);
    if (cells.size() != table.header_.size())
      throw DataError("CSV line " + std::to_string(lineno) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(table.header_.size()));
    table.rows_.push_back(std::move(cells));
  }
  return table;
}

void ResultTable::save(const std::filesystem::path &path) const {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  write(os);
  if (!os) throw DataError("write failed: " + path.string());
}

ResultTable ResultTable::load(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot read " + path.string());
  return read(is);
}

} // namespace dtwgi
