#include "dtwgi/time_series.hpp"

#include <string>

#include "dtwgi/error.hpp"

namespace dtwgi {

TimeSeries::TimeSeries(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw DataError("time series must have length >= 1 and dims >= 1, got " +
                    std::to_string(values_.rows()) + "x" +
                    std::to_string(values_.cols()));
  if (!values_.allFinite())
    throw DataError("time series contains non-finite values");
}

TimeSeries TimeSeries::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = n > 0 ? static_cast<Eigen::Index>(rows.begin()->size()) : 0;
  Matrix m(n, p);
  Eigen::Index i = 0;
  for (const auto &r : rows) {
    if (static_cast<Eigen::Index>(r.size()) != p)
      throw DataError("ragged rows in time series literal");
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return TimeSeries(std::move(m));
}

TimeSeries TimeSeries::slice(Eigen::Index begin, Eigen::Index count) const {
  if (begin < 0 || count < 1 || begin + count > length())
    throw ConfigError("slice [" + std::to_string(begin) + ", " +
                      std::to_string(begin + count) + ") out of range for length " +
                      std::to_string(length()));
  return TimeSeries(values_.middleRows(begin, count));
}

} // namespace dtwgi
