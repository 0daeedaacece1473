#pragma once

#include <Eigen/Dense>

namespace dtwgi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A length-T sequence of p-dimensional observations, stored as a T x p
/// matrix (one observation per row). Construction rejects empty or
/// non-finite data, so every TimeSeries in the library is usable as is.
class TimeSeries {
public:
  TimeSeries() = default;
  explicit TimeSeries(Matrix values);

  static TimeSeries from_rows(std::initializer_list<std::initializer_list<double>> rows);

  const Matrix &values() const { return values_; }
  Eigen::Index length() const { return values_.rows(); }
  Eigen::Index dims() const { return values_.cols(); }
  bool empty() const { return values_.size() == 0; }

  auto row(Eigen::Index t) const { return values_.row(t); }

  /// Rows [begin, begin + count).
  TimeSeries slice(Eigen::Index begin, Eigen::Index count) const;

private:
  Matrix values_;
};

} // namespace dtwgi
