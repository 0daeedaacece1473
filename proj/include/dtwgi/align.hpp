#pragma once

#include <utility>
#include <vector>

#include "dtwgi/time_series.hpp"

namespace dtwgi {

/// Matched index pairs (i into x, j into y), 0-based, in path order.
struct AlignmentPath {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;

  std::size_t size() const { return pairs.size(); }
  bool operator==(const AlignmentPath &) const = default;

  /// Endpoints matched, steps in {(0,1), (1,0), (1,1)}.
  bool is_admissible(Eigen::Index tx, Eigen::Index ty) const;

  /// Dense binary matrix W with W(i,j) = 1 iff (i,j) is on the path.
  Matrix to_matrix(Eigen::Index tx, Eigen::Index ty) const;

  /// <W, C>, summed in path order.
  double cost(const Matrix &C) const;

  /// The path (0,0), (1,1), ... for equal-length series.
  static AlignmentPath diagonal(Eigen::Index length);
};

struct DtwResult {
  double cost = 0.0;
  AlignmentPath path;
};

/// Squared Euclidean cross-distance matrix, C(i,j) = ||x_i - y_j||^2.
Matrix cost_matrix(const TimeSeries &x, const TimeSeries &y);

/// Hard DTW with backtracking. Ties prefer the diagonal predecessor, then
/// (i-1, j), then (i, j-1).
DtwResult dtw(const Matrix &C);

/// Smoothed DTW value with soft-min temperature gamma > 0.
double soft_dtw(const Matrix &C, double gamma);

/// d soft_dtw / d C, i.e. the expected cell occupancy under the Gibbs
/// distribution over admissible paths. Every entry lies in [0, 1].
Matrix soft_dtw_grad(const Matrix &C, double gamma);

struct SoftDtwResult {
  double value = 0.0;
  Matrix grad;
};

/// Forward and backward pass sharing one accumulated-cost table.
SoftDtwResult soft_dtw_value_and_grad(const Matrix &C, double gamma);

inline constexpr double kDefaultGamma = 1.0;

} // namespace dtwgi
