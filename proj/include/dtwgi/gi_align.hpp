#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtwgi/transforms.hpp"

namespace dtwgi {

enum class Family { stiefel, affine_stiefel, transposition };

Family parse_family(std::string_view name);
std::string_view to_string(Family family);

struct SolverConfig {
  int max_iter = 5000;
  int patience = 100;
  double step_size = 1e-2;
  double gamma = kDefaultGamma;
  double tolerance = 1e-9;
  int restarts = 1;
  std::uint64_t seed = 0;
  /// Gradient solver only: run a hard DTW on the final transform and report
  /// its path.
  bool final_backtrack = false;

  void validate() const;
};

struct GIResult {
  double cost = 0.0;
  Transform transform;
  std::optional<AlignmentPath> path;
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_trace;
  /// The registration step met a rank-deficient cross-covariance at least
  /// once, so the returned map is one of several maximizers.
  bool rank_deficient = false;
};

/// Starting transform for a solve: identity-like embedding (first p_y
/// columns of I) for restart 0, QR of a seeded Gaussian matrix afterwards.
/// Transposition restarts cycle through the shifts k = restart mod p.
Transform initial_transform(Family family, Eigen::Index p_x, Eigen::Index p_y,
                            int restart, std::uint64_t seed);

/// DTW-GI by block-coordinate descent: alternate an exact DTW alignment with
/// the family's exact registration until the path stops changing.
/// `init`, when given, replaces the restart-0 starting point.
GIResult dtw_gi_bcd(const TimeSeries &x, const TimeSeries &y, Family family,
                    const SolverConfig &cfg,
                    const std::optional<Transform> &init = std::nullopt);

/// softDTW value of C(x, f(y)) and its gradients w.r.t. P, b and y.
struct SoftGIGradient {
  double value = 0.0;
  Matrix grad_P;
  Vector grad_b;
  Matrix grad_y;
};

SoftGIGradient soft_gi_value_and_grad(const TimeSeries &x, const TimeSeries &y,
                                      const AffineStiefel &f, double gamma);

/// softDTW-GI by Riemannian gradient descent on (P, b). For
/// Family::stiefel the offset stays at zero.
GIResult soft_dtw_gi_grad(const TimeSeries &x, const TimeSeries &y, Family family,
                          const SolverConfig &cfg,
                          const std::optional<AffineStiefel> &init = std::nullopt);

/// Pairwise DTW-GI costs. Each pair is solved once with the
/// higher-dimensional series as x and mirrored; the diagonal is zero.
/// Pairs are spread over `threads` workers (0 = hardware concurrency);
/// the result does not depend on the schedule.
Matrix dtw_gi_distance_matrix(const std::vector<TimeSeries> &dataset, Family family,
                              const SolverConfig &cfg, unsigned threads = 0);

} // namespace dtwgi
