#pragma once

#include <vector>

#include "dtwgi/gi_align.hpp"

namespace dtwgi {

/// Averaging problem. Empty `weights` means uniform; zero `length`/`dims`
/// pick the median input length and the smallest input dimensionality.
struct BarycenterProblem {
  std::vector<TimeSeries> inputs;
  std::vector<double> weights;
  Eigen::Index length = 0;
  Eigen::Index dims = 0;

  /// Copy with defaults filled in and weights normalized to sum to one.
  /// Throws if there are no inputs, a weight is negative, or dims exceeds
  /// the dimensionality of some input.
  BarycenterProblem resolved() const;
};

struct BarycenterOptions {
  SolverConfig solver;
  Family family = Family::affine_stiefel;
  /// Gradient solver only: inputs sampled per step (0 = full batch).
  int minibatch = 0;
  /// Workers for the per-input alignment step (0 = hardware concurrency).
  unsigned threads = 0;
};

struct Barycenter {
  TimeSeries series;
  std::vector<Transform> transforms;
  std::vector<AlignmentPath> paths;
  double loss = 0.0;
  std::vector<double> loss_trace;
  int iterations = 0;
  bool converged = false;
};

/// Starting point: a seeded random input, resampled to the target length,
/// keeping its first `dims` coordinates.
TimeSeries initial_barycenter(const BarycenterProblem &problem, std::uint64_t seed);

/// Sum_i w_i <W_i, C(x_i, f_i(b))> for given transforms and paths.
double barycenter_objective(const BarycenterProblem &problem, const TimeSeries &b,
                            const std::vector<Transform> &transforms,
                            const std::vector<AlignmentPath> &paths);

/// Closed-form timestamp update for fixed transforms and paths:
/// b_t = (sum_i w_i n_it)^-1 sum_i w_i sum_{(s,t) in path_i} P_i^T (x_is - c_i).
Matrix barycenter_update(const BarycenterProblem &problem,
                         const std::vector<Transform> &transforms,
                         const std::vector<AlignmentPath> &paths);

/// DBA under DTW-GI: alternate per-input DTW-GI registration against the
/// current barycenter with the closed-form update, until the loss gain
/// drops below the solver tolerance.
Barycenter dba_gi(const BarycenterProblem &problem, const BarycenterOptions &opts = {});

/// Plain DBA (identity transforms). All inputs must share the target dims.
Barycenter dba(const BarycenterProblem &problem, const BarycenterOptions &opts = {});

/// Gradient descent on sum_i w_i softDTW(x_i, f_i(b)) jointly over b and the
/// per-input maps. Transforms start from a DTW-GI registration against the
/// initial barycenter.
Barycenter soft_barycenter_gi(const BarycenterProblem &problem,
                              const BarycenterOptions &opts = {});

/// softDTW barycenter with identity transforms. All inputs must share dims.
Barycenter soft_barycenter(const BarycenterProblem &problem,
                           const BarycenterOptions &opts = {});

/// The DTW-GI barycenter loss of an arbitrary candidate series: each input
/// is registered against it with BCD.
double dtw_gi_loss(const BarycenterProblem &problem, const TimeSeries &b,
                   const BarycenterOptions &opts = {});

} // namespace dtwgi
