#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dtwgi/barycenter.hpp"
#include "dtwgi/forecast.hpp"
#include "dtwgi/io.hpp"
#include "dtwgi/synth.hpp"

namespace dtwgi {

/// Pairwise methods shared by the timing and rotation runners.
enum class Method { dtw, soft_dtw, dtw_gi, soft_dtw_gi };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

/// Cost of one pair under `method`. GI methods use `family`; when x has
/// fewer dims than y the pair is solved swapped, so the transform maps x
/// into y's space while the path keeps (x index, y index) order.
GIResult run_method(Method method, const TimeSeries &x, const TimeSeries &y, Family family,
                    const SolverConfig &cfg);

// ---- timing -------------------------------------------------------------

struct TimingSpec {
  std::vector<Eigen::Index> lengths;  // swept at p = length_sweep_dims
  std::vector<Eigen::Index> dims;     // swept at T = dim_sweep_length
  std::vector<Method> methods{Method::dtw, Method::soft_dtw, Method::dtw_gi,
                              Method::soft_dtw_gi};
  Eigen::Index length_sweep_dims = 8;
  Eigen::Index dim_sweep_length = 32;
  int trials = 5;
  /// GI solvers are charged for exactly this many iterations so that the
  /// timings compare work per problem size, not convergence luck.
  int gi_iterations = 5;
  std::uint64_t seed = 0;
};

/// Columns method,T,p,trial,seconds. One untimed warm-up run per cell.
ResultTable bench_timing(const TimingSpec &spec);

/// Columns method,T,p,median,p20,p80 from a bench_timing table.
ResultTable summarize_timing(const ResultTable &timings);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

/// Slope of median seconds against T (sweep = "T") or p (sweep = "p") for
/// one method, read from a summary table. Only rows of that sweep are used.
double timing_slope(const ResultTable &summary, Method method, const std::string &sweep,
                    const TimingSpec &spec);

// ---- rotation -----------------------------------------------------------

struct RotationBenchSpec {
  int trials = 50;
  int angles = 16;
  std::vector<Method> methods{Method::dtw, Method::dtw_gi};
  Family family = Family::stiefel;
  RotationStudySpec series;
  SolverConfig solver = [] {
    SolverConfig c;
    c.restarts = 32;
    return c;
  }();
  unsigned threads = 0;
};

/// Columns method,theta,trial,cost,ratio_to_theta0. Each method's ratio is
/// taken against its own mean cost at theta = 0.
ResultTable bench_rotation(const RotationBenchSpec &spec);

/// Median ratio per (method, theta): columns method,theta,median_ratio.
ResultTable summarize_rotation(const ResultTable &rotation);

// ---- barycenters --------------------------------------------------------

enum class BarycenterMethod { dba_gi, soft_gi, dba, soft_dtw };

BarycenterMethod parse_barycenter_method(std::string_view name);
std::string_view to_string(BarycenterMethod method);

Barycenter run_barycenter(BarycenterMethod method, const BarycenterProblem &problem,
                          const BarycenterOptions &opts = {});

/// Columns iteration,loss.
ResultTable loss_trace_table(const Barycenter &b);

// ---- forecasting --------------------------------------------------------

struct ForecastStudySpec {
  std::vector<double> lambdas{1e-3, 1e-2, 1e-1, 1.0};
  std::vector<Backend> backends{std::begin(kAllBackends), std::end(kAllBackends)};
  int trials = 20;
  std::uint64_t seed = 0;
  MotionCorpusSpec corpus = [] {
    MotionCorpusSpec c;
    c.queries = 5;
    return c;
  }();
  SolverConfig solver = [] {
    SolverConfig c;
    c.restarts = 4;
    c.max_iter = 500;
    c.patience = 30;
    return c;
  }();
  unsigned threads = 0;
};

/// Columns backend,lambda,trial,l2_error. Each trial draws a fresh corpus
/// and `corpus.queries` queries; l2_error is the mean over those queries.
/// Every backend sees the same data.
ResultTable forecast_study(const ForecastStudySpec &spec);

/// Median error per (backend, lambda): columns backend,lambda,median_error.
ResultTable summarize_forecast(const ResultTable &study);

// ---- retrieval ----------------------------------------------------------

enum class RetrievalMethod { dtw, dtw_oti, dtw_gi_stiefel, dtw_gi_oti };

RetrievalMethod parse_retrieval_method(std::string_view name);
std::string_view to_string(RetrievalMethod method);

struct NamedSeries {
  std::string name;
  TimeSeries series;
};

/// Shift k maximizing <mean(x), mean(shift_k(y))> over the p cyclic shifts.
int oti_index(const TimeSeries &x, const TimeSeries &y);

/// Distance between a query and a corpus item under `method`.
double retrieval_distance(RetrievalMethod method, const TimeSeries &query,
                          const TimeSeries &item, const SolverConfig &cfg);

/// Each query's true match is the corpus item with the same name. Columns
/// query,rank,recall_at_1,recall_at_5,recall_at_10; a final MEAN row holds
/// the mean rank of the true match (MR1) and mean recalls. Queries with no
/// namesake in the corpus are skipped.
ResultTable retrieval(const std::vector<NamedSeries> &queries,
                      const std::vector<NamedSeries> &corpus, RetrievalMethod method,
                      const SolverConfig &cfg = {}, unsigned threads = 0);

/// Loads every regular file of a directory, sorted by name. Files that fail
/// to parse are reported in `diagnostics` and skipped.
std::vector<NamedSeries> load_series_dir(const std::filesystem::path &dir,
                                         std::vector<std::string> &diagnostics);

} // namespace dtwgi
