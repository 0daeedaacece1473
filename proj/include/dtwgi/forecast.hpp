#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "dtwgi/gi_align.hpp"

namespace dtwgi {

/// Full training series sharing length T and dims p; `split` = T' cuts each
/// into a known beginning [0, T') and a future [T', T).
struct ForecastCorpus {
  std::vector<TimeSeries> series;
  Eigen::Index split = 0;

  void validate() const;
  Eigen::Index length() const { return series.front().length(); }
  Eigen::Index dims() const { return series.front().dims(); }
  TimeSeries begin(std::size_t i) const { return series[i].slice(0, split); }
  TimeSeries end(std::size_t i) const {
    return series[i].slice(split, series[i].length() - split);
  }
};

enum class Backend { l2, l2_procrustes, soft_dtw, soft_dtw_procrustes, soft_dtw_gi };

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend backend);
inline constexpr Backend kAllBackends[] = {Backend::l2, Backend::l2_procrustes,
                                           Backend::soft_dtw, Backend::soft_dtw_procrustes,
                                           Backend::soft_dtw_gi};

/// softmax(-lambda * d), max-shifted.
std::vector<double> attention_weights(std::span<const double> distances, double lambda);

struct ProcrustesFit {
  double distance = 0.0;
  AffineStiefel map;  // takes x's features onto y's
};

/// min over (P, b) of ||x P^T + b - y||^2 with one-to-one time matching.
ProcrustesFit procrustes_distance(const TimeSeries &y, const TimeSeries &x);

struct Neighbor {
  double distance = 0.0;
  Transform map;
};

/// Distance and feature map from every training beginning to y_begin.
/// The softDTW-GI backend starts its gradient solver from the DTW-GI (BCD)
/// registration of the pair.
std::vector<Neighbor> score_corpus(const TimeSeries &y_begin, const ForecastCorpus &corpus,
                                   Backend backend, const SolverConfig &cfg = {},
                                   unsigned threads = 0);

/// sum_i a_i f_i(x_i_end) for precomputed neighbours.
TimeSeries combine_futures(const std::vector<Neighbor> &neighbors,
                           const ForecastCorpus &corpus, double lambda);

TimeSeries forecast(const TimeSeries &y_begin, const ForecastCorpus &corpus,
                    Backend backend, double lambda, const SolverConfig &cfg = {});

/// ||a - b||_F.
double l2_error(const TimeSeries &a, const TimeSeries &b);

} // namespace dtwgi
