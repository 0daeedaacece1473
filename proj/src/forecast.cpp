#include "dtwgi/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dtwgi/error.hpp"
#include "parallel.hpp"

namespace dtwgi {

void ForecastCorpus::validate() const {
  if (series.empty()) throw ConfigError("forecast corpus is empty");
  const Eigen::Index T = series.front().length(), p = series.front().dims();
  for (const auto &s : series) {
    if (s.length() != T) throw DimensionError("corpus series lengths differ", s.length(), T);
    if (s.dims() != p) throw DimensionError("corpus series dims differ", s.dims(), p);
  }
  if (split < 1 || split >= T)
    throw ConfigError("split must satisfy 1 <= split < length, got " + std::to_string(split));
}

Backend parse_backend(std::string_view name) {
  if (name == "L2" || name == "l2") return Backend::l2;
  if (name == "L2+Procrustes" || name == "l2+procrustes") return Backend::l2_procrustes;
  if (name == "softDTW" || name == "softdtw") return Backend::soft_dtw;
  if (name == "softDTW+Procrustes" || name == "softdtw+procrustes")
    return Backend::soft_dtw_procrustes;
  if (name == "softDTW-GI" || name == "softdtw-gi") return Backend::soft_dtw_gi;
  throw ConfigError("unknown backend '" + std::string(name) + "'");
}

std::string_view to_string(Backend backend) {
  switch (backend) {
  case Backend::l2: return "L2";
  case Backend::l2_procrustes: return "L2+Procrustes";
  case Backend::soft_dtw: return "softDTW";
  case Backend::soft_dtw_procrustes: return "softDTW+Procrustes";
  case Backend::soft_dtw_gi: return "softDTW-GI";
  }
  return "?";
}

std::vector<double> attention_weights(std::span<const double> distances, double lambda) {
  if (distances.empty()) throw ConfigError("attention over an empty set");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be > 0");
  for (double d : distances)
    if (!std::isfinite(d)) throw DataError("non-finite distance in attention kernel");
  const double lo = *std::min_element(distances.begin(), distances.end());
  std::vector<double> w(distances.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(-lambda * (distances[i] - lo));
    total += w[i];
  }
  for (double &v : w) v /= total;
  return w;
}

ProcrustesFit procrustes_distance(const TimeSeries &y, const TimeSeries &x) {
  if (y.length() != x.length())
    throw DimensionError("Procrustes distance needs equal lengths", y.length(), x.length());
  if (y.dims() < x.dims())
    throw DimensionError("Procrustes distance needs y dims >= x dims", y.dims(), x.dims());
  ProcrustesFit fit;
  fit.map = affine_procrustes_solve(y, x, AlignmentPath::diagonal(y.length()));
  fit.distance = (apply_transform(fit.map, x).values() - y.values()).squaredNorm();
  return fit;
}

std::vector<Neighbor> score_corpus(const TimeSeries &y_begin, const ForecastCorpus &corpus,
                                   Backend backend, const SolverConfig &cfg,
                                   unsigned threads) {
  corpus.validate();
  if (y_begin.length() != corpus.split)
    throw DimensionError("query length must equal the corpus split", y_begin.length(),
                         corpus.split);
  if (y_begin.dims() != corpus.dims())
    throw DimensionError("query dims must match the corpus", y_begin.dims(), corpus.dims());
  cfg.validate();

  const Eigen::Index p = corpus.dims();
  std::vector<Neighbor> out(corpus.series.size());
  detail::parallel_for(out.size(), threads, [&](std::size_t i) {
    const TimeSeries xb = corpus.begin(i);
    Neighbor &nb = out[i];
    switch (backend) {
    case Backend::l2:
      nb = {(xb.values() - y_begin.values()).squaredNorm(), StiefelLinear::identity(p, p)};
      break;
    case Backend::soft_dtw:
      nb = {soft_dtw(cost_matrix(y_begin, xb), cfg.gamma), StiefelLinear::identity(p, p)};
      break;
    case Backend::l2_procrustes: {
      ProcrustesFit fit = procrustes_distance(y_begin, xb);
      nb = {fit.distance, fit.map};
      break;
    }
    case Backend::soft_dtw_procrustes: {
      ProcrustesFit fit = procrustes_distance(y_begin, xb);
      nb = {soft_dtw(cost_matrix(y_begin, apply_transform(fit.map, xb)), cfg.gamma), fit.map};
      break;
    }
    case Backend::soft_dtw_gi: {
      const GIResult hard = dtw_gi_bcd(y_begin, xb, Family::affine_stiefel, cfg);
      const auto &start = std::get<AffineStiefel>(hard.transform);
      SolverConfig once = cfg;
      once.restarts = 1;
      GIResult soft = soft_dtw_gi_grad(y_begin, xb, Family::affine_stiefel, once, start);
      nb = {soft.cost, std::move(soft.transform)};
      break;
    }
    }
  });
  return out;
}

TimeSeries combine_futures(const std::vector<Neighbor> &neighbors,
                           const ForecastCorpus &corpus, double lambda) {
  corpus.validate();
  if (neighbors.size() != corpus.series.size())
    throw ConfigError("one neighbour per corpus series is required");
  std::vector<double> d;
  for (const auto &n : neighbors) d.push_back(n.distance);
  const std::vector<double> a = attention_weights(d, lambda);
  Matrix acc = Matrix::Zero(corpus.length() - corpus.split, corpus.dims());
  for (std::size_t i = 0; i < neighbors.size(); ++i)
    acc += a[i] * apply_transform(neighbors[i].map, corpus.end(i)).values();
  return TimeSeries(std::move(acc));
}

TimeSeries forecast(const TimeSeries &y_begin, const ForecastCorpus &corpus,
                    Backend backend, double lambda, const SolverConfig &cfg) {
  return combine_futures(score_corpus(y_begin, corpus, backend, cfg), corpus, lambda);
}

double l2_error(const TimeSeries &a, const TimeSeries &b) {
  if (a.length() != b.length() || a.dims() != b.dims())
    throw DimensionError("l2 error needs equal shapes", a.values().size(), b.values().size());
  return (a.values() - b.values()).norm();
}

} // namespace dtwgi
