#include "dtwgi/gi_align.hpp"

#include <cmath>
#include <limits>

#include "dtwgi/error.hpp"
#include "dtwgi/random.hpp"
#include "parallel.hpp"

namespace dtwgi {

namespace {

void require_dims(const TimeSeries &x, const TimeSeries &y, Family family) {
  if (x.empty() || y.empty()) throw DataError("empty time series");
  if (family == Family::transposition) {
    if (x.dims() != y.dims())
      throw DimensionError("transposition family needs equal dims", x.dims(),
                           y.dims());
  } else if (x.dims() < y.dims()) {
    throw DimensionError("Stiefel families map y up into x's space, so x dims "
                         "must be >= y dims",
                         x.dims(), y.dims());
  }
}

Transform register_on_path(const TimeSeries &x, const TimeSeries &y,
                           const AlignmentPath &path, Family family,
                           bool &rank_deficient) {
  switch (family) {
  case Family::stiefel: {
    const Matrix M = path_cross_covariance(x, y, path);
    rank_deficient = rank_deficient || is_rank_deficient(M);
    return stiefel_maximizer(M);
  }
  case Family::affine_stiefel: {
    auto f = affine_procrustes_solve(x, y, path);
    return f;
  }
  case Family::transposition:
    return transposition_solve(x, y, path);
  }
  throw ConfigError("unknown transform family");
}

GIResult bcd_from(const TimeSeries &x, const TimeSeries &y, Family family,
                  const SolverConfig &cfg, Transform f) {
  GIResult res;
  std::optional<AlignmentPath> prev;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const Matrix C = cost_matrix(x, apply_transform(f, y));
    DtwResult aligned = dtw(C);
    res.cost_trace.push_back(aligned.cost);
    res.iterations = it;
    res.cost = aligned.cost;
    res.transform = f;
    const bool fixed_point = prev && *prev == aligned.path;
    res.path = aligned.path;
    if (fixed_point) {
      res.converged = true;
      break;
    }
    Transform next = register_on_path(x, y, aligned.path, family, res.rank_deficient);
    // Exact in exact arithmetic; rounding may still leave the new map a hair
    // worse on this path, in which case the current one is already optimal.
    if (registration_cost(x, y, aligned.path, next) <= aligned.cost) f = std::move(next);
    prev = std::move(aligned.path);
  }
  return res;
}

} // namespace

Family parse_family(std::string_view name) {
  if (name == "stiefel") return Family::stiefel;
  if (name == "affine" || name == "affine_stiefel" || name == "affine-stiefel")
    return Family::affine_stiefel;
  if (name == "transposition" || name == "oti") return Family::transposition;
  throw ConfigError("unknown transform family '" + std::string(name) +
                    "' (expected stiefel, affine or transposition)");
}

std::string_view to_string(Family family) {
  switch (family) {
  case Family::stiefel: return "stiefel";
  case Family::affine_stiefel: return "affine";
  case Family::transposition: return "transposition";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ConfigError("gamma must be > 0, got " + std::to_string(gamma));
  if (!(step_size > 0.0) || !std::isfinite(step_size))
    throw ConfigError("step_size must be > 0");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
}

Transform initial_transform(Family family, Eigen::Index p_x, Eigen::Index p_y,
                            int restart, std::uint64_t seed) {
  if (family == Family::transposition)
    return ChromaTransposition{static_cast<int>(restart % p_x), p_x};
  Matrix P;
  if (restart == 0) {
    P = Matrix::Identity(p_x, p_y);
  } else {
    Rng rng(mix_seed({seed, static_cast<std::uint64_t>(restart), 0xB1CDULL}));
    P = qr_retraction(gaussian_matrix(p_x, p_y, rng));
  }
  if (family == Family::stiefel) return StiefelLinear{P};
  return AffineStiefel{P, Vector::Zero(p_x)};
}

GIResult dtw_gi_bcd(const TimeSeries &x, const TimeSeries &y, Family family,
                    const SolverConfig &cfg, const std::optional<Transform> &init) {
  cfg.validate();
  require_dims(x, y, family);
  if (init && (input_dims(*init) != y.dims() || output_dims(*init) != x.dims()))
    throw DimensionError("initial transform has the wrong shape", input_dims(*init),
                         y.dims());

  GIResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    Transform f0 = (r == 0 && init) ? *init
                                    : initial_transform(family, x.dims(), y.dims(),
                                                        r, cfg.seed);
    GIResult res = bcd_from(x, y, family, cfg, std::move(f0));
    if (res.cost < best.cost) best = std::move(res);
  }
  return best;
}

SoftGIGradient soft_gi_value_and_grad(const TimeSeries &x, const TimeSeries &y,
                                      const AffineStiefel &f, double gamma) {
  const TimeSeries z = apply_transform(f, y);
  const SoftDtwResult sd = soft_dtw_value_and_grad(cost_matrix(x, z), gamma);
  const Matrix &E = sd.grad;
  const Vector col_mass = E.colwise().sum().transpose();
  // d value / d z_j = -2 sum_i E_ij (x_i - z_j)
  const Matrix grad_z =
      -2.0 * (E.transpose() * x.values() - col_mass.asDiagonal() * z.values());

  SoftGIGradient g;
  g.value = sd.value;
  g.grad_P = grad_z.transpose() * y.values();
  g.grad_b = grad_z.colwise().sum().transpose();
  g.grad_y = grad_z * f.P;
  return g;
}

GIResult soft_dtw_gi_grad(const TimeSeries &x, const TimeSeries &y, Family family,
                          const SolverConfig &cfg,
                          const std::optional<AffineStiefel> &init) {
  cfg.validate();
  if (family == Family::transposition)
    throw ConfigError("the gradient solver needs a differentiable family "
                      "(stiefel or affine)");
  require_dims(x, y, family);
  const bool affine = family == Family::affine_stiefel;

  GIResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    AffineStiefel f;
    if (r == 0 && init) {
      f = *init;
      if (f.P.rows() != x.dims() || f.P.cols() != y.dims())
        throw DimensionError("initial transform has the wrong shape", f.P.cols(),
                             y.dims());
      if (!affine) f.b.setZero();
    } else {
      f = AffineStiefel{linear_part(initial_transform(family, x.dims(), y.dims(),
                                                      r, cfg.seed)),
                        Vector::Zero(x.dims())};
    }

    GIResult res;
    SoftGIGradient g = soft_gi_value_and_grad(x, y, f, cfg.gamma);
    double value = g.value;
    res.cost_trace.push_back(value);
    double step = cfg.step_size;
    int stale = 0;
    for (int it = 1; it <= cfg.max_iter; ++it) {
      res.iterations = it;
      const Vector gb = affine ? g.grad_b : Vector::Zero(x.dims());
      AffineStiefel cand = riemannian_grad_step(f, g.grad_P, gb, step);
      SoftGIGradient gc = soft_gi_value_and_grad(x, y, cand, cfg.gamma);
      if (gc.value < value) {
        stale = (value - gc.value >= cfg.tolerance) ? 0 : stale + 1;
        f = std::move(cand);
        g = std::move(gc);
        value = g.value;
      } else {
        step *= 0.5;
        ++stale;
      }
      res.cost_trace.push_back(value);
      if (stale >= cfg.patience) {
        res.converged = true;
        break;
      }
    }
    res.cost = value;
    if (affine)
      res.transform = f;
    else
      res.transform = StiefelLinear{f.P};
    if (cfg.final_backtrack) res.path = dtw(cost_matrix(x, apply_transform(res.transform, y))).path;
    if (res.cost < best.cost) best = std::move(res);
  }
  return best;
}

Matrix dtw_gi_distance_matrix(const std::vector<TimeSeries> &dataset, Family family,
                              const SolverConfig &cfg, unsigned threads) {
  const auto n = static_cast<Eigen::Index>(dataset.size());
  Matrix D = Matrix::Zero(n, n);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<double> costs(pairs.size());
  detail::parallel_for(pairs.size(), threads, [&](std::size_t k) {
    const auto &a = dataset[static_cast<std::size_t>(pairs[k].first)];
    const auto &b = dataset[static_cast<std::size_t>(pairs[k].second)];
    costs[k] = a.dims() >= b.dims() ? dtw_gi_bcd(a, b, family, cfg).cost
                                    : dtw_gi_bcd(b, a, family, cfg).cost;
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    D(pairs[k].first, pairs[k].second) = costs[k];
    D(pairs[k].second, pairs[k].first) = costs[k];
  }
  return D;
}

} // namespace dtwgi
