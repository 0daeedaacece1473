#include "dtwgi/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dtwgi/error.hpp"
#include "dtwgi/random.hpp"
#include "dtwgi/synth.hpp"
#include "parallel.hpp"

namespace dtwgi {

namespace {

double objective_of(const BarycenterProblem &p, const TimeSeries &b,
                    const std::vector<Transform> &transforms,
                    const std::vector<AlignmentPath> &paths);
Matrix update_of(const BarycenterProblem &p, const std::vector<Transform> &transforms,
                 const std::vector<AlignmentPath> &paths);

struct Alignment {
  double cost = 0.0;
  Transform transform;
  AlignmentPath path;
};

void require_shared_dims(const BarycenterProblem &p, const char *method) {
  for (const auto &x : p.inputs)
    if (x.dims() != p.dims)
      throw DimensionError(std::string(method) +
                               " cannot average series that live in different "
                               "feature spaces; use a GI method",
                           x.dims(), p.dims);
}

std::vector<Alignment> align_all(const BarycenterProblem &p, const TimeSeries &b,
                                 const std::vector<Transform> *warm,
                                 const BarycenterOptions &opts, bool registered) {
  std::vector<Alignment> out(p.inputs.size());
  detail::parallel_for(p.inputs.size(), opts.threads, [&](std::size_t i) {
    const TimeSeries &x = p.inputs[i];
    if (!registered) {
      DtwResult r = dtw(cost_matrix(x, b));
      out[i] = {r.cost, StiefelLinear::identity(b.dims(), b.dims()), std::move(r.path)};
      return;
    }
    SolverConfig cfg = opts.solver;
    cfg.seed = mix_seed(opts.solver.seed, i);
    std::optional<Transform> init;
    if (warm) init = (*warm)[i];
    GIResult r = dtw_gi_bcd(x, b, opts.family, cfg, init);
    out[i] = {r.cost, std::move(r.transform), std::move(*r.path)};
  });
  return out;
}

double weighted_loss(const BarycenterProblem &p, const std::vector<Alignment> &a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += p.weights[i] * a[i].cost;
  return s;
}

Barycenter run_dba(const BarycenterProblem &raw, const BarycenterOptions &opts,
                   bool registered) {
  opts.solver.validate();
  const BarycenterProblem p = raw.resolved();
  if (!registered) require_shared_dims(p, "plain DBA");

  Barycenter out;
  out.series = initial_barycenter(p, opts.solver.seed);
  std::vector<Alignment> state = align_all(p, out.series, nullptr, opts, registered);
  double loss = weighted_loss(p, state);
  out.loss_trace.push_back(loss);

  auto unpack = [&](const std::vector<Alignment> &a, std::vector<Transform> &fs,
                    std::vector<AlignmentPath> &paths) {
    fs.clear();
    paths.clear();
    for (const auto &s : a) {
      fs.push_back(s.transform);
      paths.push_back(s.path);
    }
  };
  std::vector<Transform> fs;
  std::vector<AlignmentPath> paths;
  unpack(state, fs, paths);

  for (int it = 1; it <= opts.solver.max_iter; ++it) {
    out.iterations = it;
    TimeSeries next(update_of(p, fs, paths));
    // The update is the exact minimizer; only rounding can make it lose.
    if (objective_of(p, next, fs, paths) > loss) {
      out.converged = true;
      break;
    }
    std::vector<Alignment> aligned = align_all(p, next, &fs, opts, registered);
    const double next_loss = weighted_loss(p, aligned);
    if (next_loss > loss) {
      out.converged = true;
      break;
    }
    const double gain = loss - next_loss;
    out.series = std::move(next);
    state = std::move(aligned);
    loss = next_loss;
    unpack(state, fs, paths);
    out.loss_trace.push_back(loss);
    if (gain < opts.solver.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.loss = loss;
  out.transforms = std::move(fs);
  out.paths = std::move(paths);
  return out;
}

struct SoftState {
  Matrix b;
  std::vector<AffineStiefel> fs;
};

struct SoftEval {
  double loss = 0.0;
  Matrix grad_b;
  std::vector<Matrix> grad_P;
  std::vector<Vector> grad_c;
};

SoftEval soft_eval(const BarycenterProblem &p, const SoftState &s, double gamma,
                   unsigned threads) {
  const std::size_t n = p.inputs.size();
  std::vector<SoftGIGradient> parts(n);
  const TimeSeries b(s.b);
  detail::parallel_for(n, threads, [&](std::size_t i) {
    parts[i] = soft_gi_value_and_grad(p.inputs[i], b, s.fs[i], gamma);
  });
  SoftEval e;
  e.grad_b = Matrix::Zero(s.b.rows(), s.b.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const double w = p.weights[i];
    e.loss += w * parts[i].value;
    e.grad_b += w * parts[i].grad_y;
    e.grad_P.push_back(w * parts[i].grad_P);
    e.grad_c.push_back(w * parts[i].grad_b);
  }
  return e;
}

Barycenter run_soft(const BarycenterProblem &raw, const BarycenterOptions &opts,
                    bool registered) {
  const SolverConfig &cfg = opts.solver;
  cfg.validate();
  if (registered && opts.family == Family::transposition)
    throw ConfigError("soft barycenters need a differentiable family (stiefel or affine)");
  if (opts.minibatch < 0) throw ConfigError("minibatch must be >= 0");
  const BarycenterProblem p = raw.resolved();
  if (!registered) require_shared_dims(p, "softDTW barycenter");
  const std::size_t n = p.inputs.size();
  const bool affine = registered && opts.family == Family::affine_stiefel;

  SoftState state;
  state.b = initial_barycenter(p, cfg.seed).values();
  if (registered) {
    BarycenterOptions reg = opts;
    const auto init = align_all(p, TimeSeries(state.b), nullptr, reg, true);
    for (const auto &a : init) {
      AffineStiefel f{linear_part(a.transform), offset_part(a.transform)};
      if (!affine) f.b.setZero();
      state.fs.push_back(std::move(f));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      state.fs.push_back(AffineStiefel::identity(p.dims, p.dims));
  }

  const bool stochastic = opts.minibatch > 0 && static_cast<std::size_t>(opts.minibatch) < n;
  Rng rng(mix_seed(cfg.seed, 0xBA7CULL));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  Barycenter out;
  SoftEval cur = soft_eval(p, state, cfg.gamma, opts.threads);
  out.loss_trace.push_back(cur.loss);
  double step = cfg.step_size;
  int stale = 0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    out.iterations = it;
    std::vector<char> active(n, 1);
    double scale = 1.0;
    if (stochastic) {
      std::shuffle(order.begin(), order.end(), rng);
      std::fill(active.begin(), active.end(), 0);
      for (int k = 0; k < opts.minibatch; ++k) active[order[static_cast<std::size_t>(k)]] = 1;
      scale = static_cast<double>(n) / opts.minibatch;
    }
    Matrix grad_b = cur.grad_b;
    if (stochastic) {
      // Rebuild the batch gradient from per-input pieces.
      const TimeSeries b(state.b);
      grad_b.setZero();
      for (std::size_t i = 0; i < n; ++i)
        if (active[i])
          grad_b += p.weights[i] *
                    soft_gi_value_and_grad(p.inputs[i], b, state.fs[i], cfg.gamma).grad_y;
      grad_b *= scale;
    }

    SoftState cand;
    cand.b = state.b - step * grad_b;
    cand.fs = state.fs;
    if (registered)
      for (std::size_t i = 0; i < n; ++i) {
        if (!active[i]) continue;
        const Vector gc = affine ? Vector(scale * cur.grad_c[i])
                                 : Vector::Zero(state.fs[i].b.size());
        cand.fs[i] = riemannian_grad_step(state.fs[i], scale * cur.grad_P[i], gc, step);
      }
    SoftEval next = soft_eval(p, cand, cfg.gamma, opts.threads);
    if (next.loss < cur.loss) {
      stale = (cur.loss - next.loss >= cfg.tolerance) ? 0 : stale + 1;
      state = std::move(cand);
      cur = std::move(next);
    } else {
      step *= 0.5;
      ++stale;
    }
    out.loss_trace.push_back(cur.loss);
    if (stale >= cfg.patience) {
      out.converged = true;
      break;
    }
  }

  out.series = TimeSeries(state.b);
  out.loss = cur.loss;
  for (std::size_t i = 0; i < n; ++i) {
    Transform f = affine ? Transform(state.fs[i]) : Transform(StiefelLinear{state.fs[i].P});
    out.paths.push_back(
        dtw(cost_matrix(p.inputs[i], apply_transform(f, out.series))).path);
    out.transforms.push_back(std::move(f));
  }
  return out;
}

} // namespace

BarycenterProblem BarycenterProblem::resolved() const {
  if (inputs.empty()) throw ConfigError("barycenter needs at least one input");
  BarycenterProblem p = *this;
  for (const auto &x : inputs)
    if (x.empty()) throw DataError("empty time series in barycenter inputs");
  if (p.weights.empty()) p.weights.assign(inputs.size(), 1.0);
  if (p.weights.size() != inputs.size())
    throw ConfigError("one weight per input is required");
  double total = 0.0;
  for (double w : p.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("weights must be >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError("weights must not all be zero");
  for (double &w : p.weights) w /= total;

  Eigen::Index min_dims = inputs.front().dims();
  std::vector<Eigen::Index> lengths;
  for (const auto &x : inputs) {
    min_dims = std::min(min_dims, x.dims());
    lengths.push_back(x.length());
  }
  if (p.dims == 0) p.dims = min_dims;
  if (p.dims < 1 || p.dims > min_dims)
    throw DimensionError("barycenter dims must not exceed any input's dims", p.dims,
                         min_dims);
  if (p.length == 0) {
    std::sort(lengths.begin(), lengths.end());
    p.length = lengths[lengths.size() / 2];
  }
  if (p.length < 1) throw ConfigError("barycenter length must be >= 1");
  return p;
}

TimeSeries initial_barycenter(const BarycenterProblem &problem, std::uint64_t seed) {
  const BarycenterProblem p = problem.resolved();
  Rng rng(mix_seed(seed, 0x1B17ULL));
  std::uniform_int_distribution<std::size_t> pick(0, p.inputs.size() - 1);
  const TimeSeries &src = p.inputs[pick(rng)];
  const TimeSeries stretched = resample_linear(src, p.length);
  return TimeSeries(stretched.values().leftCols(p.dims));
}

double barycenter_objective(const BarycenterProblem &problem, const TimeSeries &b,
                            const std::vector<Transform> &transforms,
                            const std::vector<AlignmentPath> &paths) {
  return objective_of(problem.resolved(), b, transforms, paths);
}

Matrix barycenter_update(const BarycenterProblem &problem,
                         const std::vector<Transform> &transforms,
                         const std::vector<AlignmentPath> &paths) {
  return update_of(problem.resolved(), transforms, paths);
}

namespace {

double objective_of(const BarycenterProblem &p, const TimeSeries &b,
                    const std::vector<Transform> &transforms,
                    const std::vector<AlignmentPath> &paths) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.inputs.size(); ++i)
    s += p.weights[i] * registration_cost(p.inputs[i], b, paths[i], transforms[i]);
  return s;
}

Matrix update_of(const BarycenterProblem &p, const std::vector<Transform> &transforms,
                 const std::vector<AlignmentPath> &paths) {
  if (transforms.size() != p.inputs.size() || paths.size() != p.inputs.size())
    throw ConfigError("one transform and one path per input are required");
  Matrix acc = Matrix::Zero(p.length, p.dims);
  Vector mass = Vector::Zero(p.length);
  for (std::size_t i = 0; i < p.inputs.size(); ++i) {
    const Matrix P = linear_part(transforms[i]);
    const Vector c = offset_part(transforms[i]);
    const double w = p.weights[i];
    const Matrix &x = p.inputs[i].values();
    for (const auto &[s, t] : paths[i].pairs) {
      acc.row(t) += w * (P.transpose() * (x.row(s).transpose() - c)).transpose();
      mass(t) += w;
    }
  }
  for (Eigen::Index t = 0; t < p.length; ++t) {
    // Paths are connected, so every timestamp gets mass from each input.
    if (!(mass(t) > 0.0)) throw DataError("barycenter timestamp with no aligned mass");
    acc.row(t) /= mass(t);
  }
  return acc;
}

} // namespace

Barycenter dba_gi(const BarycenterProblem &problem, const BarycenterOptions &opts) {
  return run_dba(problem, opts, true);
}

Barycenter dba(const BarycenterProblem &problem, const BarycenterOptions &opts) {
  return run_dba(problem, opts, false);
}

Barycenter soft_barycenter_gi(const BarycenterProblem &problem,
                              const BarycenterOptions &opts) {
  return run_soft(problem, opts, true);
}

Barycenter soft_barycenter(const BarycenterProblem &problem,
                           const BarycenterOptions &opts) {
  return run_soft(problem, opts, false);
}

double dtw_gi_loss(const BarycenterProblem &problem, const TimeSeries &b,
                   const BarycenterOptions &opts) {
  const BarycenterProblem p = problem.resolved();
  return weighted_loss(p, align_all(p, b, nullptr, opts, true));
}

} // namespace dtwgi
