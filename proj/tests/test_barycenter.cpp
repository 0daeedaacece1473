#include "doctest.h"
#include "dtwgi/barycenter.hpp"
#include "dtwgi/error.hpp"
#include "dtwgi/synth.hpp"
#include "oracles.hpp"

using namespace dtwgi;

namespace {

TimeSeries make(SeriesKind kind, double theta, std::uint64_t seed, double noise,
                Eigen::Index T = 32) {
  GeneratorSpec g;
  g.kind = kind;
  g.length = T;
  g.theta = theta;
  g.seed = seed;
  g.noise_std = noise;
  return generate(g);
}

BarycenterOptions restarts(int r) {
  BarycenterOptions o;
  o.solver.restarts = r;
  return o;
}

} // namespace

TEST_CASE("problem defaults and validation") {
  BarycenterProblem p;
  CHECK_THROWS_AS(p.resolved(), ConfigError);
  p.inputs = {make(SeriesKind::spiral3d, 0, 0, 0, 20), make(SeriesKind::spiral2d, 0, 0, 0, 30),
              make(SeriesKind::spiral2d, 0, 0, 0, 40)};
  const BarycenterProblem r = p.resolved();
  CHECK(r.length == 30);
  CHECK(r.dims == 2);
  CHECK(r.weights.size() == 3);
  CHECK(r.weights[0] == doctest::Approx(1.0 / 3));
  p.dims = 3;
  CHECK_THROWS_AS(p.resolved(), DimensionError);
  p.dims = 0;
  p.weights = {1.0, -1.0, 1.0};
  CHECK_THROWS_AS(p.resolved(), ConfigError);
}

TEST_CASE("DBA-GI of a single input is the input") {
  BarycenterProblem p;
  p.inputs = {make(SeriesKind::folium, 0.3, 1, 0.02)};
  const Barycenter b = dba_gi(p);
  CHECK(b.loss <= 1e-12);
  CHECK((b.series.values() - p.inputs[0].values()).norm() <= 1e-12);
}

TEST_CASE("DBA-GI of a rotated pair is a rigid copy") {
  BarycenterProblem p;
  const TimeSeries x = make(SeriesKind::spiral2d, 0.0, 0, 0.0);
  p.inputs = {x, rotate(x, rotation_2d(2.2))};
  const Barycenter b = dba_gi(p, restarts(8));
  CHECK(b.loss <= 1e-6);
  // A rigid copy of x: registering x onto it costs nothing.
  CHECK(dtw_gi_bcd(x, b.series, Family::affine_stiefel, restarts(8).solver).cost <= 1e-6);
}

TEST_CASE("DBA-GI loss trace is monotone and the loss is recomputable") {
  BarycenterProblem p;
  for (int i = 0; i < 4; ++i)
    p.inputs.push_back(make(SeriesKind::folium, 1.3 * i, static_cast<std::uint64_t>(i), 0.05));
  const Barycenter b = dba_gi(p, restarts(4));
  for (std::size_t t = 1; t < b.loss_trace.size(); ++t)
    CHECK(b.loss_trace[t] <= b.loss_trace[t - 1]);
  CHECK(b.converged);
  CHECK(b.loss == doctest::Approx(barycenter_objective(p, b.series, b.transforms, b.paths))
                      .epsilon(1e-12));
  for (std::size_t i = 0; i < p.inputs.size(); ++i)
    CHECK(b.paths[i].is_admissible(p.inputs[i].length(), b.series.length()));
}

TEST_CASE("closed-form update zeroes the fixed-alignment gradient") {
  BarycenterProblem p;
  GeneratorSpec g3;
  g3.kind = SeriesKind::spiral3d;
  g3.length = 28;
  p.inputs = {make(SeriesKind::spiral2d, 0.4, 3, 0.05), generate(g3),
              make(SeriesKind::folium, 1.0, 4, 0.05, 25)};
  p.weights = {0.5, 0.3, 0.2};
  p.dims = 2;
  p.length = 30;
  const BarycenterProblem r = p.resolved();
  const TimeSeries b0 = initial_barycenter(p, 7);
  std::vector<Transform> fs;
  std::vector<AlignmentPath> paths;
  for (const auto &x : r.inputs) {
    const GIResult a = dtw_gi_bcd(x, b0, Family::affine_stiefel, SolverConfig{});
    fs.push_back(a.transform);
    paths.push_back(*a.path);
  }
  const Matrix b = barycenter_update(p, fs, paths);
  // Gradient of sum_i w_i sum_(s,t) ||x_is - P_i b_t - c_i||^2 w.r.t. b.
  Matrix grad = Matrix::Zero(b.rows(), b.cols());
  for (std::size_t i = 0; i < r.inputs.size(); ++i) {
    const Matrix P = linear_part(fs[i]);
    const Vector c = offset_part(fs[i]);
    for (const auto &[s, t] : paths[i].pairs)
      grad.row(t) -= 2.0 * r.weights[i] *
                     (P.transpose() * (r.inputs[i].row(s).transpose() - P * b.row(t).transpose() - c))
                         .transpose();
  }
  CHECK(grad.norm() <= 1e-8);
  CHECK(barycenter_objective(p, TimeSeries(b), fs, paths) <=
        barycenter_objective(p, b0, fs, paths));
}

TEST_CASE("scaling the weights does not change the iterates") {
  BarycenterProblem p;
  for (int i = 0; i < 3; ++i)
    p.inputs.push_back(make(SeriesKind::spiral2d, 0.9 * i, static_cast<std::uint64_t>(i), 0.05));
  p.weights = {0.2, 0.5, 0.3};
  BarycenterProblem q = p;
  q.weights = {0.8, 2.0, 1.2};
  const Barycenter a = dba_gi(p, restarts(2));
  const Barycenter b = dba_gi(q, restarts(2));
  CHECK(a.loss_trace.size() == b.loss_trace.size());
  CHECK((a.series.values() - b.series.values()).norm() <= 1e-12);
}

TEST_CASE("mixed-dimension sets work under DBA-GI and are refused by DBA") {
  BarycenterProblem p;
  p.inputs = {make(SeriesKind::spiral2d, 0.0, 1, 0.03), make(SeriesKind::spiral3d, 0.8, 2, 0.03),
              make(SeriesKind::spiral2d, 2.0, 3, 0.03), make(SeriesKind::spiral3d, 4.0, 4, 0.03)};
  p.dims = 2;
  const Barycenter b = dba_gi(p, restarts(4));
  CHECK(std::isfinite(b.loss));
  CHECK(b.series.dims() == 2);
  CHECK_THROWS_AS(dba(p), DimensionError);
  CHECK_THROWS_AS(soft_barycenter(p), DimensionError);
}

TEST_CASE("soft GI barycenter: single input stays put") {
  BarycenterProblem p;
  p.inputs = {make(SeriesKind::spiral2d, 0.0, 5, 0.0, 20)};
  BarycenterOptions o;
  o.solver.patience = 20;
  const Barycenter b = soft_barycenter_gi(p, o);
  const double self = soft_dtw(cost_matrix(p.inputs[0], p.inputs[0]), o.solver.gamma);
  // The soft loss of x against itself is not its minimum in b, so only the
  // starting loss is pinned; the coordinates move very little.
  CHECK(b.loss_trace.front() == doctest::Approx(self).epsilon(1e-12));
  CHECK(b.loss <= b.loss_trace.front());
}

TEST_CASE("soft barycenter gradient w.r.t. coordinates matches finite differences") {
  Rng rng(51);
  BarycenterProblem p;
  p.inputs = {TimeSeries(gaussian_matrix(6, 3, rng)), TimeSeries(gaussian_matrix(5, 2, rng))};
  p.weights = {0.4, 0.6};
  const BarycenterProblem r = p.resolved();
  const Matrix b = gaussian_matrix(5, 2, rng);
  std::vector<AffineStiefel> fs{
      AffineStiefel{qr_retraction(gaussian_matrix(3, 2, rng)), gaussian_matrix(3, 1, rng).col(0)},
      AffineStiefel{qr_retraction(gaussian_matrix(2, 2, rng)), Vector::Zero(2)}};
  const double gamma = 0.7;
  auto loss = [&](const Matrix &bb) {
    double s = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
      s += r.weights[i] * soft_gi_value_and_grad(r.inputs[i], TimeSeries(bb), fs[i], gamma).value;
    return s;
  };
  Matrix grad = Matrix::Zero(5, 2);
  for (std::size_t i = 0; i < 2; ++i)
    grad += r.weights[i] * soft_gi_value_and_grad(r.inputs[i], TimeSeries(b), fs[i], gamma).grad_y;
  CHECK(oracle::max_relative_error(grad, oracle::finite_difference(loss, b, 1e-5), 1e-2) <= 1e-4);
}

TEST_CASE("soft GI barycenter lands near the DBA-GI solution on a rotated pair") {
  BarycenterProblem p;
  const TimeSeries x = make(SeriesKind::spiral2d, 0.0, 1, 0.02, 40);
  p.inputs = {x, make(SeriesKind::spiral2d, 2.0, 2, 0.02, 40)};
  BarycenterOptions o = restarts(8);
  o.solver.gamma = 0.1;
  const Barycenter hard = dba_gi(p, o);
  const Barycenter soft = soft_barycenter_gi(p, o);
  const double soft_as_hard = dtw_gi_loss(p, soft.series, o);
  CHECK(soft_as_hard <= 10.0 * hard.loss);
  for (std::size_t t = 1; t < soft.loss_trace.size(); ++t)
    CHECK(soft.loss_trace[t] <= soft.loss_trace[t - 1]);
}

TEST_CASE("minibatch soft barycenter runs and never increases the loss") {
  BarycenterProblem p;
  for (int i = 0; i < 6; ++i)
    p.inputs.push_back(make(SeriesKind::folium, 0.5 * i, static_cast<std::uint64_t>(i), 0.03, 24));
  BarycenterOptions o = restarts(2);
  o.minibatch = 2;
  o.solver.max_iter = 200;
  const Barycenter b = soft_barycenter_gi(p, o);
  CHECK(b.loss < b.loss_trace.front());
  for (std::size_t t = 1; t < b.loss_trace.size(); ++t)
    CHECK(b.loss_trace[t] <= b.loss_trace[t - 1]);
  const Barycenter again = soft_barycenter_gi(p, o);
  CHECK(again.series.values() == b.series.values());
}
