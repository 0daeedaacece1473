#include <numbers>

#include "doctest.h"
#include "dtwgi/error.hpp"
#include "dtwgi/random.hpp"
#include "dtwgi/synth.hpp"
#include "dtwgi/transforms.hpp"

using namespace dtwgi;

namespace {

// Random Stiefel matrix by modified Gram-Schmidt on a Gaussian draw.
Matrix sample_stiefel(Eigen::Index n, Eigen::Index k, Rng &rng) {
  Matrix A = gaussian_matrix(n, k, rng);
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index d = 0; d < c; ++d) A.col(c) -= A.col(d).dot(A.col(c)) * A.col(d);
    A.col(c).normalize();
  }
  return A;
}

double inner(const Matrix &a, const Matrix &b) { return a.cwiseProduct(b).sum(); }

double fixed_path_objective(const TimeSeries &x, const TimeSeries &y,
                            const AlignmentPath &path, const Matrix &P,
                            const Vector &b) {
  double s = 0.0;
  for (const auto &[i, j] : path.pairs)
    s += (x.row(i).transpose() - P * y.row(j).transpose() - b).squaredNorm();
  return s;
}

} // namespace

TEST_CASE("apply: identity, quarter turn, unit chroma shift") {
  const TimeSeries y = TimeSeries::from_rows({{1, 2}, {3, 4}});
  CHECK(apply_transform(StiefelLinear::identity(2, 2), y).values() == y.values());

  const TimeSeries turned =
      apply_transform(StiefelLinear{rotation_2d(std::numbers::pi / 2)},
                      TimeSeries::from_rows({{1, 0}}));
  CHECK(turned.values()(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(turned.values()(0, 1) == doctest::Approx(1.0));

  const TimeSeries shifted =
      apply_transform(ChromaTransposition{1, 3}, TimeSeries::from_rows({{1, 0, 0}}));
  CHECK(shifted.values() == TimeSeries::from_rows({{0, 1, 0}}).values());
}

TEST_CASE("apply rejects a dimensionality mismatch") {
  CHECK_THROWS_AS(apply_transform(StiefelLinear::identity(3, 2),
                                  TimeSeries::from_rows({{1, 2, 3}})),
                  DimensionError);
}

TEST_CASE("linear part of a transposition reproduces the shift") {
  Rng rng(4);
  const TimeSeries y(gaussian_matrix(5, 12, rng));
  const ChromaTransposition t{5, 12};
  const Matrix viaMatrix = y.values() * linear_part(t).transpose();
  CHECK((viaMatrix - apply_transform(t, y).values()).norm() == 0.0);
}

TEST_CASE("procrustes: self-registration is the identity action") {
  Rng rng(8);
  const TimeSeries x(gaussian_matrix(10, 3, rng));
  const auto path = AlignmentPath::diagonal(10);
  const StiefelLinear f = procrustes_solve(x, x, path);
  CHECK((f.P - Matrix::Identity(3, 3)).norm() < 1e-10);
  CHECK(registration_cost(x, x, path, f) < 1e-20);
}

TEST_CASE("procrustes recovers a planar rotation") {
  Rng rng(9);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int k = 0; k < 20; ++k) {
    const Matrix R = rotation_2d(angle(rng));
    const TimeSeries x(gaussian_matrix(12, 2, rng));
    // y_j = R^T x_j, so the map taking y back onto x is R.
    const TimeSeries y(x.values() * R);
    const StiefelLinear f = procrustes_solve(x, y, AlignmentPath::diagonal(12));
    CHECK((f.P - R).norm() <= 1e-6);
  }
}

TEST_CASE("stiefel maximizer beats random Stiefel samples") {
  Rng rng(10);
  const Matrix M = gaussian_matrix(3, 2, rng);
  const double best = inner(M, stiefel_maximizer(M).P);
  for (int s = 0; s < 10000; ++s) CHECK(inner(M, sample_stiefel(3, 2, rng)) <= best + 1e-10);
}

TEST_CASE("rank-deficient cross-covariance still yields a Stiefel map") {
  Matrix M = Matrix::Zero(3, 2);
  M(0, 0) = 1.0;
  CHECK(is_rank_deficient(M));
  const StiefelLinear f = stiefel_maximizer(M);
  CHECK(orthonormality_error(f.P) < 1e-10);
  Rng rng(2);
  CHECK_FALSE(is_rank_deficient(gaussian_matrix(3, 2, rng)));
}

TEST_CASE("affine procrustes: pure translation and rotation plus offset") {
  Rng rng(12);
  const TimeSeries x(gaussian_matrix(15, 3, rng));
  const auto path = AlignmentPath::diagonal(15);

  Vector c(3);
  c << 0.5, -1.0, 2.0;
  // y = x + c: the map back onto x is P = I, b = -c.
  const TimeSeries shifted(x.values().rowwise() + c.transpose());
  const AffineStiefel t = affine_procrustes_solve(x, shifted, path);
  CHECK((t.P - Matrix::Identity(3, 3)).norm() < 1e-8);
  CHECK((t.b + c).norm() < 1e-8);

  const Matrix R = qr_retraction(gaussian_matrix(3, 3, rng));
  const Vector b0 = gaussian_matrix(3, 1, rng).col(0);
  const TimeSeries y((x.values().rowwise() - b0.transpose()) * R);
  const AffineStiefel f = affine_procrustes_solve(x, y, path);
  CHECK((f.P - R).norm() <= 1e-6);
  CHECK((f.b - b0).norm() <= 1e-6);
}

TEST_CASE("affine procrustes beats random affine candidates on a warped path") {
  Rng rng(13);
  const TimeSeries x(gaussian_matrix(8, 3, rng));
  const TimeSeries y(gaussian_matrix(6, 2, rng));
  AlignmentPath path;
  path.pairs = {{0, 0}, {1, 0}, {2, 1}, {3, 2}, {3, 3}, {4, 4}, {5, 4}, {6, 5}, {7, 5}};
  REQUIRE(path.is_admissible(8, 6));
  const AffineStiefel f = affine_procrustes_solve(x, y, path);
  const double best = fixed_path_objective(x, y, path, f.P, f.b);
  CHECK(best == doctest::Approx(registration_cost(x, y, path, f)).epsilon(1e-12));
  for (int s = 0; s < 1000; ++s) {
    const Matrix P = sample_stiefel(3, 2, rng);
    const Vector b = gaussian_matrix(3, 1, rng).col(0);
    CHECK(fixed_path_objective(x, y, path, P, b) >= best - 1e-10);
  }
}

TEST_CASE("transposition solve recovers every shift and agrees with brute force") {
  Rng rng(14);
  const TimeSeries x(gaussian_matrix(9, 12, rng).cwiseAbs());
  const auto path = AlignmentPath::diagonal(9);
  CHECK(transposition_solve(x, x, path).k == 0);
  for (int k = 0; k < 12; ++k) {
    const TimeSeries y = shift_coordinates(x, 12 - k);
    CHECK(transposition_solve(x, y, path).k == k);
  }
  // Independent recomputation through the permutation-matrix route.
  const TimeSeries y(gaussian_matrix(9, 12, rng).cwiseAbs());
  int best_k = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 12; ++k) {
    const Matrix Pi = linear_part(ChromaTransposition{k, 12});
    double c = 0.0;
    for (Eigen::Index t = 0; t < 9; ++t)
      c += (x.row(t).transpose() - Pi * y.row(t).transpose()).squaredNorm();
    if (c < best) {
      best = c;
      best_k = k;
    }
  }
  CHECK(transposition_solve(x, y, path).k == best_k);
}

TEST_CASE("riemannian step: zero gradient, retraction contract, descent") {
  Rng rng(15);
  const AffineStiefel f{qr_retraction(gaussian_matrix(4, 2, rng)), Vector::Ones(4)};
  const AffineStiefel same =
      riemannian_grad_step(f, Matrix::Zero(4, 2), Vector::Zero(4), 0.1);
  CHECK(same.P == f.P);
  CHECK(same.b == f.b);

  for (int k = 0; k < 20; ++k) {
    const AffineStiefel g = riemannian_grad_step(f, 10.0 * gaussian_matrix(4, 2, rng),
                                                 Vector::Ones(4), 0.5);
    CHECK(orthonormality_error(g.P) <= 1e-8);
  }

  // Quadratic objective ||P - A||^2 + ||b - c||^2 on random targets.
  for (int k = 0; k < 20; ++k) {
    const Matrix A = gaussian_matrix(4, 2, rng);
    const Vector c = gaussian_matrix(4, 1, rng).col(0);
    auto obj = [&](const AffineStiefel &h) {
      return (h.P - A).squaredNorm() + (h.b - c).squaredNorm();
    };
    const Matrix gP = 2.0 * (f.P - A);
    const Vector gb = 2.0 * (f.b - c);
    double step = 1.0;
    while (obj(riemannian_grad_step(f, gP, gb, step)) > obj(f) && step > 1e-12) step *= 0.5;
    CHECK(obj(riemannian_grad_step(f, gP, gb, step)) <= obj(f));
    CHECK(step > 1e-12);
  }
}

TEST_CASE("riemannian step rejects non-finite gradients") {
  const AffineStiefel f = AffineStiefel::identity(2, 2);
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(riemannian_grad_step(f, g, Vector::Zero(2), 0.1), DataError);
}

TEST_CASE("Stiefel maps preserve norms") {
  Rng rng(16);
  for (int k = 0; k < 50; ++k) {
    const Matrix P = qr_retraction(gaussian_matrix(5, 3, rng));
    const Vector v = gaussian_matrix(3, 1, rng).col(0);
    CHECK(std::abs((P * v).norm() - v.norm()) <= 1e-8 * v.norm());
  }
}
