#pragma once

#include <variant>

#include "dtwgi/align.hpp"

namespace dtwgi {

/// f(v) = P v with P (p_out x p_in) having orthonormal columns.
struct StiefelLinear {
  Matrix P;

  static StiefelLinear identity(Eigen::Index p_out, Eigen::Index p_in);
};

/// f(v) = P v + b.
struct AffineStiefel {
  Matrix P;
  Vector b;

  static AffineStiefel identity(Eigen::Index p_out, Eigen::Index p_in);
};

/// Circular shift of p coordinates: coordinate c moves to (c + k) mod p.
struct ChromaTransposition {
  int k = 0;
  Eigen::Index p = 12;
};

using Transform = std::variant<StiefelLinear, AffineStiefel, ChromaTransposition>;

Eigen::Index input_dims(const Transform &f);
Eigen::Index output_dims(const Transform &f);

/// Applies f to every observation of y.
TimeSeries apply_transform(const Transform &f, const TimeSeries &y);

/// The linear part of f as a matrix (the permutation matrix for a
/// transposition) and the offset (zero unless affine).
Matrix linear_part(const Transform &f);
Vector offset_part(const Transform &f);

/// ||P^T P - I||_F.
double orthonormality_error(const Matrix &P);

/// Registration objective <W_path, C(x, f(y))>.
double registration_cost(const TimeSeries &x, const TimeSeries &y,
                         const AlignmentPath &path, const Transform &f);

/// x^T W y, the (p_x x p_y) path-weighted cross-covariance.
Matrix path_cross_covariance(const TimeSeries &x, const TimeSeries &y,
                             const AlignmentPath &path);

/// argmax over Stiefel matrices S of <M, S>: U V^T from the thin SVD of M.
StiefelLinear stiefel_maximizer(const Matrix &M);

/// True when M has a (numerically) zero singular value, i.e. the maximizer
/// returned by stiefel_maximizer is not unique.
bool is_rank_deficient(const Matrix &M);

/// Best StiefelLinear for a fixed alignment. Requires x.dims() >= y.dims().
StiefelLinear procrustes_solve(const TimeSeries &x, const TimeSeries &y,
                               const AlignmentPath &path);

/// Best AffineStiefel for a fixed alignment: Procrustes on data centred by
/// the path-weighted means, then b = mean_x - P mean_y.
AffineStiefel affine_procrustes_solve(const TimeSeries &x, const TimeSeries &y,
                                      const AlignmentPath &path);

/// Exhaustive search over the p circular shifts; ties go to the smallest k.
ChromaTransposition transposition_solve(const TimeSeries &x, const TimeSeries &y,
                                        const AlignmentPath &path);

/// Circular shift of every row of y by k (coordinate c -> (c + k) mod p).
TimeSeries shift_coordinates(const TimeSeries &y, int k);

/// Tangent-space projection of a Euclidean gradient at P:
/// G - P sym(P^T G).
Matrix stiefel_tangent_projection(const Matrix &P, const Matrix &G);

/// QR retraction with the diagonal of R made positive.
Matrix qr_retraction(const Matrix &A);

/// One Riemannian descent step on (P, b): project, step, retract P; plain
/// gradient step on b.
AffineStiefel riemannian_grad_step(const AffineStiefel &f, const Matrix &grad_P,
                                   const Vector &grad_b, double step);

} // namespace dtwgi
