#include "dtwgi/transforms.hpp"

#include <cmath>
#include <limits>

#include "dtwgi/error.hpp"

namespace dtwgi {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

int wrap_shift(int k, Eigen::Index p) {
  const auto pi = static_cast<int>(p);
  return ((k % pi) + pi) % pi;
}

void require_path_fits(const TimeSeries &x, const TimeSeries &y,
                       const AlignmentPath &path) {
  for (const auto &[i, j] : path.pairs)
    if (i < 0 || i >= x.length() || j < 0 || j >= y.length())
      throw ConfigError("alignment path index out of range");
  if (path.pairs.empty()) throw ConfigError("empty alignment path");
}

} // namespace

StiefelLinear StiefelLinear::identity(Eigen::Index p_out, Eigen::Index p_in) {
  if (p_out < p_in)
    throw DimensionError("Stiefel map needs output dims >= input dims", p_out,
                         p_in);
  return {Matrix::Identity(p_out, p_in)};
}

AffineStiefel AffineStiefel::identity(Eigen::Index p_out, Eigen::Index p_in) {
  return {StiefelLinear::identity(p_out, p_in).P, Vector::Zero(p_out)};
}

Eigen::Index input_dims(const Transform &f) {
  return std::visit(overloaded{
                        [](const StiefelLinear &s) { return s.P.cols(); },
                        [](const AffineStiefel &a) { return a.P.cols(); },
                        [](const ChromaTransposition &c) { return c.p; },
                    },
                    f);
}

Eigen::Index output_dims(const Transform &f) {
  return std::visit(overloaded{
                        [](const StiefelLinear &s) { return s.P.rows(); },
                        [](const AffineStiefel &a) { return a.P.rows(); },
                        [](const ChromaTransposition &c) { return c.p; },
                    },
                    f);
}

TimeSeries shift_coordinates(const TimeSeries &y, int k) {
  const Eigen::Index p = y.dims();
  const int s = wrap_shift(k, p);
  Matrix out(y.length(), p);
  for (Eigen::Index c = 0; c < p; ++c) out.col((c + s) % p) = y.values().col(c);
  return TimeSeries(std::move(out));
}

TimeSeries apply_transform(const Transform &f, const TimeSeries &y) {
  if (input_dims(f) != y.dims())
    throw DimensionError("transform input dims do not match series dims",
                         input_dims(f), y.dims());
  return std::visit(
      overloaded{
          [&](const StiefelLinear &s) {
            return TimeSeries(y.values() * s.P.transpose());
          },
          [&](const AffineStiefel &a) {
            Matrix out = y.values() * a.P.transpose();
            out.rowwise() += a.b.transpose();
            return TimeSeries(std::move(out));
          },
          [&](const ChromaTransposition &c) { return shift_coordinates(y, c.k); },
      },
      f);
}

Matrix linear_part(const Transform &f) {
  return std::visit(overloaded{
                        [](const StiefelLinear &s) { return s.P; },
                        [](const AffineStiefel &a) { return a.P; },
                        [](const ChromaTransposition &c) {
                          Matrix P = Matrix::Zero(c.p, c.p);
                          const int s = wrap_shift(c.k, c.p);
                          for (Eigen::Index col = 0; col < c.p; ++col)
                            P((col + s) % c.p, col) = 1.0;
                          return P;
                        },
                    },
                    f);
}

Vector offset_part(const Transform &f) {
  if (const auto *a = std::get_if<AffineStiefel>(&f)) return a->b;
  return Vector::Zero(output_dims(f));
}

double orthonormality_error(const Matrix &P) {
  return (P.transpose() * P - Matrix::Identity(P.cols(), P.cols())).norm();
}

double registration_cost(const TimeSeries &x, const TimeSeries &y,
                         const AlignmentPath &path, const Transform &f) {
  return path.cost(cost_matrix(x, apply_transform(f, y)));
}

Matrix path_cross_covariance(const TimeSeries &x, const TimeSeries &y,
                             const AlignmentPath &path) {
  require_path_fits(x, y, path);
  Matrix M = Matrix::Zero(x.dims(), y.dims());
  for (const auto &[i, j] : path.pairs)
    M.noalias() += x.row(i).transpose() * y.row(j);
  return M;
}

StiefelLinear stiefel_maximizer(const Matrix &M) {
  if (M.rows() < M.cols())
    throw DimensionError("Stiefel maximizer needs rows >= cols", M.rows(),
                         M.cols());
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU() * svd.matrixV().transpose()};
}

bool is_rank_deficient(const Matrix &M) {
  const Vector s = Eigen::JacobiSVD<Matrix>(M).singularValues();
  if (s.size() == 0) return true;
  const double smax = s(0);
  return smax == 0.0 ||
         s(s.size() - 1) <= smax * 1e3 * std::numeric_limits<double>::epsilon() *
                                static_cast<double>(std::max(M.rows(), M.cols()));
}

StiefelLinear procrustes_solve(const TimeSeries &x, const TimeSeries &y,
                               const AlignmentPath &path) {
  if (x.dims() < y.dims())
    throw DimensionError("Procrustes registration needs x dims >= y dims",
                         x.dims(), y.dims());
  return stiefel_maximizer(path_cross_covariance(x, y, path));
}

AffineStiefel affine_procrustes_solve(const TimeSeries &x, const TimeSeries &y,
                                      const AlignmentPath &path) {
  if (x.dims() < y.dims())
    throw DimensionError("Procrustes registration needs x dims >= y dims",
                         x.dims(), y.dims());
  require_path_fits(x, y, path);
  Vector mx = Vector::Zero(x.dims());
  Vector my = Vector::Zero(y.dims());
  for (const auto &[i, j] : path.pairs) {
    mx += x.row(i).transpose();
    my += y.row(j).transpose();
  }
  const auto n = static_cast<double>(path.size());
  mx /= n;
  my /= n;

  Matrix M = Matrix::Zero(x.dims(), y.dims());
  for (const auto &[i, j] : path.pairs)
    M.noalias() += (x.row(i).transpose() - mx) * (y.row(j).transpose() - my).transpose();

  AffineStiefel f;
  f.P = stiefel_maximizer(M).P;
  f.b = mx - f.P * my;
  return f;
}

ChromaTransposition transposition_solve(const TimeSeries &x, const TimeSeries &y,
                                        const AlignmentPath &path) {
  if (x.dims() != y.dims())
    throw DimensionError("transposition needs equal dims", x.dims(), y.dims());
  require_path_fits(x, y, path);
  const Eigen::Index p = x.dims();
  ChromaTransposition best{0, p};
  double best_cost = std::numeric_limits<double>::infinity();
  for (int k = 0; k < static_cast<int>(p); ++k) {
    double c = 0.0;
    for (const auto &[i, j] : path.pairs)
      for (Eigen::Index col = 0; col < p; ++col) {
        const double d = x.values()(i, (col + k) % p) - y.values()(j, col);
        c += d * d;
      }
    if (c < best_cost) {
      best_cost = c;
      best.k = k;
    }
  }
  return best;
}

Matrix stiefel_tangent_projection(const Matrix &P, const Matrix &G) {
  const Matrix PtG = P.transpose() * G;
  return G - P * (0.5 * (PtG + PtG.transpose()));
}

Matrix qr_retraction(const Matrix &A) {
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ() * Matrix::Identity(A.rows(), A.cols());
  const Matrix &R = qr.matrixQR();
  for (Eigen::Index c = 0; c < A.cols(); ++c)
    if (R(c, c) < 0.0) Q.col(c) *= -1.0;
  return Q;
}

AffineStiefel riemannian_grad_step(const AffineStiefel &f, const Matrix &grad_P,
                                   const Vector &grad_b, double step) {
  if (grad_P.rows() != f.P.rows() || grad_P.cols() != f.P.cols())
    throw DimensionError("gradient shape does not match P", grad_P.size(),
                         f.P.size());
  if (grad_b.size() != f.b.size())
    throw DimensionError("gradient shape does not match b", grad_b.size(),
                         f.b.size());
  if (!grad_P.allFinite() || !grad_b.allFinite() || !std::isfinite(step))
    throw DataError("non-finite gradient in Riemannian step");

  AffineStiefel out = f;
  const Matrix xi = stiefel_tangent_projection(f.P, grad_P);
  if (!(step * xi).isZero(0.0)) out.P = qr_retraction(f.P - step * xi);
  out.b = f.b - step * grad_b;
  return out;
}

} // namespace dtwgi
