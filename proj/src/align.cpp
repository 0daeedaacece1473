#include "dtwgi/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtwgi/error.hpp"

namespace dtwgi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw ConfigError("soft-DTW needs gamma > 0 (use dtw() for the hard "
                      "minimum), got " + std::to_string(gamma));
}

void require_nonempty(const Matrix &C) {
  if (C.rows() < 1 || C.cols() < 1)
    throw ConfigError("cost matrix must be non-empty");
}

// -gamma * log(sum exp(-v / gamma)), shifted by the smallest argument.
double soft_min(double a, double b, double c, double gamma) {
  const double m = std::min({a, b, c});
  if (m == kInf) return kInf;
  const double s = std::exp(-(a - m) / gamma) + std::exp(-(b - m) / gamma) +
                   std::exp(-(c - m) / gamma);
  return m - gamma * std::log(s);
}

// Padded (n+2) x (m+2) table; R(0,0) = 0, first row/column +inf.
Matrix soft_forward(const Matrix &C, double gamma) {
  const Eigen::Index n = C.rows(), m = C.cols();
  Matrix R = Matrix::Constant(n + 2, m + 2, kInf);
  R(0, 0) = 0.0;
  for (Eigen::Index i = 1; i <= n; ++i)
    for (Eigen::Index j = 1; j <= m; ++j)
      R(i, j) = C(i - 1, j - 1) +
                soft_min(R(i - 1, j - 1), R(i - 1, j), R(i, j - 1), gamma);
  return R;
}

} // namespace

bool AlignmentPath::is_admissible(Eigen::Index tx, Eigen::Index ty) const {
  if (pairs.empty()) return false;
  if (pairs.front() != std::pair<Eigen::Index, Eigen::Index>{0, 0}) return false;
  if (pairs.back() != std::pair<Eigen::Index, Eigen::Index>{tx - 1, ty - 1})
    return false;
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    const auto di = pairs[k].first - pairs[k - 1].first;
    const auto dj = pairs[k].second - pairs[k - 1].second;
    const bool ok = (di == 1 && dj == 1) || (di == 1 && dj == 0) ||
                    (di == 0 && dj == 1);
    if (!ok) return false;
  }
  return true;
}

Matrix AlignmentPath::to_matrix(Eigen::Index tx, Eigen::Index ty) const {
  Matrix W = Matrix::Zero(tx, ty);
  for (const auto &[i, j] : pairs) W(i, j) = 1.0;
  return W;
}

double AlignmentPath::cost(const Matrix &C) const {
  double s = 0.0;
  for (const auto &[i, j] : pairs) s += C(i, j);
  return s;
}

AlignmentPath AlignmentPath::diagonal(Eigen::Index length) {
  AlignmentPath p;
  p.pairs.reserve(static_cast<std::size_t>(length));
  for (Eigen::Index t = 0; t < length; ++t) p.pairs.emplace_back(t, t);
  return p;
}

Matrix cost_matrix(const TimeSeries &x, const TimeSeries &y) {
  if (x.dims() != y.dims())
    throw DimensionError("cost matrix needs equal dimensionality", x.dims(),
                         y.dims());
  const Matrix &a = x.values();
  const Matrix &b = y.values();
  Matrix C(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    C.col(j) = (a.rowwise() - b.row(j)).rowwise().squaredNorm();
  return C;
}

DtwResult dtw(const Matrix &C) {
  require_nonempty(C);
  const Eigen::Index n = C.rows(), m = C.cols();
  Matrix R(n, m);
  R(0, 0) = C(0, 0);
  for (Eigen::Index i = 1; i < n; ++i) R(i, 0) = R(i - 1, 0) + C(i, 0);
  for (Eigen::Index j = 1; j < m; ++j) R(0, j) = R(0, j - 1) + C(0, j);
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index j = 1; j < m; ++j)
      R(i, j) = std::min({R(i - 1, j - 1), R(i - 1, j), R(i, j - 1)}) + C(i, j);

  DtwResult out;
  out.cost = R(n - 1, m - 1);
  Eigen::Index i = n - 1, j = m - 1;
  out.path.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = R(i - 1, j - 1);
      const double up = R(i - 1, j);
      const double left = R(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    out.path.pairs.emplace_back(i, j);
  }
  std::reverse(out.path.pairs.begin(), out.path.pairs.end());
  return out;
}

double soft_dtw(const Matrix &C, double gamma) {
  require_gamma(gamma);
  require_nonempty(C);
  return soft_forward(C, gamma)(C.rows(), C.cols());
}

SoftDtwResult soft_dtw_value_and_grad(const Matrix &C, double gamma) {
  require_gamma(gamma);
  require_nonempty(C);
  const Eigen::Index n = C.rows(), m = C.cols();
  Matrix R = soft_forward(C, gamma);

  Matrix D = Matrix::Zero(n + 2, m + 2);
  D.block(1, 1, n, m) = C;
  for (Eigen::Index i = 1; i <= n; ++i) R(i, m + 1) = -kInf;
  for (Eigen::Index j = 1; j <= m; ++j) R(n + 1, j) = -kInf;
  R(n + 1, m + 1) = R(n, m);

  Matrix E = Matrix::Zero(n + 2, m + 2);
  E(n + 1, m + 1) = 1.0;
  for (Eigen::Index j = m; j >= 1; --j) {
    for (Eigen::Index i = n; i >= 1; --i) {
      const double a = std::exp((R(i + 1, j) - R(i, j) - D(i + 1, j)) / gamma);
      const double b = std::exp((R(i, j + 1) - R(i, j) - D(i, j + 1)) / gamma);
      const double c =
          std::exp((R(i + 1, j + 1) - R(i, j) - D(i + 1, j + 1)) / gamma);
      E(i, j) = E(i + 1, j) * a + E(i, j + 1) * b + E(i + 1, j + 1) * c;
    }
  }
  SoftDtwResult out;
  out.value = R(n, m);
  out.grad = E.block(1, 1, n, m).cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

Matrix soft_dtw_grad(const Matrix &C, double gamma) {
  return soft_dtw_value_and_grad(C, gamma).grad;
}

} // namespace dtwgi
