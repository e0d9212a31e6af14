#include "fairdim/spectra.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Dense>

namespace fairdim {

bool is_orthonormal(const Matrix& U, double tol) {
  const Matrix g = U.transpose() * U;
  return (g - Matrix::Identity(U.cols(), U.cols())).norm() <= tol;
}

void require_orthonormal(const Matrix& U, double tol) {
  if (!is_orthonormal(U, tol))
    throw std::invalid_argument("projection matrix is not orthonormal");
}

SpectralSummary make_spectral_summary(const Matrix& X) {
  const auto n = X.rows();
  const auto d = X.cols();
  if (n < 2) throw std::invalid_argument("group needs at least 2 rows");

  SpectralSummary s;
  s.group_size = static_cast<int>(n);
  const Matrix xtx = X.transpose() * X;
  s.gram = xtx / static_cast<double>(n);

  // sigma_k^2 as eigenvalues of the d x d symmetric X^T X; negative
  // round-off eigenvalues clamped to zero.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(xtx);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  const Eigen::Index m = std::min(n, d);
  s.singular_values_squared.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double v = eig.eigenvalues()[d - 1 - k];  // descending
    s.singular_values_squared[k] = std::max(v, 0.0);
  }
  return s;
}

double reconstruction_error(const Matrix& X, const ProjectionMatrix& U) {
  if (X.cols() != U.columns.rows())
    throw std::invalid_argument("dimension mismatch between data and projection");
  require_orthonormal(U.columns);
  const Matrix residual = X - (X * U.columns) * U.columns.transpose();
  return residual.squaredNorm() / static_cast<double>(X.rows());
}

double optimal_error(const Matrix& X, int r) {
  const auto d = X.cols();
  if (r < 1 || r > d) throw std::invalid_argument("rank out of range");
  SpectralSummary s = make_spectral_summary(X);
  double top = 0.0;
  for (int k = 0; k < r && k < s.singular_values_squared.size(); ++k)
    top += s.singular_values_squared[k];
  const double total = (X.transpose() * X).trace();
  return (total - top) / static_cast<double>(X.rows());
}

double reconstruction_loss(const Matrix& X, const ProjectionMatrix& U) {
  return reconstruction_error(X, U) - optimal_error(X, U.rank);
}

double loss_trace_form(const Matrix& X, const ProjectionMatrix& U,
                       const SpectralSummary& summary) {
  const auto d = X.cols();
  const int r = U.rank;
  if (r < 1 || r > d) throw std::invalid_argument("rank out of range");
  if (U.columns.cols() != r) throw std::invalid_argument("projection rank mismatch");
  double top = 0.0;
  for (int k = 0; k < r && k < summary.singular_values_squared.size(); ++k)
    top += summary.singular_values_squared[k];
  const double n = static_cast<double>(X.rows());
  const Matrix core =
      (top / static_cast<double>(r)) * Matrix::Identity(d, d) - X.transpose() * X;
  return (U.columns.transpose() * (core / n) * U.columns).trace();
}

TargetMatrix build_target_matrix(const Matrix& Xs, int group_label, int r) {
  const auto d = Xs.cols();
  if (r < 1 || r > d) throw std::invalid_argument("rank out of range");
  if (Xs.rows() < 2) throw std::invalid_argument("group needs at least 2 rows");
  SpectralSummary s = make_spectral_summary(Xs);
  double top = 0.0;
  for (int k = 0; k < r && k < s.singular_values_squared.size(); ++k)
    top += s.singular_values_squared[k];
  const double ns = static_cast<double>(Xs.rows());
  TargetMatrix t;
  t.m = (Xs.transpose() * Xs - (top / static_cast<double>(r)) * Matrix::Identity(d, d)) / ns;
  t.group_label = group_label;
  t.rank_used = r;
  return t;
}

}  // namespace fairdim
