#pragma once

#include <Eigen/Core>

#include "fairdim/dataio.hpp"

namespace fairdim {

/// d x r projection; `orthonormal` must be flagged by whoever produced it
/// and is re-checked (within 1e-8) before orthonormality-dependent ops.
struct ProjectionMatrix {
  Matrix columns;
  int rank;
};

bool is_orthonormal(const Matrix& U, double tol = 1e-8);
void require_orthonormal(const Matrix& U, double tol = 1e-8);

/// Per-group Gram matrix and squared-singular-value spectrum of X_s.
struct SpectralSummary {
  Matrix gram;                     // (1/n_s) X_s^T X_s
  Vector singular_values_squared;  // sigma_k^2(X_s), nonincreasing
  int group_size;                  // n_s
};

SpectralSummary make_spectral_summary(const Matrix& X);

/// Symmetric matrix M_s = (1/n_s)[X_s^T X_s - (1/r) sum_{k<=r} sigma_k^2 I]
/// whose quadratic form through an orthonormal U equals the negated group loss.
struct TargetMatrix {
  Matrix m;
  int group_label;
  int rank_used;
};

double reconstruction_error(const Matrix& X, const ProjectionMatrix& U);
double optimal_error(const Matrix& X, int r);
double reconstruction_loss(const Matrix& X, const ProjectionMatrix& U);
double loss_trace_form(const Matrix& X, const ProjectionMatrix& U,
                       const SpectralSummary& summary);
TargetMatrix build_target_matrix(const Matrix& Xs, int group_label, int r);

}  // namespace fairdim
