#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fairdim/spectra.hpp"

namespace fairdim {

struct JevdConfig {
  int max_iterations = 500;
  // Effective stopping threshold is objective_tolerance * sum_k ||M_k||_F^2
  // when tolerance_is_relative, otherwise the value itself.
  double objective_tolerance = 1e-12;
  bool tolerance_is_relative = true;
  double stall_tolerance = 1e-10;          // relative decrease below this => stalled
  double degenerate_denominator_floor = 1e-12;
  bool check_convergence = true;           // false: run exactly max_iterations sweeps
};

enum class JevdStatus { Converged, MaxIterations, Stalled };
std::string to_string(JevdStatus status);
JevdStatus jevd_status_from_string(const std::string& s);

/// Per-iteration decomposition T_s = diag(Lambda_s) + O_s.
struct JevdState {
  std::vector<Matrix> transformed;   // T_s, d x d
  std::vector<Vector> diagonals;     // Lambda_s
  std::vector<Matrix> offdiagonals;  // O_s, zero diagonal
  Matrix accumulated;                // U
  int iteration = 1;
};

struct JevdResult {
  Matrix eigenvectors;                  // raw accumulated U (not orthonormalized)
  std::vector<Vector> diagonals;        // diag of final T_s per group
  std::vector<double> objective_trace;  // C(U) per iteration, entry 0 at U = I
  JevdStatus status = JevdStatus::MaxIterations;
  double orthonormality_defect = 0.0;   // ||U^T U - I||_F of eigenvectors
  int iterations = 0;
};

/// Thrown when an iteration factor (or U itself) is numerically singular.
struct JevdAbort : std::runtime_error {
  int iteration;
  JevdAbort(const std::string& what, int iter)
      : std::runtime_error(what), iteration(iter) {}
};

Matrix zdiag(const Matrix& M);
double condition_estimate(const Matrix& A);  // 1-norm condition via explicit inverse

double jevd_objective(const Matrix& U, const std::vector<TargetMatrix>& targets);

/// Zero-diagonal correction V minimizing the linearized criterion:
/// V_mn = -[sum_s O_s(mn) dL_s] / [sum_s dL_s^2] with dL_s = Lambda_s(m)-Lambda_s(n);
/// entries with denominator below the configured floor are zeroed.
Matrix correction_matrix(const JevdState& state, const JevdConfig& config);

JevdResult jevd_solve(const std::vector<TargetMatrix>& targets, const JevdConfig& config);

/// Closest orthonormal matrix in Frobenius norm (polar factor via SVD).
Matrix orthonormalize(const Matrix& U);

}  // namespace fairdim
