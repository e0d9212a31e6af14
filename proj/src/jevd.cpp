#include "fairdim/jevd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace fairdim {

namespace {
constexpr double kSingularConditionLimit = 1e12;
}

std::string to_string(JevdStatus status) {
  switch (status) {
    case JevdStatus::Converged: return "converged";
    case JevdStatus::MaxIterations: return "max_iterations";
    case JevdStatus::Stalled: return "stalled";
  }
  return "unknown";
}

JevdStatus jevd_status_from_string(const std::string& s) {
  if (s == "converged") return JevdStatus::Converged;
  if (s == "max_iterations") return JevdStatus::MaxIterations;
  if (s == "stalled") return JevdStatus::Stalled;
  throw std::invalid_argument("unknown jevd status: " + s);
}

Matrix zdiag(const Matrix& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("zdiag needs a square matrix");
  Matrix out = M;
  out.diagonal().setZero();
  return out;
}

double condition_estimate(const Matrix& A) {
  Eigen::PartialPivLU<Matrix> lu(A);
  const Matrix inv = lu.inverse();
  const double norm_a = A.cwiseAbs().colwise().sum().maxCoeff();
  const double norm_inv = inv.cwiseAbs().colwise().sum().maxCoeff();
  const double cond = norm_a * norm_inv;
  return std::isfinite(cond) ? cond : std::numeric_limits<double>::infinity();
}

double jevd_objective(const Matrix& U, const std::vector<TargetMatrix>& targets) {
  if (U.rows() != U.cols()) throw std::invalid_argument("U must be square");
  if (condition_estimate(U) >= kSingularConditionLimit)
    throw std::invalid_argument("U is numerically singular");
  Eigen::PartialPivLU<Matrix> lu(U);
  double total = 0.0;
  for (const auto& t : targets) {
    if (t.m.rows() != U.rows())
      throw std::invalid_argument("target dimension mismatch");
    const Matrix conj = lu.solve(t.m * U);
    total += zdiag(conj).squaredNorm();
  }
  return total;
}

Matrix correction_matrix(const JevdState& state, const JevdConfig& config) {
  const auto d = state.accumulated.rows();
  const std::size_t K = state.transformed.size();
  Matrix V = Matrix::Zero(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    for (Eigen::Index n = 0; n < d; ++n) {
      if (m == n) continue;
      double num = 0.0, den = 0.0;
      for (std::size_t s = 0; s < K; ++s) {
        const double gap = state.diagonals[s][m] - state.diagonals[s][n];
        num += state.offdiagonals[s](m, n) * gap;
        den += gap * gap;
      }
      V(m, n) = (den < config.degenerate_denominator_floor) ? 0.0 : -num / den;
    }
  }
  return V;
}

namespace {

void decompose_state(JevdState& state) {
  const std::size_t K = state.transformed.size();
  state.diagonals.resize(K);
  state.offdiagonals.resize(K);
  for (std::size_t s = 0; s < K; ++s) {
    state.diagonals[s] = state.transformed[s].diagonal();
    state.offdiagonals[s] = zdiag(state.transformed[s]);
  }
}

double state_objective(const JevdState& state) {
  double total = 0.0;
  for (const auto& o : state.offdiagonals) total += o.squaredNorm();
  return total;
}

}  // namespace

JevdResult jevd_solve(const std::vector<TargetMatrix>& targets, const JevdConfig& config) {
  if (targets.empty()) throw std::invalid_argument("need at least one target matrix");
  const auto d = targets.front().m.rows();
  for (const auto& t : targets) {
    if (t.m.rows() != d || t.m.cols() != d)
      throw std::invalid_argument("targets must be square with equal dimension");
  }
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");

  double norm_scale = 0.0;
  for (const auto& t : targets) norm_scale += t.m.squaredNorm();
  const double eps = config.tolerance_is_relative
                         ? config.objective_tolerance * norm_scale
                         : config.objective_tolerance;

  JevdState state;
  state.accumulated = Matrix::Identity(d, d);
  for (const auto& t : targets) state.transformed.push_back(t.m);
  decompose_state(state);

  JevdResult result;
  double obj = state_objective(state);
  result.objective_trace.push_back(obj);
  result.status = JevdStatus::MaxIterations;

  for (int i = 1; i <= config.max_iterations; ++i) {
    if (config.check_convergence) {
      if (obj <= eps) {
        result.status = JevdStatus::Converged;
        break;
      }
      if (i > 1) {
        // Transient objective increases are normal for this unguarded update;
        // a stall means the iterate is no longer moving at all.
        const double prev = result.objective_trace[result.objective_trace.size() - 2];
        const double rel_change = std::abs(prev - obj) / std::max(prev, 1e-300);
        if (rel_change < config.stall_tolerance) {
          result.status = JevdStatus::Stalled;
          break;
        }
      }
    }
    state.iteration = i;
    const Matrix V = correction_matrix(state, config);
    const Matrix B = Matrix::Identity(d, d) + V;
    if (condition_estimate(B) >= kSingularConditionLimit)
      throw JevdAbort("iteration factor B is numerically singular at iteration " +
                          std::to_string(i),
                      i);
    Eigen::PartialPivLU<Matrix> lu(B);
    for (auto& T : state.transformed) T = lu.solve(T * B);
    state.accumulated = state.accumulated * B;
    decompose_state(state);
    obj = state_objective(state);
    result.objective_trace.push_back(obj);
    result.iterations = i;
  }

  if (!config.check_convergence) result.status = JevdStatus::MaxIterations;
  result.eigenvectors = state.accumulated;
  result.diagonals = state.diagonals;
  result.orthonormality_defect =
      (state.accumulated.transpose() * state.accumulated - Matrix::Identity(d, d)).norm();
  return result;
}

Matrix orthonormalize(const Matrix& U) {
  if (U.rows() != U.cols()) throw std::invalid_argument("expected a square matrix");
  Eigen::JacobiSVD<Matrix> svd(U, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues()[svd.singularValues().size() - 1];
  if (!(smin > 0.0) || svd.singularValues()[0] / smin >= kSingularConditionLimit)
    throw std::invalid_argument("matrix is numerically singular");
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace fairdim
