#include "fairdim/fairpca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace fairdim {

namespace {

std::vector<TargetMatrix> build_targets(const GroupedDataset& data, int r) {
  std::vector<TargetMatrix> targets;
  const auto groups = split_groups(data);
  targets.reserve(groups.size());
  for (std::size_t s = 0; s < groups.size(); ++s)
    targets.push_back(build_target_matrix(groups[s], static_cast<int>(s), r));
  return targets;
}

Matrix score_table(const Matrix& basis, const std::vector<TargetMatrix>& targets) {
  const auto d = basis.rows();
  const std::size_t K = targets.size();
  Matrix scores(d, static_cast<Eigen::Index>(K));
  for (std::size_t s = 0; s < K; ++s) {
    const Matrix prod = targets[s].m * basis;
    for (Eigen::Index j = 0; j < d; ++j)
      scores(j, static_cast<Eigen::Index>(s)) = basis.col(j).dot(prod.col(j));
  }
  return scores;
}

std::vector<int> greedy_minmax(const Matrix& scores, int r) {
  const auto d = scores.rows();
  const auto K = scores.cols();
  std::vector<int> selected;
  std::vector<bool> used(static_cast<std::size_t>(d), false);
  Vector running = Vector::Zero(K);
  for (int step = 0; step < r; ++step) {
    int best = -1;
    double best_min = -std::numeric_limits<double>::infinity();
    double best_total = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const Vector cand = running + scores.row(j).transpose();
      const double cand_min = cand.minCoeff();
      const double cand_total = cand.sum();
      if (cand_min > best_min ||
          (cand_min == best_min && cand_total > best_total)) {
        best = static_cast<int>(j);
        best_min = cand_min;
        best_total = cand_total;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    selected.push_back(best);
    running += scores.row(best).transpose();
  }
  return selected;
}

FairPcaModel assemble_model(const GroupedDataset& data, int r, const JevdConfig& config,
                            const JevdResult& solve, const Matrix& basis,
                            const std::vector<TargetMatrix>& targets) {
  FairPcaModel model;
  model.full_basis = basis;
  model.column_scores = score_table(basis, targets);
  model.selected_columns = greedy_minmax(model.column_scores, r);
  model.projection.rank = r;
  model.projection.columns.resize(basis.rows(), r);
  for (int j = 0; j < r; ++j)
    model.projection.columns.col(j) = basis.col(model.selected_columns[static_cast<std::size_t>(j)]);
  model.per_group_losses.resize(targets.size());
  for (std::size_t s = 0; s < targets.size(); ++s) {
    double sum = 0.0;
    for (int idx : model.selected_columns)
      sum += model.column_scores(idx, static_cast<Eigen::Index>(s));
    model.per_group_losses[s] = -sum;
  }
  model.fit_config = config;
  model.rank = r;
  model.status = solve.status;
  model.final_objective = solve.objective_trace.back();
  model.orthonormality_defect = solve.orthonormality_defect;
  model.iterations = solve.iterations;
  model.column_means = data.column_means;
  model.column_scales = data.column_scales;
  return model;
}

}  // namespace

std::vector<int> select_columns(const Matrix& full_basis,
                                const std::vector<TargetMatrix>& targets, int r) {
  if (r < 1 || r > full_basis.cols()) throw std::invalid_argument("rank out of range");
  require_orthonormal(full_basis);
  return greedy_minmax(score_table(full_basis, targets), r);
}

FairPcaModel fit_fair_pca(const GroupedDataset& data, int r, const JevdConfig& config) {
  if (r < 1 || r >= data.d())
    throw std::invalid_argument("rank must satisfy 1 <= r < d");
  if (data.num_groups() < 2) throw std::invalid_argument("need at least 2 groups");
  const auto targets = build_targets(data, r);
  const JevdResult solve = jevd_solve(targets, config);
  const Matrix basis = orthonormalize(solve.eigenvectors);
  return assemble_model(data, r, config, solve, basis, targets);
}

std::vector<FairPcaModel> fit_fair_pca_sweep(const GroupedDataset& data,
                                             const std::vector<int>& ranks,
                                             const JevdConfig& config) {
  if (ranks.empty()) throw std::invalid_argument("empty rank list");
  for (int r : ranks)
    if (r < 1 || r >= data.d())
      throw std::invalid_argument("rank must satisfy 1 <= r < d");
  const auto base_targets = build_targets(data, ranks.front());
  const JevdResult solve = jevd_solve(base_targets, config);
  const Matrix basis = orthonormalize(solve.eigenvectors);
  std::vector<FairPcaModel> models;
  models.reserve(ranks.size());
  for (int r : ranks) {
    const auto targets = (r == ranks.front()) ? base_targets : build_targets(data, r);
    models.push_back(assemble_model(data, r, config, solve, basis, targets));
  }
  return models;
}

PcaModel fit_standard_pca(const GroupedDataset& data, int r) {
  const int d = data.d();
  if (r < 1 || r > d) throw std::invalid_argument("rank out of range");
  const Matrix cov =
      (data.features.transpose() * data.features) / static_cast<double>(data.n());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("covariance eigendecomposition failed");

  PcaModel model;
  model.projection.rank = r;
  model.projection.columns.resize(d, r);
  model.explained_spectrum.resize(r);
  for (int j = 0; j < r; ++j) {
    Vector v = eig.eigenvectors().col(d - 1 - j);  // descending eigenvalues
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;  // largest-magnitude entry positive
    model.projection.columns.col(j) = v;
    model.explained_spectrum[j] = eig.eigenvalues()[d - 1 - j];
  }
  model.column_means = data.column_means;
  model.column_scales = data.column_scales;
  return model;
}

Matrix transform(const ProjectionMatrix& projection, const Matrix& X) {
  if (X.cols() != projection.columns.rows())
    throw std::invalid_argument("dimension mismatch between data and projection");
  return X * projection.columns;
}

MinMaxOracleResult minmax_loss_oracle_on_basis(const Matrix& full_basis,
                                               const std::vector<TargetMatrix>& targets,
                                               int r) {
  const int d = static_cast<int>(full_basis.cols());
  if (d > 12) throw std::invalid_argument("enumeration oracle limited to d <= 12");
  if (r < 1 || r > d) throw std::invalid_argument("rank out of range");
  const Matrix scores = score_table(full_basis, targets);
  const std::size_t K = targets.size();

  MinMaxOracleResult best;
  best.max_loss = std::numeric_limits<double>::infinity();
  std::vector<int> subset(static_cast<std::size_t>(r));
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    std::vector<double> losses(K);
    double max_loss = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < K; ++s) {
      double sum = 0.0;
      for (int j : subset) sum += scores(j, static_cast<Eigen::Index>(s));
      losses[s] = -sum;
      max_loss = std::max(max_loss, losses[s]);
    }
    if (max_loss < best.max_loss) {
      best.subset = subset;
      best.losses = losses;
      best.max_loss = max_loss;
    }
    // next combination in lexicographic order
    int i = r - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == d - r + i) --i;
    if (i < 0) break;
    ++subset[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < r; ++k)
      subset[static_cast<std::size_t>(k)] = subset[static_cast<std::size_t>(k - 1)] + 1;
  }
  return best;
}

MinMaxOracleResult minmax_loss_oracle(const GroupedDataset& data, int r,
                                      const JevdConfig& config) {
  const auto targets = build_targets(data, r);
  const JevdResult solve = jevd_solve(targets, config);
  const Matrix basis = orthonormalize(solve.eigenvectors);
  return minmax_loss_oracle_on_basis(basis, targets, r);
}

}  // namespace fairdim
