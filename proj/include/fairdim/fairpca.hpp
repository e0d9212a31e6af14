#pragma once

#include <string>
#include <vector>

#include "fairdim/dataio.hpp"
#include "fairdim/jevd.hpp"
#include "fairdim/spectra.hpp"

namespace fairdim {

struct FairPcaModel {
  ProjectionMatrix projection;      // d x r orthonormal
  Matrix full_basis;                // d x d orthonormalized JEVD eigenvectors
  std::vector<int> selected_columns;
  std::vector<double> per_group_losses;  // L(X_s; projection), trace form
  Matrix column_scores;             // d x K, score(j,s) = u_j^T M_s u_j
  JevdConfig fit_config;
  int rank = 0;
  JevdStatus status = JevdStatus::MaxIterations;
  double final_objective = 0.0;
  double orthonormality_defect = 0.0;
  int iterations = 0;
  Vector column_means;
  Vector column_scales;
};

struct PcaModel {
  ProjectionMatrix projection;
  Vector explained_spectrum;  // top-r eigenvalues of (1/n) X^T X, nonincreasing
  Vector column_means;
  Vector column_scales;
};

FairPcaModel fit_fair_pca(const GroupedDataset& data, int r, const JevdConfig& config);

/// One JEVD solve shared across all requested ranks (the target matrices for
/// different r differ only by identity shifts, which leave the solve invariant).
std::vector<FairPcaModel> fit_fair_pca_sweep(const GroupedDataset& data,
                                             const std::vector<int>& ranks,
                                             const JevdConfig& config);

/// Greedy min-max column selection: at each step add the column maximizing the
/// minimum over groups of the accumulated score sum. Ties broken by larger
/// total score sum, then smaller index.
std::vector<int> select_columns(const Matrix& full_basis,
                                const std::vector<TargetMatrix>& targets, int r);

PcaModel fit_standard_pca(const GroupedDataset& data, int r);

Matrix transform(const ProjectionMatrix& projection, const Matrix& X);

/// Brute-force min-max verification: enumerate all C(d, r) column subsets of
/// the candidate basis and return the one minimizing the max group loss.
/// Test/certification path only; guarded to d <= 12.
struct MinMaxOracleResult {
  std::vector<int> subset;
  std::vector<double> losses;
  double max_loss = 0.0;
};
MinMaxOracleResult minmax_loss_oracle(const GroupedDataset& data, int r,
                                      const JevdConfig& config);
MinMaxOracleResult minmax_loss_oracle_on_basis(const Matrix& full_basis,
                                               const std::vector<TargetMatrix>& targets,
                                               int r);

// --- model persistence (JSON) ---

struct SavedModel {
  std::string method;  // "jevd" or "pca"
  int d = 0;
  int r = 0;
  Matrix projection;
  Vector column_means;
  Vector column_scales;
  std::vector<int> selected_columns;   // jevd only
  std::vector<double> per_group_losses;  // jevd only
  std::string status;
  std::string config_json;         // fit configuration echo
  std::string dataset_config_json; // optional, config used at fit time
};

void save_model(const std::string& path, const FairPcaModel& model,
                const std::string& dataset_config_json = "");
void save_model(const std::string& path, const PcaModel& model,
                const std::string& dataset_config_json = "");
SavedModel load_model(const std::string& path);

}  // namespace fairdim
