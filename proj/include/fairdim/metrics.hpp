#pragma once

#include <string>
#include <vector>

#include "fairdim/dataio.hpp"
#include "fairdim/spectra.hpp"

namespace fairdim {

struct EvaluationReport {
  int rank = 0;
  std::string method_name;
  double reconstruction_error_total = 0.0;
  double variance_explained = 0.0;
  double mmd_squared = 0.0;  // pairwise max when K > 2
  std::vector<double> per_group_errors;
  std::vector<double> per_group_losses;
  double loss_gap = 0.0;  // max_s L_s - min_s L_s
};

/// Var(XU)/Var(X), population convention (divide by n), Var(.) summed over columns.
double variance_explained(const Matrix& X, const ProjectionMatrix& U);

/// Squared distance between group mean rows in the projected space.
/// K > 2 reports the pairwise maximum.
double mmd_squared(const Matrix& X, const std::vector<int>& labels,
                   const ProjectionMatrix& U);

EvaluationReport evaluate(const GroupedDataset& data, const ProjectionMatrix& U,
                          const std::string& method_name);

std::string report_to_json(const EvaluationReport& report);
std::string report_csv_header(int num_groups);
std::string report_csv_row(const EvaluationReport& report);

}  // namespace fairdim
