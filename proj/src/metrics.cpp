#include "fairdim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace fairdim {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double column_variance_sum(const Matrix& A) {
  double total = 0.0;
  const double n = static_cast<double>(A.rows());
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    double mean = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) mean += A(i, j);
    mean /= n;
    double var = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const double diff = A(i, j) - mean;
      var += diff * diff;
    }
    total += var / n;
  }
  return total;
}

}  // namespace

double variance_explained(const Matrix& X, const ProjectionMatrix& U) {
  require_orthonormal(U.columns);
  if (X.cols() != U.columns.rows())
    throw std::invalid_argument("dimension mismatch between data and projection");
  const double var_x = column_variance_sum(X);
  if (var_x == 0.0) throw std::invalid_argument("data has zero variance");
  return column_variance_sum(X * U.columns) / var_x;
}

double mmd_squared(const Matrix& X, const std::vector<int>& labels,
                   const ProjectionMatrix& U) {
  if (static_cast<Eigen::Index>(labels.size()) != X.rows())
    throw std::invalid_argument("label count does not match row count");
  int K = 0;
  for (int lab : labels) K = std::max(K, lab + 1);
  if (K < 2) throw std::invalid_argument("need at least 2 groups");

  const Matrix proj = X * U.columns;
  std::vector<Vector> means(static_cast<std::size_t>(K),
                            Vector::Zero(U.columns.cols()));
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (Eigen::Index i = 0; i < proj.rows(); ++i) {
    means[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] +=
        proj.row(i).transpose();
    counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])]++;
  }
  for (int s = 0; s < K; ++s) {
    if (counts[static_cast<std::size_t>(s)] == 0)
      throw std::invalid_argument("empty group " + std::to_string(s));
    means[static_cast<std::size_t>(s)] /= static_cast<double>(counts[static_cast<std::size_t>(s)]);
  }
  double worst = 0.0;
  for (int a = 0; a < K; ++a)
    for (int b = a + 1; b < K; ++b)
      worst = std::max(worst, (means[static_cast<std::size_t>(a)] -
                               means[static_cast<std::size_t>(b)])
                                  .squaredNorm());
  return worst;
}

EvaluationReport evaluate(const GroupedDataset& data, const ProjectionMatrix& U,
                          const std::string& method_name) {
  if (data.d() != U.columns.rows())
    throw std::invalid_argument("model dimension does not match data");
  EvaluationReport report;
  report.rank = U.rank;
  report.method_name = method_name;
  report.reconstruction_error_total = reconstruction_error(data.features, U);
  report.variance_explained = variance_explained(data.features, U);
  report.mmd_squared = mmd_squared(data.features, data.group_labels, U);

  const auto groups = split_groups(data);
  report.per_group_errors.reserve(groups.size());
  report.per_group_losses.reserve(groups.size());
  for (const auto& Xs : groups) {
    report.per_group_errors.push_back(reconstruction_error(Xs, U));
    report.per_group_losses.push_back(reconstruction_loss(Xs, U));
  }
  const auto [lo, hi] = std::minmax_element(report.per_group_losses.begin(),
                                            report.per_group_losses.end());
  report.loss_gap = *hi - *lo;
  return report;
}

std::string report_to_json(const EvaluationReport& r) {
  std::ostringstream out;
  out << "{\"method\":\"" << r.method_name << "\",\"rank\":" << r.rank
      << ",\"reconstruction_error_total\":" << fmt(r.reconstruction_error_total)
      << ",\"variance_explained\":" << fmt(r.variance_explained)
      << ",\"mmd_squared\":" << fmt(r.mmd_squared)
      << ",\"loss_gap\":" << fmt(r.loss_gap) << ",\"per_group_errors\":[";
  for (std::size_t i = 0; i < r.per_group_errors.size(); ++i) {
    if (i) out << ',';
    out << fmt(r.per_group_errors[i]);
  }
  out << "],\"per_group_losses\":[";
  for (std::size_t i = 0; i < r.per_group_losses.size(); ++i) {
    if (i) out << ',';
    out << fmt(r.per_group_losses[i]);
  }
  out << "]}";
  return out.str();
}

std::string report_csv_header(int num_groups) {
  std::ostringstream out;
  out << "method,rank,re_total,ve,mmd2,loss_gap";
  for (int s = 0; s < num_groups; ++s) out << ",err_g" << s;
  for (int s = 0; s < num_groups; ++s) out << ",loss_g" << s;
  return out.str();
}

std::string report_csv_row(const EvaluationReport& r) {
  std::ostringstream out;
  out << r.method_name << ',' << r.rank << ',' << fmt(r.reconstruction_error_total)
      << ',' << fmt(r.variance_explained) << ',' << fmt(r.mmd_squared) << ','
      << fmt(r.loss_gap);
  for (double v : r.per_group_errors) out << ',' << fmt(v);
  for (double v : r.per_group_losses) out << ',' << fmt(v);
  return out.str();
}

}  // namespace fairdim
