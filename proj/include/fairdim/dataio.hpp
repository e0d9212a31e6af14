#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fairdim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class MissingPolicy { Error, DropRow };
enum class ColumnEncoding { Numeric, OneHot };

/// How to turn a CSV file into a grouped feature matrix.
/// Columns absent from `encoding` are treated as numeric.
struct DatasetConfig {
  std::string path;
  std::string sensitive_column;
  std::vector<std::string> drop_columns;
  bool standardize = false;
  std::map<std::string, ColumnEncoding> encoding;
  MissingPolicy missing_policy = MissingPolicy::Error;
};

DatasetConfig parse_dataset_config(const std::string& json_text);
DatasetConfig load_dataset_config(const std::string& config_path);

/// Centered (optionally standardized) feature matrix plus a row partition
/// into K sensitive groups. Group labels follow the sorted distinct values
/// of the sensitive column; row order within groups follows file order.
struct GroupedDataset {
  Matrix features;                 // n x d
  std::vector<int> group_labels;   // size n, values in [0, K)
  std::vector<int> group_sizes;    // size K
  Vector column_means;             // length d, subtracted from raw features
  Vector column_scales;            // length d, all 1 when standardize=false
  std::vector<std::string> feature_names;
  std::vector<std::string> group_names;

  int n() const { return static_cast<int>(features.rows()); }
  int d() const { return static_cast<int>(features.cols()); }
  int num_groups() const { return static_cast<int>(group_sizes.size()); }
};

// Raw CSV access (RFC-4180-style: quoted fields, "" escapes, CRLF tolerated).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

GroupedDataset load_dataset(const DatasetConfig& config);

/// Build a GroupedDataset from an in-memory raw matrix and labels,
/// applying the same centering/standardization as load_dataset.
GroupedDataset make_grouped(const Matrix& raw, const std::vector<int>& labels,
                            bool standardize = false);

/// Row partition by group label, preserving within-group row order.
std::vector<Matrix> split_groups(const GroupedDataset& data);

}  // namespace fairdim
