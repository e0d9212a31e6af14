#include "fairdim/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fairdim {

namespace {

std::vector<std::string> parse_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    auto fields = parse_csv_record(line);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size())
        throw std::runtime_error("csv row has " + std::to_string(fields.size()) +
                                 " fields, expected " + std::to_string(table.header.size()) +
                                 " in " + path);
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) throw std::runtime_error("empty csv file: " + path);
  return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j) out << ',';
    out << csv_escape(table.header[j]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << csv_escape(row[j]);
    }
    out << '\n';
  }
}

DatasetConfig parse_dataset_config(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  DatasetConfig cfg;
  cfg.path = j.value("path", "");
  if (!j.contains("sensitive_column"))
    throw std::runtime_error("dataset config missing 'sensitive_column'");
  cfg.sensitive_column = j.at("sensitive_column").get<std::string>();
  if (j.contains("drop_columns"))
    cfg.drop_columns = j.at("drop_columns").get<std::vector<std::string>>();
  cfg.standardize = j.value("standardize", false);
  if (j.contains("encoding")) {
    for (auto& [col, enc] : j.at("encoding").items()) {
      const std::string e = enc.get<std::string>();
      if (e == "numeric") cfg.encoding[col] = ColumnEncoding::Numeric;
      else if (e == "one-hot") cfg.encoding[col] = ColumnEncoding::OneHot;
      else throw std::runtime_error("unknown encoding '" + e + "' for column " + col);
    }
  }
  const std::string mp = j.value("missing_policy", "error");
  if (mp == "error") cfg.missing_policy = MissingPolicy::Error;
  else if (mp == "drop-row") cfg.missing_policy = MissingPolicy::DropRow;
  else throw std::runtime_error("unknown missing_policy: " + mp);
  return cfg;
}

DatasetConfig load_dataset_config(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config: " + config_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dataset_config(ss.str());
}

namespace {

struct Centered {
  Matrix features;
  Vector means;
  Vector scales;
};

Centered center_and_scale(const Matrix& raw, bool standardize,
                          const std::vector<std::string>& names) {
  const auto n = raw.rows();
  const auto d = raw.cols();
  Centered out;
  out.means = raw.colwise().mean();
  out.features = raw.rowwise() - out.means.transpose();
  out.scales = Vector::Ones(d);
  if (standardize) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double var = out.features.col(j).squaredNorm() / static_cast<double>(n);
      if (var <= 0.0) {
        const std::string name = j < static_cast<Eigen::Index>(names.size())
                                     ? names[static_cast<std::size_t>(j)]
                                     : std::to_string(j);
        throw std::runtime_error("zero-variance column: " + name);
      }
      out.scales[j] = std::sqrt(var);
      out.features.col(j) /= out.scales[j];
    }
  }
  return out;
}

}  // namespace

GroupedDataset load_dataset(const DatasetConfig& config) {
  CsvTable table = read_csv(config.path);

  auto col_index = [&](const std::string& name) -> int {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end())
      throw std::runtime_error("unknown column: " + name);
    return static_cast<int>(it - table.header.begin());
  };

  const int sens_idx = col_index(config.sensitive_column);
  std::set<int> dropped{sens_idx};
  for (const auto& name : config.drop_columns) dropped.insert(col_index(name));

  // Drop rows with missing cells under drop-row; error otherwise.
  std::vector<const std::vector<std::string>*> rows;
  for (const auto& row : table.rows) {
    bool missing = false;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (dropped.count(static_cast<int>(j)) && static_cast<int>(j) != sens_idx) continue;
      if (row[j].empty()) { missing = true; break; }
    }
    if (missing) {
      if (config.missing_policy == MissingPolicy::Error)
        throw std::runtime_error("missing value in column of row " +
                                 std::to_string(&row - table.rows.data() + 2));
      continue;
    }
    rows.push_back(&row);
  }
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw std::runtime_error("no usable rows in " + config.path);

  // Group labels from sorted distinct sensitive values.
  std::set<std::string> distinct;
  for (const auto* row : rows) distinct.insert((*row)[sens_idx]);
  std::vector<std::string> group_names(distinct.begin(), distinct.end());
  if (group_names.size() < 2)
    throw std::runtime_error("sensitive column '" + config.sensitive_column +
                             "' has fewer than 2 distinct values");
  auto group_of = [&](const std::string& v) {
    return static_cast<int>(std::lower_bound(group_names.begin(), group_names.end(), v) -
                            group_names.begin());
  };

  // Encode feature columns in header order; one-hot uses sorted categories.
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> columns;  // encoded column-major
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (dropped.count(static_cast<int>(j))) continue;
    const std::string& name = table.header[j];
    ColumnEncoding enc = ColumnEncoding::Numeric;
    if (auto it = config.encoding.find(name); it != config.encoding.end()) enc = it->second;
    if (enc == ColumnEncoding::Numeric) {
      std::vector<double> col(n);
      for (int i = 0; i < n; ++i) {
        const std::string& cell = (*rows[i])[j];
        if (!parse_double(cell, col[i]))
          throw std::runtime_error("non-numeric cell '" + cell + "' in column " + name);
      }
      feature_names.push_back(name);
      columns.push_back(std::move(col));
    } else {
      std::set<std::string> cats;
      for (int i = 0; i < n; ++i) cats.insert((*rows[i])[j]);
      for (const auto& cat : cats) {
        std::vector<double> col(n);
        for (int i = 0; i < n; ++i) col[i] = ((*rows[i])[j] == cat) ? 1.0 : 0.0;
        feature_names.push_back(name + "=" + cat);
        columns.push_back(std::move(col));
      }
    }
  }
  const int d = static_cast<int>(columns.size());
  if (d == 0) throw std::runtime_error("no feature columns left after drops");

  Matrix raw(n, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < n; ++i) raw(i, j) = columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = group_of((*rows[static_cast<std::size_t>(i)])[sens_idx]);

  Centered c = center_and_scale(raw, config.standardize, feature_names);

  GroupedDataset data;
  data.features = std::move(c.features);
  data.group_labels = std::move(labels);
  data.group_sizes.assign(group_names.size(), 0);
  for (int lab : data.group_labels) data.group_sizes[static_cast<std::size_t>(lab)]++;
  for (std::size_t s = 0; s < data.group_sizes.size(); ++s) {
    if (data.group_sizes[s] < 2)
      throw std::runtime_error("group '" + group_names[s] + "' has fewer than 2 rows");
  }
  data.column_means = std::move(c.means);
  data.column_scales = std::move(c.scales);
  data.feature_names = std::move(feature_names);
  data.group_names = std::move(group_names);
  return data;
}

GroupedDataset make_grouped(const Matrix& raw, const std::vector<int>& labels,
                            bool standardize) {
  if (static_cast<Eigen::Index>(labels.size()) != raw.rows())
    throw std::runtime_error("label count does not match row count");
  int K = 0;
  for (int lab : labels) {
    if (lab < 0) throw std::runtime_error("negative group label");
    K = std::max(K, lab + 1);
  }
  if (K < 2) throw std::runtime_error("need at least 2 groups");

  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(raw.cols()));
  for (Eigen::Index j = 0; j < raw.cols(); ++j) names.push_back("f" + std::to_string(j));
  Centered c = center_and_scale(raw, standardize, names);

  GroupedDataset data;
  data.features = std::move(c.features);
  data.group_labels = labels;
  data.group_sizes.assign(static_cast<std::size_t>(K), 0);
  for (int lab : labels) data.group_sizes[static_cast<std::size_t>(lab)]++;
  for (int s = 0; s < K; ++s) {
    if (data.group_sizes[static_cast<std::size_t>(s)] < 2)
      throw std::runtime_error("group " + std::to_string(s) + " has fewer than 2 rows");
  }
  data.column_means = std::move(c.means);
  data.column_scales = std::move(c.scales);
  data.feature_names = std::move(names);
  for (int s = 0; s < K; ++s) data.group_names.push_back(std::to_string(s));
  return data;
}

std::vector<Matrix> split_groups(const GroupedDataset& data) {
  const int K = data.num_groups();
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(K));
  for (int s = 0; s < K; ++s) {
    const int ns = data.group_sizes[static_cast<std::size_t>(s)];
    if (ns == 0) throw std::runtime_error("empty group " + std::to_string(s));
    Matrix Xs(ns, data.d());
    int row = 0;
    for (int i = 0; i < data.n(); ++i) {
      if (data.group_labels[static_cast<std::size_t>(i)] == s)
        Xs.row(row++) = data.features.row(i);
    }
    out.push_back(std::move(Xs));
  }
  return out;
}

}  // namespace fairdim
