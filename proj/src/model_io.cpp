#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairdim/fairpca.hpp"

namespace fairdim {

namespace {

// Decimal with 17 significant digits so the stored value reparses to the
// exact same double.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_vector(std::ostream& out, const Vector& v) {
  out << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    out << fmt(v[i]);
  }
  out << ']';
}

void write_matrix_colmajor(std::ostream& out, const Matrix& m) {
  out << '[';
  bool first = true;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!first) out << ',';
      out << fmt(m(i, j));
      first = false;
    }
  }
  out << ']';
}

std::string config_to_json(const JevdConfig& c) {
  std::ostringstream out;
  out << "{\"max_iterations\":" << c.max_iterations
      << ",\"objective_tolerance\":" << fmt(c.objective_tolerance)
      << ",\"tolerance_is_relative\":" << (c.tolerance_is_relative ? "true" : "false")
      << ",\"stall_tolerance\":" << fmt(c.stall_tolerance)
      << ",\"degenerate_denominator_floor\":" << fmt(c.degenerate_denominator_floor)
      << "}";
  return out.str();
}

void write_common(std::ostream& out, const std::string& method, int d, int r,
                  const Matrix& projection, const Vector& means, const Vector& scales) {
  out << "{\"method\":\"" << method << "\",\"d\":" << d << ",\"r\":" << r
      << ",\"projection\":";
  write_matrix_colmajor(out, projection);
  out << ",\"column_means\":";
  write_vector(out, means);
  out << ",\"column_scales\":";
  write_vector(out, scales);
}

void open_file(std::ofstream& out, const std::string& path) {
  out.open(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
}

}  // namespace

void save_model(const std::string& path, const FairPcaModel& model,
                const std::string& dataset_config_json) {
  std::ofstream out;
  open_file(out, path);
  write_common(out, "jevd", static_cast<int>(model.full_basis.rows()), model.rank,
               model.projection.columns, model.column_means, model.column_scales);
  out << ",\"selected_columns\":[";
  for (std::size_t i = 0; i < model.selected_columns.size(); ++i) {
    if (i) out << ',';
    out << model.selected_columns[i];
  }
  out << "],\"per_group_losses\":[";
  for (std::size_t i = 0; i < model.per_group_losses.size(); ++i) {
    if (i) out << ',';
    out << fmt(model.per_group_losses[i]);
  }
  out << "],\"status\":\"" << to_string(model.status) << "\""
      << ",\"final_objective\":" << fmt(model.final_objective)
      << ",\"orthonormality_defect\":" << fmt(model.orthonormality_defect)
      << ",\"iterations\":" << model.iterations
      << ",\"config\":" << config_to_json(model.fit_config);
  if (!dataset_config_json.empty()) out << ",\"dataset_config\":" << dataset_config_json;
  out << "}\n";
}

void save_model(const std::string& path, const PcaModel& model,
                const std::string& dataset_config_json) {
  std::ofstream out;
  open_file(out, path);
  write_common(out, "pca", static_cast<int>(model.projection.columns.rows()),
               model.projection.rank, model.projection.columns, model.column_means,
               model.column_scales);
  out << ",\"explained_spectrum\":";
  write_vector(out, model.explained_spectrum);
  out << ",\"status\":\"converged\"";
  if (!dataset_config_json.empty()) out << ",\"dataset_config\":" << dataset_config_json;
  out << "}\n";
}

SavedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  nlohmann::json j;
  in >> j;

  SavedModel m;
  m.method = j.at("method").get<std::string>();
  m.d = j.at("d").get<int>();
  m.r = j.at("r").get<int>();
  const auto proj = j.at("projection").get<std::vector<double>>();
  if (static_cast<int>(proj.size()) != m.d * m.r)
    throw std::runtime_error("projection entry count mismatch in " + path);
  m.projection.resize(m.d, m.r);
  for (int col = 0; col < m.r; ++col)
    for (int row = 0; row < m.d; ++row)
      m.projection(row, col) = proj[static_cast<std::size_t>(col * m.d + row)];
  const auto means = j.at("column_means").get<std::vector<double>>();
  const auto scales = j.at("column_scales").get<std::vector<double>>();
  m.column_means = Eigen::Map<const Vector>(means.data(), static_cast<Eigen::Index>(means.size()));
  m.column_scales = Eigen::Map<const Vector>(scales.data(), static_cast<Eigen::Index>(scales.size()));
  if (j.contains("selected_columns"))
    m.selected_columns = j.at("selected_columns").get<std::vector<int>>();
  if (j.contains("per_group_losses"))
    m.per_group_losses = j.at("per_group_losses").get<std::vector<double>>();
  m.status = j.value("status", "");
  if (j.contains("config")) m.config_json = j.at("config").dump();
  if (j.contains("dataset_config")) m.dataset_config_json = j.at("dataset_config").dump();
  return m;
}

}  // namespace fairdim
