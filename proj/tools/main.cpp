#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairdim/dataio.hpp"
#include "fairdim/fairpca.hpp"
#include "fairdim/jevd.hpp"
#include "fairdim/metrics.hpp"
#include "fairdim/synth.hpp"

namespace {

using namespace fairdim;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct FitOptions {
  std::string data_path;
  std::string config_path;
  int rank = 1;
  std::string method = "jevd";
  int max_iter = 500;
  double tol = 1e-12;
  std::string out_path;
  bool standardize = false;
};

struct LoadedData {
  GroupedDataset data;
  std::string config_json;
};

LoadedData load_from_options(const std::string& data_path, const std::string& config_path,
                             bool standardize_flag) {
  DatasetConfig cfg;
  std::string cfg_json;
  if (!config_path.empty()) {
    cfg_json = read_file(config_path);
    cfg = parse_dataset_config(cfg_json);
  } else {
    // Default shape of cmd_synth fixtures: numeric features plus a "group" column.
    cfg.sensitive_column = "group";
    cfg_json = "{\"sensitive_column\":\"group\"}";
  }
  if (cfg.path.empty() || !data_path.empty()) cfg.path = data_path;
  if (standardize_flag) cfg.standardize = true;
  return {load_dataset(cfg), cfg_json};
}

JevdConfig jevd_config_from(int max_iter, double tol) {
  JevdConfig config;
  config.max_iterations = max_iter;
  config.objective_tolerance = tol;
  return config;
}

int run_fit(const FitOptions& opt) {
  if (opt.method != "jevd" && opt.method != "pca")
    throw std::runtime_error("unknown method: " + opt.method);
  LoadedData loaded = load_from_options(opt.data_path, opt.config_path, opt.standardize);
  const GroupedDataset& data = loaded.data;
  if (opt.method == "jevd") {
    if (opt.rank < 1 || opt.rank >= data.d())
      throw std::runtime_error("rank must satisfy 1 <= r < d");
    FairPcaModel model;
    try {
      model = fit_fair_pca(data, opt.rank, jevd_config_from(opt.max_iter, opt.tol));
    } catch (const JevdAbort& e) {
      std::cerr << "solver abort: " << e.what() << "\n";
      return 2;
    }
    save_model(opt.out_path, model, loaded.config_json);
    const auto [lo, hi] = std::minmax_element(model.per_group_losses.begin(),
                                              model.per_group_losses.end());
    std::cout << "jevd fit: status=" << to_string(model.status)
              << " objective=" << fmt(model.final_objective)
              << " loss_gap=" << fmt(*hi - *lo) << "\n";
  } else {
    if (opt.rank < 1 || opt.rank > data.d())
      throw std::runtime_error("rank must satisfy 1 <= r <= d");
    PcaModel model = fit_standard_pca(data, opt.rank);
    save_model(opt.out_path, model, loaded.config_json);
    std::cout << "pca fit: eigenvalues=[";
    for (Eigen::Index i = 0; i < model.explained_spectrum.size(); ++i) {
      if (i) std::cout << ',';
      std::cout << fmt(model.explained_spectrum[i]);
    }
    std::cout << "]\n";
  }
  return 0;
}

int run_eval(const std::string& data_path, const std::string& config_path,
             const std::string& model_path, const std::string& out_path,
             const std::string& format) {
  SavedModel saved = load_model(model_path);
  std::string cfg_path = config_path;
  DatasetConfig cfg;
  if (!cfg_path.empty()) {
    cfg = load_dataset_config(cfg_path);
  } else if (!saved.dataset_config_json.empty()) {
    cfg = parse_dataset_config(saved.dataset_config_json);
  } else {
    cfg.sensitive_column = "group";
  }
  cfg.path = data_path;
  GroupedDataset data = load_dataset(cfg);
  if (data.d() != saved.d)
    throw std::runtime_error("model dimension " + std::to_string(saved.d) +
                             " does not match data dimension " + std::to_string(data.d()));
  ProjectionMatrix proj{saved.projection, saved.r};
  EvaluationReport report = evaluate(data, proj, saved.method);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + out_path);
  if (format == "json") {
    out << report_to_json(report) << "\n";
  } else if (format == "csv") {
    out << report_csv_header(data.num_groups()) << "\n"
        << report_csv_row(report) << "\n";
  } else {
    throw std::runtime_error("unknown format: " + format);
  }
  std::cout << "eval: method=" << report.method_name << " rank=" << report.rank
            << " re=" << fmt(report.reconstruction_error_total)
            << " ve=" << fmt(report.variance_explained)
            << " mmd2=" << fmt(report.mmd_squared) << "\n";
  return 0;
}

std::vector<int> parse_ranks(const std::string& text, int d) {
  std::vector<int> ranks;
  if (text.empty()) {
    for (int r = 1; r < d; ++r) ranks.push_back(r);
    return ranks;
  }
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    for (int r = lo; r <= hi; ++r) ranks.push_back(r);
  } else {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) ranks.push_back(std::stoi(tok));
  }
  if (ranks.empty()) throw std::runtime_error("empty rank list");
  for (std::size_t i = 1; i < ranks.size(); ++i)
    if (ranks[i] <= ranks[i - 1]) throw std::runtime_error("ranks must be strictly increasing");
  for (int r : ranks)
    if (r < 1 || r >= d) throw std::runtime_error("rank must satisfy 1 <= r < d");
  return ranks;
}

int run_benchmark(const std::string& data_path, const std::string& config_path,
                  const std::string& ranks_text, const std::string& methods_text,
                  const std::string& out_dir, int max_iter, double tol,
                  bool standardize) {
  LoadedData loaded = load_from_options(data_path, config_path, standardize);
  const GroupedDataset& data = loaded.data;
  const std::vector<int> ranks = parse_ranks(ranks_text, data.d());

  std::vector<std::string> methods;
  {
    std::stringstream ss(methods_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) methods.push_back(tok);
  }
  for (const auto& m : methods)
    if (m != "jevd" && m != "pca") throw std::runtime_error("unknown method: " + m);

  // method -> rank -> report
  std::vector<std::vector<EvaluationReport>> reports(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    if (methods[mi] == "jevd") {
      std::vector<FairPcaModel> models;
      try {
        models = fit_fair_pca_sweep(data, ranks, jevd_config_from(max_iter, tol));
      } catch (const JevdAbort& e) {
        std::cerr << "solver abort: " << e.what() << "\n";
        return 2;
      }
      for (const auto& model : models)
        reports[mi].push_back(evaluate(data, model.projection, "jevd"));
    } else {
      for (int r : ranks) {
        PcaModel model = fit_standard_pca(data, r);
        reports[mi].push_back(evaluate(data, model.projection, "pca"));
      }
    }
  }

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string dataset_name = fs::path(data_path).stem().string();

  struct MetricSpec {
    const char* file;
    const char* name;
    double EvaluationReport::* field;
  };
  const MetricSpec metric_specs[] = {
      {"re.csv", "re", &EvaluationReport::reconstruction_error_total},
      {"ve.csv", "ve", &EvaluationReport::variance_explained},
      {"mmd2.csv", "mmd2", &EvaluationReport::mmd_squared},
      {"loss_gap.csv", "loss_gap", &EvaluationReport::loss_gap},
  };

  for (const auto& spec : metric_specs) {
    std::ofstream out(fs::path(out_dir) / spec.file, std::ios::binary);
    out << "rank";
    for (const auto& m : methods) out << ',' << m;
    out << '\n';
    for (std::size_t ri = 0; ri < ranks.size(); ++ri) {
      out << ranks[ri];
      for (std::size_t mi = 0; mi < methods.size(); ++mi)
        out << ',' << fmt(reports[mi][ri].*(spec.field));
      out << '\n';
    }
  }

  {
    std::ofstream out(fs::path(out_dir) / "long.csv", std::ios::binary);
    out << "dataset,method,rank,metric,value\n";
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
      for (std::size_t ri = 0; ri < ranks.size(); ++ri)
        for (const auto& spec : metric_specs)
          out << dataset_name << ',' << methods[mi] << ',' << ranks[ri] << ','
              << spec.name << ',' << fmt(reports[mi][ri].*(spec.field)) << '\n';
  }

  {
    std::ofstream out(fs::path(out_dir) / "combined.json", std::ios::binary);
    out << "{\"dataset\":\"" << dataset_name << "\",\"reports\":[";
    bool first = true;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      for (const auto& report : reports[mi]) {
        if (!first) out << ',';
        out << report_to_json(report);
        first = false;
      }
    }
    out << "]}\n";
  }

  std::cout << "benchmark: dataset=" << dataset_name << " ranks=" << ranks.size()
            << " methods=" << methods.size() << " out=" << out_dir << "\n";
  return 0;
}

std::vector<Vector> parse_spectra(const std::string& text) {
  std::vector<Vector> spectra;
  std::stringstream groups(text);
  std::string group_tok;
  while (std::getline(groups, group_tok, ';')) {
    std::vector<double> vals;
    std::stringstream ss(group_tok);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    Vector v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
    spectra.push_back(std::move(v));
  }
  return spectra;
}

int run_synth(const std::string& kind, int dim, int groups, const std::string& spectra_text,
              double noise, std::uint64_t seed, int n_per_group, bool shared_basis,
              const std::string& out_path) {
  std::vector<Vector> spectra;
  if (!spectra_text.empty()) {
    spectra = parse_spectra(spectra_text);
    if (dim == 0 && !spectra.empty()) dim = static_cast<int>(spectra.front().size());
  } else {
    // Deterministic default: decaying spectrum, rotated per group so the
    // diagonal-difference rows stay distinct.
    if (dim < 2) throw std::runtime_error("--dim must be >= 2");
    for (int s = 0; s < groups; ++s) {
      Vector v(dim);
      for (int j = 0; j < dim; ++j) v[j] = static_cast<double>(((j + s) % dim) + 1);
      spectra.push_back(std::move(v));
    }
  }
  if (static_cast<int>(spectra.size()) < 2)
    throw std::runtime_error("need at least 2 groups");

  Matrix raw;
  std::vector<int> labels;
  Matrix planted;
  if (kind == "commuting") {
    CommutingFamilySpec spec;
    spec.dimension = dim;
    spec.spectra = spectra;
    spec.noise_level = noise;
    spec.seed = seed;
    std::tie(raw, labels) = realize_commuting_dataset(spec);
    std::mt19937_64 rng(seed);
    planted = random_orthonormal(dim, rng);
  } else if (kind == "gaussian") {
    std::tie(raw, labels) =
        sample_grouped_gaussian(dim, spectra, shared_basis, n_per_group, seed);
    std::mt19937_64 rng(seed);
    planted = random_orthonormal(dim, rng);
  } else {
    throw std::runtime_error("unknown kind: " + kind);
  }

  CsvTable table;
  for (int j = 0; j < dim; ++j) table.header.push_back("f" + std::to_string(j));
  table.header.push_back("group");
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    std::vector<std::string> row;
    for (int j = 0; j < dim; ++j) row.push_back(fmt(raw(i, j)));
    row.push_back(std::to_string(labels[static_cast<std::size_t>(i)]));
    table.rows.push_back(std::move(row));
  }
  write_csv(out_path, table);

  std::ofstream truth(out_path + ".truth.json", std::ios::binary);
  truth << "{\"kind\":\"" << kind << "\",\"dimension\":" << dim
        << ",\"seed\":" << seed << ",\"noise_level\":" << fmt(noise)
        << ",\"shared_basis\":" << (shared_basis || kind == "commuting" ? "true" : "false")
        << ",\"spectra\":[";
  for (std::size_t s = 0; s < spectra.size(); ++s) {
    if (s) truth << ',';
    truth << '[';
    for (Eigen::Index j = 0; j < spectra[s].size(); ++j) {
      if (j) truth << ',';
      truth << fmt(spectra[s][j]);
    }
    truth << ']';
  }
  truth << "],\"planted_basis_colmajor\":[";
  bool first = true;
  for (int j = 0; j < dim; ++j) {
    for (int i = 0; i < dim; ++i) {
      if (!first) truth << ',';
      truth << fmt(planted(i, j));
      first = false;
    }
  }
  truth << "]}\n";

  std::cout << "synth: kind=" << kind << " rows=" << raw.rows() << " d=" << dim
            << " out=" << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair dimensionality reduction via joint eigenvalue decomposition"};
  app.require_subcommand(1);

  FitOptions fit;
  auto* cmd_fit = app.add_subcommand("fit", "Fit a projection model");
  cmd_fit->add_option("--data", fit.data_path, "Input CSV")->required();
  cmd_fit->add_option("--config", fit.config_path, "Dataset config JSON");
  cmd_fit->add_option("--rank", fit.rank, "Projection rank r")->required();
  cmd_fit->add_option("--method", fit.method, "jevd or pca");
  cmd_fit->add_option("--max-iter", fit.max_iter, "Solver iteration cap");
  cmd_fit->add_option("--tol", fit.tol, "Relative objective tolerance");
  cmd_fit->add_option("--out", fit.out_path, "Output model JSON")->required();
  cmd_fit->add_flag("--standardize", fit.standardize, "Standardize features");

  std::string eval_data, eval_config, eval_model, eval_out, eval_format = "json";
  auto* cmd_eval = app.add_subcommand("eval", "Evaluate a model on a dataset");
  cmd_eval->add_option("--data", eval_data, "Input CSV")->required();
  cmd_eval->add_option("--config", eval_config, "Dataset config JSON");
  cmd_eval->add_option("--model", eval_model, "Model JSON")->required();
  cmd_eval->add_option("--out", eval_out, "Output report path")->required();
  cmd_eval->add_option("--format", eval_format, "json or csv");

  std::string bm_data, bm_config, bm_ranks, bm_methods = "jevd,pca", bm_out;
  int bm_max_iter = 500;
  double bm_tol = 1e-12;
  bool bm_standardize = false;
  auto* cmd_bm = app.add_subcommand("benchmark", "Rank sweep over methods");
  cmd_bm->add_option("--data", bm_data, "Input CSV")->required();
  cmd_bm->add_option("--config", bm_config, "Dataset config JSON");
  cmd_bm->add_option("--ranks", bm_ranks, "Comma list or lo..hi (default 1..d-1)");
  cmd_bm->add_option("--methods", bm_methods, "Comma list from {jevd,pca}");
  cmd_bm->add_option("--out-dir", bm_out, "Output directory")->required();
  cmd_bm->add_option("--max-iter", bm_max_iter, "Solver iteration cap");
  cmd_bm->add_option("--tol", bm_tol, "Relative objective tolerance");
  cmd_bm->add_flag("--standardize", bm_standardize, "Standardize features");

  std::string sy_kind, sy_spectra, sy_out;
  int sy_dim = 0, sy_groups = 2, sy_n = 100;
  double sy_noise = 0.0;
  std::uint64_t sy_seed = 0;
  bool sy_shared = false;
  auto* cmd_sy = app.add_subcommand("synth", "Generate a synthetic fixture CSV");
  cmd_sy->add_option("--kind", sy_kind, "commuting or gaussian")->required();
  cmd_sy->add_option("--dim", sy_dim, "Feature dimension");
  cmd_sy->add_option("--groups", sy_groups, "Number of groups");
  cmd_sy->add_option("--spectra", sy_spectra,
                     "Per-group spectra, e.g. \"3,2,1;1,2,3\"");
  cmd_sy->add_option("--noise", sy_noise, "Symmetric perturbation level");
  cmd_sy->add_option("--seed", sy_seed, "RNG seed");
  cmd_sy->add_option("--n-per-group", sy_n, "Rows per group (gaussian)");
  cmd_sy->add_flag("--shared-basis", sy_shared, "Same basis for all groups");
  cmd_sy->add_option("--out", sy_out, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_fit->parsed()) return run_fit(fit);
    if (cmd_eval->parsed())
      return run_eval(eval_data, eval_config, eval_model, eval_out, eval_format);
    if (cmd_bm->parsed())
      return run_benchmark(bm_data, bm_config, bm_ranks, bm_methods, bm_out,
                           bm_max_iter, bm_tol, bm_standardize);
    if (cmd_sy->parsed())
      return run_synth(sy_kind, sy_dim, sy_groups, sy_spectra, sy_noise, sy_seed,
                       sy_n, sy_shared, sy_out);
  } catch (const fairdim::JevdAbort& e) {
    std::cerr << "solver abort: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
