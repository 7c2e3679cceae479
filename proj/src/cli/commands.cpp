#include "addcomp/cli.hpp"

#include "addcomp/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>

namespace addcomp::cli {

namespace {

namespace fs = std::filesystem;

struct CommandLine {
  std::string config_path;
  std::string data_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_settings_flags(CLI::App& cmd, CommandLine& line) {
  for (const auto& key : known_keys()) {
    line.options[key] = cmd.add_option("--" + key, line.values[key]);
  }
  cmd.add_option("--config", line.config_path, "key=value settings file");
}

Settings merged_settings(const CommandLine& line, const std::string& positional_config) {
  Settings settings;
  const std::string path = !line.config_path.empty() ? line.config_path : positional_config;
  if (!path.empty()) settings = load_config(path);
  for (const auto& [key, opt] : line.options) {
    if (opt->count() > 0) settings[key] = line.values.at(key);
  }
  return settings;
}

std::string get(const Settings& s, const std::string& key, const std::string& fallback) {
  const auto it = s.find(key);
  return it == s.end() ? fallback : it->second;
}

template <class T>
T to_number(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  T v{};
  in >> v;
  if (!in || !in.eof()) throw UsageError("invalid value for " + key + ": '" + text + "'");
  return v;
}

std::vector<VarianceMode> parse_variance(const std::string& text) {
  if (text == "known") return {VarianceMode::known};
  if (text == "estimated") return {VarianceMode::estimated};
  if (text == "both") return {VarianceMode::known, VarianceMode::estimated};
  throw UsageError("variance must be known, estimated or both, got '" + text + "'");
}

double default_C(Family f) { return f == Family::nested ? 1.5 : 4.5; }

ExperimentConfig experiment_from(const Settings& s, const std::string& default_K,
                                 const std::string& default_variance, bool use_grid) {
  ExperimentConfig cfg;
  cfg.n = to_number<int>(get(s, "n", "512"), "n");
  cfg.K_values = parse_int_list(get(s, "K", default_K));
  cfg.s_id = get(s, "s", "f1");
  if (const auto t = get(s, "t", ""); !t.empty() && t != "default") {
    cfg.t_ids.clear();
    std::istringstream in(t);
    for (std::string id; std::getline(in, id, ',');) cfg.t_ids.push_back(id);
  }
  cfg.sigma2 = to_number<double>(get(s, "sigma2", "1"), "sigma2");
  cfg.variance_modes = parse_variance(get(s, "variance", default_variance));
  cfg.collection = parse_family(get(s, "collection", "nested"));
  if (use_grid && s.count("C-grid")) {
    cfg.C_grid = parse_real_list(s.at("C-grid"));
  } else if (s.count("C")) {
    cfg.C_grid = {to_number<double>(s.at("C"), "C")};
  } else {
    cfg.C_grid = use_grid ? default_C_grid() : std::vector<double>{default_C(cfg.collection)};
  }
  cfg.replications = to_number<int>(get(s, "reps", "500"), "reps");
  cfg.seed = to_number<std::uint64_t>(get(s, "seed", "20240101"), "seed");
  cfg.noise = parse_noise(get(s, "noise", "gaussian"));
  cfg.threads = to_number<int>(get(s, "threads", "0"), "threads");
  try {
    cfg.validate();
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

fs::path output_dir(const Settings& s) {
  fs::path dir = get(s, "out", ".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory " + dir.string());
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

int cmd_estimate(const Settings& s, const std::string& data_path, std::ostream& log) {
  if (data_path.empty()) throw UsageError("estimate needs a data file");
  const Family family = parse_family(get(s, "collection", "nested"));
  const double C = to_number<double>(get(s, "C", std::to_string(default_C(family))), "C");
  const auto modes = parse_variance(get(s, "variance", "known"));
  if (modes.size() != 1) throw UsageError("estimate takes --variance known or estimated");
  const double sigma2 = to_number<double>(get(s, "sigma2", "1"), "sigma2");
  if (modes.front() == VarianceMode::known && !(sigma2 > 0.0)) {
    throw UsageError("known variance must be positive");
  }
  const fs::path dir = output_dir(s);

  const Observations obs = read_observations(fs::path(data_path));
  const Fit fit = prepare_fit(obs.design, obs.z, family);
  PenaltySpec spec{family, C, sigma2};
  if (modes.front() == VarianceMode::estimated) spec.sigma2.reset();
  const SelectionOutcome outcome = select(fit.y, fit.collection, spec, fit.projector);

  const HaarBasis E = build_E(obs.design.x, fit.dims.haar_depth);
  const Vec haar_coeffs = E.matrix.colPivHouseholderQr().solve(outcome.estimate);
  const OrthonormalBasis& basis = fit.collection.basis();
  Vec ortho = Vec::Zero(E.size());
  std::vector<bool> selected(static_cast<std::size_t>(E.size()), false);
  for (std::size_t k = 0; k < outcome.chosen.dim(); ++k) {
    const auto src = basis.source[static_cast<std::size_t>(outcome.chosen.members[k])];
    ortho(src) = outcome.coefficients(static_cast<Eigen::Index>(k));
    selected[static_cast<std::size_t>(src)] = true;
  }

  {
    auto out = open_output(dir / "fit.tsv");
    out << std::setprecision(12) << "x\ts_tilde\n";
    for (Eigen::Index i = 0; i < obs.design.n(); ++i) {
      out << obs.design.x(i) << '\t' << outcome.estimate(i) << '\n';
    }
  }
  {
    auto out = open_output(dir / "coefficients.tsv");
    out << std::setprecision(12) << "level\tshift\tselected\torthonormal_coefficient\thaar_coefficient\n";
    for (Eigen::Index k = 0; k < E.size(); ++k) {
      const HaarIndex idx = E.labels[static_cast<std::size_t>(k)];
      out << idx.level << '\t' << idx.shift << '\t' << (selected[static_cast<std::size_t>(k)] ? 1 : 0)
          << '\t' << ortho(k) << '\t' << haar_coeffs(k) << '\n';
    }
  }
  {
    auto out = open_output(dir / "diagnostics.tsv");
    out << std::setprecision(12) << "key\tvalue\n";
    out << "n\t" << obs.design.n() << "\nK\t" << obs.design.components() << '\n';
    out << "d_n\t" << fit.dims.haar_depth << "\nD_n\t" << fit.dims.haar_size << '\n';
    out << "d_n_prime\t" << fit.dims.fourier_order << "\nD_n_prime\t" << fit.dims.parasitic_size << '\n';
    out << "collection\t" << to_string(family) << "\nC\t" << C << '\n';
    out << "variance\t" << to_string(modes.front()) << '\n';
    out << "rho\t" << fit.projector.rho() << "\nrho_sq\t" << fit.projector.rho_sq() << '\n';
    out << "trace_PtP\t" << fit.projector.trace_gram() << '\n';
    out << "sigma2_used\t" << outcome.sigma2_used << '\n';
    out << "criterion\t" << outcome.criterion << '\n';
    out << "chosen_dim\t" << outcome.chosen.dim() << "\nchosen_trace\t" << outcome.chosen_trace << '\n';
  }
  log << "estimate: n=" << obs.design.n() << " K=" << obs.design.components()
      << " chosen_dim=" << outcome.chosen.dim() << " rho=" << fit.projector.rho() << " -> "
      << dir.string() << '\n';
  return kOk;
}

int cmd_simulate(const Settings& s, std::ostream& log) {
  const ExperimentConfig cfg = experiment_from(s, "1-6", "both", true);
  const fs::path dir = output_dir(s);
  const RatioReport report = run_ratio_experiment(cfg);
  for (VarianceMode mode : cfg.variance_modes) {
    const std::string stem =
        "ratio_" + cfg.s_id + "_" + to_string(cfg.collection) + "_" + to_string(mode);
    auto table = open_output(dir / (stem + ".tsv"));
    write_ratio_table(report, mode, table);
    auto matrix = open_output(dir / (stem + ".matrix.tsv"));
    write_ratio_matrix(report, mode, matrix);
    log << "simulate: wrote " << (dir / (stem + ".tsv")).string() << '\n';
  }
  return kOk;
}

int cmd_compare_zero(const Settings& s, std::ostream& log) {
  ExperimentConfig cfg = experiment_from(s, "1-9", "known", true);
  if (cfg.variance_modes.size() != 1 || cfg.variance_modes.front() != VarianceMode::known) {
    throw UsageError("compare-zero runs with known variance only");
  }
  if (cfg.collection != Family::nested) throw UsageError("compare-zero uses the nested collection");
  const fs::path dir = output_dir(s);
  const RatioReport report = run_zero_parasitic_comparison(cfg);
  const std::string stem = "compare_zero_" + cfg.s_id;
  auto table = open_output(dir / (stem + ".tsv"));
  write_ratio_table(report, VarianceMode::known, table);
  auto matrix = open_output(dir / (stem + ".matrix.tsv"));
  write_ratio_matrix(report, VarianceMode::known, matrix);
  log << "compare-zero: wrote " << (dir / (stem + ".tsv")).string() << '\n';
  return kOk;
}

int cmd_figure(const Settings& s, std::ostream& log) {
  const ExperimentConfig cfg = experiment_from(s, "6", "known", false);
  const fs::path dir = output_dir(s);
  const fs::path path = dir / ("figure_" + cfg.s_id + "_K" + std::to_string(cfg.K_values.front()) +
                               "_" + to_string(cfg.collection) + ".tsv");
  auto out = open_output(path);
  emit_figure_data(cfg, out);
  log << "figure: wrote " << path.string() << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimate one component of an additive model by oblique projection and "
               "penalized model selection"};
  app.require_subcommand(1);

  CommandLine est_line, sim_line, cmp_line, fig_line;
  std::string sim_cfg, cmp_cfg, fig_cfg;

  auto* est = app.add_subcommand("estimate", "estimate s from a data file (x, y1..yK, z)");
  est->add_option("data", est_line.data_path, "delimited data file")->required();
  add_settings_flags(*est, est_line);

  auto* sim = app.add_subcommand("simulate", "ratio-to-oracle tables over K x C");
  sim->add_option("config_file", sim_cfg, "key=value settings file");
  add_settings_flags(*sim, sim_line);

  auto* cmp = app.add_subcommand("compare-zero", "compare with the selector that knows t = 0");
  cmp->add_option("config_file", cmp_cfg, "key=value settings file");
  add_settings_flags(*cmp, cmp_line);

  auto* fig = app.add_subcommand("figure", "signal, data, projected data and estimate for one draw");
  fig->add_option("config_file", fig_cfg, "key=value settings file");
  add_settings_flags(*fig, fig_line);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (est->parsed()) return cmd_estimate(merged_settings(est_line, ""), est_line.data_path, out);
    if (sim->parsed()) return cmd_simulate(merged_settings(sim_line, sim_cfg), out);
    if (cmp->parsed()) return cmd_compare_zero(merged_settings(cmp_line, cmp_cfg), out);
    if (fig->parsed()) return cmd_figure(merged_settings(fig_line, fig_cfg), out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const DegenerateDesign& e) {
    err << "assumption failure: " << e.what()
        << " (the procedure assumes E ∩ F = {0})\n";
    return kNumerical;
  } catch (const ConfigurationError& e) {
    err << "numerical/configuration failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace addcomp::cli
