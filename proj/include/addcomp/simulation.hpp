#pragma once

// Monte Carlo reproduction of the additive-model simulation study:
// data generation, ratio-to-oracle estimation and the comparison against
// a selector that knows the parasitic components vanish.

#include "addcomp/bases.hpp"
#include "addcomp/projection.hpp"
#include "addcomp/selection.hpp"
#include "addcomp/test_functions.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace addcomp {

enum class VarianceMode { known, estimated };
const char* to_string(VarianceMode m);

struct NoiseSpec {
  enum class Kind { gaussian, student_t } kind = Kind::gaussian;
  double df = 10.0;  // student_t only, standardized to unit variance

  static NoiseSpec gaussian() { return {}; }
  static NoiseSpec student_t(double df) { return {Kind::student_t, df}; }
};

/// One Monte Carlo study. Every (K, C, variance mode) cell reuses the same
/// replication draws for a given K.
struct ExperimentConfig {
  int n = 512;
  std::vector<int> K_values{1};
  std::string s_id = "f1";
  /// Parasitic component ids; empty means t^j = f_j (cycling through f1..f6).
  std::vector<std::string> t_ids;
  double sigma2 = 1.0;
  std::vector<VarianceMode> variance_modes{VarianceMode::known};
  Family collection = Family::nested;
  std::vector<double> C_grid{1.5};
  int replications = 500;
  std::uint64_t seed = 20240101;
  NoiseSpec noise;
  int threads = 0;  // 0: hardware concurrency

  /// Throws InvalidInput when a field is out of range.
  void validate() const;
  /// Component id used for t^j, j = 1..K.
  std::string parasitic_id(int j) const;
};

/// Column grid 0.0, 0.5, ..., 5.0.
std::vector<double> default_C_grid();

struct Dataset {
  DesignPoints design;
  Vec z;       // observations
  Vec s_true;  // s(x_i)
  Vec t_sum;   // sum_j t^j(y^j_i)
};

/// Per-replication generator, derived from (seed, K, replication) only.
std::mt19937_64 replication_rng(std::uint64_t seed, int K, int replication);

/// Uniform design on [0,1]^{K+1}; Z = s(x) + sum_j t^j(y^j) + sigma eps.
Dataset generate_dataset(const ExperimentConfig& cfg, int K, std::mt19937_64& rng);

/// Unit-variance noise vector.
Vec draw_noise(const NoiseSpec& noise, Eigen::Index n, std::mt19937_64& rng);

/// Pipeline pieces shared by the experiments and the CLI for one design.
struct Fit {
  Dimensions dims;
  ObliqueProjector projector;
  ModelCollection collection;
  Vec y;  // P z
};

/// Builds E, F, P and the model collection for a design; throws
/// DegenerateDesign when E ∩ F ≠ {0}.
Fit prepare_fit(const DesignPoints& design, const Vec& z, Family family);

struct RatioCell {
  int K = 0;
  double C = 0.0;
  VarianceMode mode = VarianceMode::known;
  double ratio = 0.0;
  double stderr_ratio = 0.0;
  double mean_rho = 0.0;
  int replications = 0;  // used
  int skipped = 0;       // degenerate designs
};

struct RatioReport {
  std::vector<RatioCell> cells;
  /// rho(P) of every non-skipped draw, per K in config order.
  std::vector<std::vector<double>> rho_per_draw;
  bool zero_parasitic = false;

  const RatioCell& cell(int K, double C, VarianceMode mode) const;
};

/// r_K(s~) = E||s - s~||_n^2 / inf_m{||s - s_m||_n^2 + Tr(P' pi_m P) sigma^2 / n},
/// estimated as a ratio of Monte Carlo means with a delta-method standard error.
RatioReport run_ratio_experiment(const ExperimentConfig& cfg);

/// r_K(s~, s~_0) = E||s - s~||_n^2 / E||s - s~_0||_n^2 with t^j = 0,
/// the nested collection and known variance.
RatioReport run_zero_parasitic_comparison(const ExperimentConfig& cfg);

struct FigureData {
  Vec x, s, z, y, estimate;  // sorted by x
  double rho = 0.0;
  int replication = 0;  // index of the draw shown
  SelectionOutcome outcome;
};

/// First non-degenerate replication of the first K value at C = C_grid.front().
/// Throws DegenerateDesign when none of the configured replications qualifies.
FigureData make_figure_data(const ExperimentConfig& cfg);

/// Writes '#'-prefixed header lines (including rho and rho^2) and
/// tab-separated rows x, s, z, y, s_tilde sorted by x.
void emit_figure_data(const ExperimentConfig& cfg, std::ostream& out);

/// One row per cell: K, C, variance, ratio, stderr, mean_rho, n_reps, n_skipped.
void write_ratio_table(const RatioReport& report, VarianceMode mode, std::ostream& out);

/// Table layout: one row per K, one column per C.
void write_ratio_matrix(const RatioReport& report, VarianceMode mode, std::ostream& out);

}  // namespace addcomp
