#include "addcomp/simulation.hpp"

#include "addcomp/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <thread>

namespace addcomp {

const char* to_string(VarianceMode m) { return m == VarianceMode::known ? "known" : "estimated"; }

std::vector<double> default_C_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(0.5 * k);
  return grid;
}

void ExperimentConfig::validate() const {
  if (n < 4) throw InvalidInput("n must be >= 4");
  if (replications < 1) throw InvalidInput("replications must be >= 1");
  if (K_values.empty()) throw InvalidInput("at least one K value is required");
  for (int K : K_values) {
    if (K < 0) throw InvalidInput("K must be >= 0");
  }
  if (C_grid.empty()) throw InvalidInput("C grid is empty");
  for (double C : C_grid) {
    if (!std::isfinite(C) || C < 0.0) throw InvalidInput("C values must be finite and >= 0");
  }
  if (variance_modes.empty()) throw InvalidInput("no variance mode selected");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidInput("sigma2 must be >= 0");
  if (noise.kind == NoiseSpec::Kind::student_t && !(noise.df > 2.0)) {
    throw InvalidInput("student-t noise needs df > 2");
  }
  if (threads < 0) throw InvalidInput("threads must be >= 0");
  TestFunction::from_id(s_id);
  for (const auto& id : t_ids) TestFunction::from_id(id);
}

std::string ExperimentConfig::parasitic_id(int j) const {
  if (t_ids.empty()) return "f" + std::to_string((j - 1) % 6 + 1);
  return t_ids[static_cast<std::size_t>(j - 1) % t_ids.size()];
}

std::mt19937_64 replication_rng(std::uint64_t seed, int K, int replication) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(K), static_cast<std::uint32_t>(replication)};
  return std::mt19937_64(seq);
}

Vec draw_noise(const NoiseSpec& noise, Eigen::Index n, std::mt19937_64& rng) {
  Vec eps(n);
  if (noise.kind == NoiseSpec::Kind::gaussian) {
    std::normal_distribution<double> dist;
    for (Eigen::Index i = 0; i < n; ++i) eps(i) = dist(rng);
  } else {
    std::student_t_distribution<double> dist(noise.df);
    const double unit = std::sqrt((noise.df - 2.0) / noise.df);
    for (Eigen::Index i = 0; i < n; ++i) eps(i) = unit * dist(rng);
  }
  return eps;
}

Dataset generate_dataset(const ExperimentConfig& cfg, int K, std::mt19937_64& rng) {
  const Eigen::Index n = cfg.n;
  Dataset d;
  d.design.x.resize(n);
  d.design.y.resize(n, K);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.design.x(i) = unif(rng);
    for (int j = 0; j < K; ++j) d.design.y(i, j) = unif(rng);
  }

  const TestFunction s = TestFunction::from_id(cfg.s_id);
  std::vector<TestFunction> t;
  for (int j = 1; j <= K; ++j) t.push_back(TestFunction::from_id(cfg.parasitic_id(j)));

  d.s_true.resize(n);
  d.t_sum = Vec::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.s_true(i) = s(d.design.x(i));
    for (int j = 0; j < K; ++j) d.t_sum(i) += t[static_cast<std::size_t>(j)](d.design.y(i, j));
  }
  const Vec eps = draw_noise(cfg.noise, n, rng);
  d.z = d.s_true + d.t_sum + std::sqrt(cfg.sigma2) * eps;
  return d;
}

Fit prepare_fit(const DesignPoints& design, const Vec& z, Family family) {
  validate_design(design);
  if (z.size() != design.n()) throw InvalidInput("observation count differs from design size");
  const int n = static_cast<int>(design.n());
  const int K = static_cast<int>(design.components());
  const Dimensions dims = dims_for(n, K);
  const HaarBasis E = build_E(design.x, dims.haar_depth);
  const ParasiticBasis F = build_F(design.y, dims.fourier_order);
  ObliqueProjector P = ObliqueProjector::build(E.matrix, F.matrix);
  ModelCollection collection = family == Family::nested
                                   ? ModelCollection::nested_haar(P.range_basis(), dims.haar_depth)
                                   : ModelCollection::complete(P.range_basis());
  Vec y = P.apply(z);
  return Fit{dims, std::move(P), std::move(collection), std::move(y)};
}

const RatioCell& RatioReport::cell(int K, double C, VarianceMode mode) const {
  for (const auto& c : cells) {
    if (c.K == K && c.C == C && c.mode == mode) return c;
  }
  throw InvalidInput("no ratio cell for K=" + std::to_string(K) + " C=" + std::to_string(C));
}

namespace {

int worker_count(int requested, int jobs) {
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(t, 1, std::max(jobs, 1));
}

// Runs body(i) for i in [0, jobs); results must be written to per-index slots.
template <class Body>
void parallel_for(int jobs, int threads, Body body) {
  const int workers = worker_count(threads, jobs);
  if (workers == 1) {
    for (int i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < jobs; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Per-cell (numerator, denominator) pairs, cells ordered mode-major then C.
struct Replication {
  bool ok = false;
  double rho = 0.0;
  std::vector<double> num;
  std::vector<double> den;
};

// Ratio of means with delta-method standard error.
std::pair<double, double> ratio_of_means(const std::vector<double>& num,
                                         const std::vector<double>& den) {
  const double count = static_cast<double>(num.size());
  if (num.empty()) return {0.0, 0.0};
  const double mean_num = std::accumulate(num.begin(), num.end(), 0.0) / count;
  const double mean_den = std::accumulate(den.begin(), den.end(), 0.0) / count;
  if (!(mean_den > 0.0)) return {0.0, 0.0};
  const double ratio = mean_num / mean_den;
  if (num.size() < 2) return {ratio, 0.0};
  double ss = 0.0;
  for (std::size_t r = 0; r < num.size(); ++r) {
    const double e = num[r] - ratio * den[r];
    ss += e * e;
  }
  return {ratio, std::sqrt(ss / (count * (count - 1.0))) / mean_den};
}

template <class RunOne>
RatioReport run_cells(const ExperimentConfig& cfg, const std::vector<VarianceMode>& modes,
                      RunOne run_one) {
  cfg.validate();
  RatioReport report;
  const std::size_t per_rep = modes.size() * cfg.C_grid.size();
  for (int K : cfg.K_values) {
    std::vector<Replication> reps(static_cast<std::size_t>(cfg.replications));
    parallel_for(cfg.replications, cfg.threads, [&](int r) {
      auto rng = replication_rng(cfg.seed, K, r);
      Replication& rep = reps[static_cast<std::size_t>(r)];
      rep.num.assign(per_rep, 0.0);
      rep.den.assign(per_rep, 0.0);
      try {
        run_one(K, rng, rep);
        rep.ok = true;
      } catch (const DegenerateDesign&) {
        rep.ok = false;
      }
    });

    std::vector<double> rhos;
    for (const auto& rep : reps) {
      if (rep.ok) rhos.push_back(rep.rho);
    }
    const int used = static_cast<int>(rhos.size());
    const double mean_rho =
        used > 0 ? std::accumulate(rhos.begin(), rhos.end(), 0.0) / used : 0.0;

    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
      for (std::size_t ci = 0; ci < cfg.C_grid.size(); ++ci) {
        std::vector<double> num, den;
        for (const auto& rep : reps) {
          if (!rep.ok) continue;
          num.push_back(rep.num[mi * cfg.C_grid.size() + ci]);
          den.push_back(rep.den[mi * cfg.C_grid.size() + ci]);
        }
        auto [ratio, se] = ratio_of_means(num, den);
        report.cells.push_back({K, cfg.C_grid[ci], modes[mi], ratio, se, mean_rho, used,
                                cfg.replications - used});
      }
    }
    report.rho_per_draw.push_back(std::move(rhos));
  }
  return report;
}

}  // namespace

RatioReport run_ratio_experiment(const ExperimentConfig& cfg) {
  return run_cells(cfg, cfg.variance_modes, [&](int K, std::mt19937_64& rng, Replication& rep) {
    const Dataset data = generate_dataset(cfg, K, rng);
    const Fit fit = prepare_fit(data.design, data.z, cfg.collection);
    rep.rho = fit.projector.rho();
    const double oracle = oracle_denominator(data.s_true, fit.collection, fit.projector, cfg.sigma2);
    std::fill(rep.den.begin(), rep.den.end(), oracle);
    const double n = static_cast<double>(cfg.n);

    for (std::size_t mi = 0; mi < cfg.variance_modes.size(); ++mi) {
      double sigma2 = cfg.sigma2;
      if (cfg.variance_modes[mi] == VarianceMode::estimated) {
        const OrthonormalBasis v = default_variance_space(fit.projector.range_basis(), fit.projector);
        sigma2 = estimate_variance(fit.y, v.vectors, fit.projector);
      }
      for (std::size_t ci = 0; ci < cfg.C_grid.size(); ++ci) {
        const PenaltySpec spec{cfg.collection, cfg.C_grid[ci], sigma2};
        const SelectionOutcome out = select(fit.y, fit.collection, spec, fit.projector);
        rep.num[mi * cfg.C_grid.size() + ci] = (data.s_true - out.estimate).squaredNorm() / n;
      }
    }
  });
}

RatioReport run_zero_parasitic_comparison(const ExperimentConfig& cfg) {
  ExperimentConfig zeroed = cfg;
  zeroed.t_ids = {"zero"};
  zeroed.collection = Family::nested;
  zeroed.variance_modes = {VarianceMode::known};
  if (!(zeroed.sigma2 > 0.0)) throw InvalidInput("the comparison needs a known sigma2 > 0");

  RatioReport report = run_cells(zeroed, zeroed.variance_modes,
                                 [&](int K, std::mt19937_64& rng, Replication& rep) {
    const Dataset data = generate_dataset(zeroed, K, rng);
    const Fit fit = prepare_fit(data.design, data.z, Family::nested);
    rep.rho = fit.projector.rho();
    const double n = static_cast<double>(zeroed.n);
    for (std::size_t ci = 0; ci < zeroed.C_grid.size(); ++ci) {
      const double C = zeroed.C_grid[ci];
      const PenaltySpec spec{Family::nested, C, zeroed.sigma2};
      const SelectionOutcome oblique = select(fit.y, fit.collection, spec, fit.projector);
      const SelectionOutcome classic = select_classic(data.z, fit.collection, 1.0 + C, zeroed.sigma2);
      rep.num[ci] = (data.s_true - oblique.estimate).squaredNorm() / n;
      rep.den[ci] = (data.s_true - classic.estimate).squaredNorm() / n;
    }
  });
  report.zero_parasitic = true;
  return report;
}

FigureData make_figure_data(const ExperimentConfig& cfg) {
  cfg.validate();
  const int K = cfg.K_values.front();
  std::optional<Dataset> found;
  std::optional<Fit> built;
  int replication = 0;
  for (; replication < cfg.replications && !built; ++replication) {
    auto rng = replication_rng(cfg.seed, K, replication);
    found = generate_dataset(cfg, K, rng);
    try {
      built = prepare_fit(found->design, found->z, cfg.collection);
    } catch (const DegenerateDesign&) {
    }
  }
  if (!built) {
    throw DegenerateDesign("no non-degenerate design among the first " +
                           std::to_string(cfg.replications) + " replications");
  }
  const Dataset& data = *found;
  const Fit& fit = *built;

  PenaltySpec spec{cfg.collection, cfg.C_grid.front(), cfg.sigma2};
  if (cfg.variance_modes.front() == VarianceMode::estimated) spec.sigma2.reset();
  SelectionOutcome outcome = select(fit.y, fit.collection, spec, fit.projector);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(cfg.n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return data.design.x(a) < data.design.x(b); });
  FigureData fig;
  const Eigen::Index n = cfg.n;
  fig.x.resize(n);
  fig.s.resize(n);
  fig.z.resize(n);
  fig.y.resize(n);
  fig.estimate.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto i = order[static_cast<std::size_t>(r)];
    fig.x(r) = data.design.x(i);
    fig.s(r) = data.s_true(i);
    fig.z(r) = data.z(i);
    fig.y(r) = fit.y(i);
    fig.estimate(r) = outcome.estimate(i);
  }
  fig.rho = fit.projector.rho();
  fig.replication = replication - 1;
  fig.outcome = std::move(outcome);
  return fig;
}

void emit_figure_data(const ExperimentConfig& cfg, std::ostream& out) {
  const FigureData fig = make_figure_data(cfg);
  out << std::setprecision(10);
  out << "# s=" << cfg.s_id << " K=" << cfg.K_values.front() << " n=" << cfg.n
      << " collection=" << to_string(cfg.collection) << " C=" << cfg.C_grid.front()
      << " variance=" << to_string(cfg.variance_modes.front()) << " seed=" << cfg.seed
      << " replication=" << fig.replication << "\n";
  out << "# rho=" << fig.rho << " rho_sq=" << fig.rho * fig.rho
      << " chosen_dim=" << fig.outcome.chosen.dim() << " sigma2_used=" << fig.outcome.sigma2_used
      << "\n";
  out << "x\ts\tz\ty\ts_tilde\n";
  for (Eigen::Index r = 0; r < fig.x.size(); ++r) {
    out << fig.x(r) << '\t' << fig.s(r) << '\t' << fig.z(r) << '\t' << fig.y(r) << '\t'
        << fig.estimate(r) << '\n';
  }
  if (!out) throw std::runtime_error("failed to write figure data");
}

void write_ratio_table(const RatioReport& report, VarianceMode mode, std::ostream& out) {
  out << "K\tC\tvariance\tratio\tstderr\tmean_rho\tn_reps\tn_skipped\n";
  out << std::fixed;
  for (const auto& c : report.cells) {
    if (c.mode != mode) continue;
    out << c.K << '\t' << std::setprecision(1) << c.C << '\t' << to_string(c.mode) << '\t'
        << std::setprecision(6) << c.ratio << '\t' << c.stderr_ratio << '\t' << c.mean_rho << '\t'
        << c.replications << '\t' << c.skipped << '\n';
  }
  out.unsetf(std::ios::floatfield);
  if (!out) throw std::runtime_error("failed to write ratio table");
}

void write_ratio_matrix(const RatioReport& report, VarianceMode mode, std::ostream& out) {
  std::vector<double> cs;
  std::vector<int> ks;
  for (const auto& c : report.cells) {
    if (c.mode != mode) continue;
    if (std::find(cs.begin(), cs.end(), c.C) == cs.end()) cs.push_back(c.C);
    if (std::find(ks.begin(), ks.end(), c.K) == ks.end()) ks.push_back(c.K);
  }
  out << std::fixed << "K\trho";
  for (double C : cs) out << '\t' << std::setprecision(1) << C;
  out << '\n';
  for (int K : ks) {
    const RatioCell& first = report.cell(K, cs.front(), mode);
    out << K << '\t' << std::setprecision(2) << first.mean_rho;
    for (double C : cs) out << '\t' << report.cell(K, C, mode).ratio;
    out << '\n';
  }
  out.unsetf(std::ios::floatfield);
  if (!out) throw std::runtime_error("failed to write ratio matrix");
}

}  // namespace addcomp
