#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "critlab/kernels.hpp"
#include "critlab/linalg.hpp"
#include "critlab/stats.hpp"

namespace critlab {

enum class ExperimentKind {
  graphon_components,
  rank_one_vs_limit,
  rgiv,
  subcritical_oracles,
  blob_universality,
  sbm_constants,
  spectral_constants,
};

std::string experiment_name(ExperimentKind k);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::spectral_constants;
  KernelSpec kernel;                      // base kernel W
  std::optional<KernelSpec> window;       // H; defaults to lambda * W
  std::vector<int> ns{1000};
  std::vector<double> lambdas{0.0};
  int replicates = 1;
  std::uint64_t master_seed = 1;
  std::string out_dir;
  WeightScheme scheme = WeightScheme::grid;
  double delta0 = 0.25;
  int grid = 512;   // excursion grid for limit-side sampling
  int pool = 1024;  // tilt pools
  unsigned threads = 0;
  std::map<std::string, double> tolerances;  // tol.* overrides
  std::map<std::string, double> targets;     // target.* reference values
  // SBM block (used by sbm-constants)
  int sbm_k = 0;
  std::vector<double> sbm_kappa, sbm_mu, sbm_a, sbm_b;

  double tol(const std::string& name, double fallback) const {
    auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
  }

  /// Flat key=value text (with # comments) or a JSON object.
  static ExperimentConfig parse(const std::string& text);
  std::string echo() const;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // first column is the replicate index
  struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation;  // ">" or "<="
    bool pass = false;
  };
  std::vector<Check> checks;
  std::map<std::string, double> scalars;

  bool all_pass() const;
  std::string to_csv() const;
  std::string summary_json() const;
};

/// Runs the configured experiment; when out_dir is set, writes
/// replicates.csv, summary.json and config.txt into it.
ResultTable run_experiment(const ExperimentConfig& config);

/// Two-sample Kolmogorov-Smirnov; thin wrapper kept for the CLI contract.
KSResult ks_statistic(std::span<const double> a, std::span<const double> b);

/// Deterministic oracles for the barely subcritical graph with kernel matrix
/// kappa (edge probabilities kappa_ij / n), including computable coupling-gap
/// bounds for the susceptibility and distance comparisons.
struct SubcriticalOracles {
  std::vector<double> g1, g2, g3, g4;  // progeny moments per type
  double mean_g1 = 0.0;                // (1/n) sum g1  (s2 oracle)
  double mean_g2 = 0.0;                // (1/n) sum g2  (s3 oracle)
  double mean_g4 = 0.0;
  double mean_z = 0.0;                 // (1/n) sum E[Z]  (distance oracle)
  double gap_s2 = 0.0;                 // bound on oracle - E[s2]
  double gap_s3 = 0.0;                 // bound on oracle - E[s3]
  double gap_d = 0.0;                  // bound on oracle - E[D]
  double spectral_radius = 0.0;
};

SubcriticalOracles subcritical_oracles(const Matrix& kappa);

/// Largest-component mass samples of the blob-universality pipeline and the
/// matching limit-law samples live in run_experiment; these helpers expose
/// the shared per-replicate primitives for tests.
std::vector<double> limit_gamma1_samples(double lambda, int replicates,
                                         std::uint64_t seed, double dt = 1e-4,
                                         unsigned threads = 0);
std::vector<std::uint64_t> limit_surplus1_samples(double lambda, int replicates,
                                                  std::uint64_t seed, double dt = 1e-4,
                                                  unsigned threads = 0);

}  // namespace critlab
