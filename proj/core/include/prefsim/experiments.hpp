#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "prefsim/core_types.hpp"
#include "prefsim/fitting.hpp"
#include "prefsim/theory.hpp"

namespace prefsim {

enum class Algorithm { kRlpo, kDpo, kIl, kSlic };

std::string to_string(Algorithm algorithm);
// Accepts "rlpo", "dpo", "il", "slic"; throws ConfigError otherwise.
Algorithm parse_algorithm(const std::string& name);

/// Resolved experiment configuration. Field names match the config-file keys
/// and CLI flags (with '_' spelled '-').
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kRlpo;
  std::uint64_t pool_m1 = 10;
  std::uint64_t pool_m2 = 100;
  double base_mass1 = 0.8;
  double p1 = 0.6;
  double beta = 1.0;
  double delta = 1.0;
  std::size_t set_size = 2;
  // |D| for sweeps over |M2| and for gen-data.
  std::uint64_t num_data = 100000;
  std::vector<std::uint64_t> data_grid{100, 316, 1000, 3162, 10000};
  std::vector<std::uint64_t> m2_grid{10, 100, 1000, 10000};
  std::uint64_t num_seeds = 100;
  std::uint64_t master_seed = 20240229;
  double tol = 1e-10;
  int max_iter = 500;
  // Worker threads; results do not depend on it.
  unsigned threads = 1;

  // Throws ConfigError naming the first invalid field.
  void validate() const;

  FitSettings fit_settings() const;
  BasePolicy base_policy(std::uint64_t m2) const;
  TypeDistribution p_star() const { return TypeDistribution(p1); }
};

/// `key=value` lines for every field that affects results (threads excluded),
/// in a fixed order.
std::string resolved_config(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a over resolved_config.
std::string config_hash(const ExperimentConfig& config);

struct CurveRow {
  double sweep_value = 0.0;
  double mean_p_m1 = 0.0;
  double stderr_p_m1 = 0.0;
  std::uint64_t n_seeds = 0;
  double minimizer_exists_rate = 0.0;
};

struct Curve {
  std::string sweep_name;  // "num_data" or "pool_m2"
  std::vector<CurveRow> rows;  // sorted by sweep_value
};

/// Fitted M1 mass and minimizer existence for each seed of one sweep point.
struct PointResult {
  std::vector<double> p_m1;
  std::vector<bool> exists;
};

/// Seed i of a point with sweep value v uses derive_seed(master_seed, {v, i}),
/// so a point reruns identically in isolation and every algorithm sees the
/// same datasets.
PointResult run_point(const ExperimentConfig& config, std::uint64_t num_data,
                      std::uint64_t pool_m2, std::uint64_t sweep_value);

CurveRow summarize(double sweep_value, const PointResult& point);

/// Sweep over data_grid with the RLPO or DPO fitter.
Curve run_rlpo_dpo_sweep(const ExperimentConfig& config);
/// Sweep over m2_grid at fixed num_data with the IL fitter.
Curve run_il_sweep(const ExperimentConfig& config);
/// Sweep over m2_grid at fixed num_data with the SLiC fitter (set_size 2).
Curve run_slic_sweep(const ExperimentConfig& config);
/// Dispatches on config.algorithm.
Curve run_sweep(const ExperimentConfig& config);

/// Per-seed results for every point of the sweep run_sweep would perform,
/// in grid order.
std::vector<PointResult> run_sweep_points(const ExperimentConfig& config);

/// Header `sweep_value,mean_p_m1,stderr_p_m1,n_seeds,minimizer_exists_rate,config_hash`
/// followed by one row per point; reals printed with 17 significant digits.
void write_curve_csv(std::ostream& out, const Curve& curve, const std::string& hash);
std::string curve_to_csv(const Curve& curve, const std::string& hash);

/// Sidecar metadata: resolved config, hash, sweep name and library version.
void write_metadata(std::ostream& out, const ExperimentConfig& config, const Curve& curve);

struct EventFrequency {
  std::size_t set_size = 0;
  std::uint64_t num_data = 0;
  double eta = 0.0;          // NaN when the failure condition does not hold
  double eta_event_rate = 0.0;  // NaN when eta is undefined
  double il_event_rate = 0.0;
  std::uint64_t trials = 0;
};

struct TheoryReport {
  std::vector<FailurePrediction> predictions;
  std::vector<EventFrequency> events;
};

/// Failure predictions for set sizes min..max, plus observed frequencies of
/// both concentration events over num_seeds datasets at each data_grid size.
TheoryReport run_theory_check(const ExperimentConfig& config, std::size_t min_set_size = 2,
                              std::size_t max_set_size = 5);

std::string format_theory_report(const TheoryReport& report);

}  // namespace prefsim
