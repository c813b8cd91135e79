#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tsmc/bridges/tempering.hpp"
#include "tsmc/core/error.hpp"
#include "tsmc/diagnostics/runtime.hpp"
#include "tsmc/diagnostics/stats.hpp"

namespace tsmc {

struct RunSummary {
  int run = 0;
  std::uint64_t seed = 0;
  double log_mdd = 0.0;
  std::vector<ParamSummary> posterior;
  int n_stages = 0;     // main run
  int n_stages_m0 = 0;  // preliminary run, 0 without one
  double wall_seconds = 0.0;
  /// Variance of the normalised stage-0 jump weights.
  double weight_variance = 0.0;
  /// Mean acceptance over the last quarter of stages.
  double late_accept_rate = 0.0;
  std::map<std::string, long long> likelihood_evals;
};

RunSummary summarize_run(const TwoStageRun& run, int index, std::uint64_t seed);

struct RunFailure {
  int run = 0;
  std::uint64_t seed = 0;
  ErrorKind kind = ErrorKind::InvalidConfig;
  std::string message;
};

/// Statistics over independent runs. SDs are NaN with fewer than two
/// successful runs.
struct MultiRunStats {
  std::vector<RunSummary> runs;  // successful runs in run order
  std::vector<RunFailure> failures;
  int n_skipped = 0;  // runs not started because of a stop request

  double mean_log_mdd = 0.0, sd_log_mdd = 0.0;
  double mean_stages = 0.0, sd_stages = 0.0;
  double mean_stages_m0 = 0.0;
  double mean_wall = 0.0, sd_wall = 0.0;
  double mean_weight_variance = 0.0, sd_weight_variance = 0.0;
  std::vector<double> mean_post_mean, sd_post_mean;  // per parameter

  bool ok() const { return failures.empty(); }
  std::vector<double> log_mdds() const;
};

void aggregate(MultiRunStats& stats);

/// Builds and executes one run for a given configuration.
using RunFactory = std::function<TwoStageRun(const SmcConfig&)>;

/// Polled between runs; returning true skips the remaining runs.
using StopRequest = std::function<bool()>;

/// n_run runs with seeds config.seed + r, executed in run order. A failing
/// run is recorded with its index and the remaining runs still execute.
MultiRunStats multi_run(const RunFactory& factory, const SmcConfig& config, int n_run, const StopRequest& stop = {});

std::vector<double> default_psi_grid();

struct SweepSettings {
  std::vector<double> psi_grid = default_psi_grid();
  SmcConfig config;
  int n_run = 20;
  Theta0Mode theta0_mode = Theta0Mode::Fixed;
  int tau_calls = 100;
  StopRequest stop;
};

struct SweepCell {
  double psi = 0.0;
  MultiRunStats stats;
};

struct SweepReport {
  std::vector<SweepCell> cells;
  double tau0 = 0.0;
  double tau1 = 0.0;
  double evals_per_stage = 0.0;

  /// Runtime model from the cell's mean stage counts and the measured taus.
  RuntimeModel runtime_model(std::size_t cell) const;
  /// Index of the psi* = 0 cell, or -1.
  long baseline() const;
  double predicted_reduction(std::size_t cell) const;
  double reduction_limit(std::size_t cell) const;
  /// Mean wall time relative to the psi* = 0 cell.
  double measured_reduction(std::size_t cell) const;
};

/// multi_run of model tempering at every psi* of the grid.
SweepReport run_sweep(ModelPtr m0, ModelPtr m1, const SweepSettings& settings);

}  // namespace tsmc
