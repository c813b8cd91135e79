#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "tsmc/core/types.hpp"

namespace tsmc {

/// Weighted swarm at one tempering stage. Weights are stored as logs of
/// weights normalised to arithmetic mean one.
struct ParticleSystem {
  RowMat values;  // N x d
  Vec log_weights;
  RowMat cache;  // N x bridge.cache_width()
  int stage = 0;
  double phi = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }
  /// exp(log_weights)
  Vec weights() const;
  bool equal_weights() const;
};

struct SmcConfig {
  int n_particles = 1000;
  double alpha = 0.95;
  double resample_threshold = 0.5;
  int n_mh = 1;
  int n_blocks = 1;
  double initial_scale = 0.5;
  double target_accept = 0.25;
  std::uint64_t seed = 0;
  int max_stages = 1000;

  /// Throws InvalidConfig.
  void validate() const;
};

struct MutationTuning {
  double scale = 0.5;
  Mat proposal_cov;
  double last_accept_rate = 0.0;
};

struct SmcRunResult {
  ParticleSystem final_particles;
  std::vector<double> schedule;  // phi_1 .. phi_{N_phi}
  std::vector<double> ess_history;
  std::vector<bool> resampled_flags;
  std::vector<double> accept_rates;
  std::vector<double> scales;
  std::vector<double> log_mdd_increments;
  int n_stages = 0;
  std::vector<double> wall_times;  // seconds per stage
  double stage0_seconds = 0.0;
  double total_seconds = 0.0;
  std::map<std::string, long long> likelihood_evals;
  double terminal_phi = 1.0;
  bool complete = false;
};

}  // namespace tsmc
