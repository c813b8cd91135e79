#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tsmc/core/rng.hpp"
#include "tsmc/smc/bridge.hpp"
#include "tsmc/smc/particles.hpp"

namespace tsmc {

/// Runs the sampler from stage 0 to bridge.terminal_phi(). Without `init` the
/// stage-0 swarm is drawn from the bridge directly.
SmcRunResult run_smc(const Bridge& bridge, const SmcConfig& config, const ParticleSystem* init = nullptr);

/// Stage-0 swarm: `values` (or direct draws when empty) evaluated under the
/// bridge, unit weights.
ParticleSystem make_stage0(const Bridge& bridge, const SmcConfig& config, const RowMat* values = nullptr);

/// Reweights to phi_new. Returns the incremental log weights and the log of
/// the stage's normalising-constant ratio estimate.
struct Correction {
  Vec incr_log_weights;
  double log_mdd_increment = 0.0;
};
Correction correction_step(ParticleSystem& particles, const Bridge& bridge, double phi_new);

/// N / mean(W^2) for mean-one weights given as logs (any additive constant).
double compute_ess(std::span<const double> log_weights);
inline double compute_ess(const Vec& lw) { return compute_ess(std::span<const double>(lw.data(), lw.size())); }

/// log(mean(exp(x))), max-shifted.
double log_mean_exp(std::span<const double> x);
/// Shifts log weights so their exponentials average to one.
void normalize_log_weights(Vec& lw);

/// Next exponent targeting ESS = alpha * ess_star, capped at the bridge's terminal phi.
double solve_next_phi(const ParticleSystem& particles, const Bridge& bridge, double alpha, double ess_star);

/// Systematic resampling of mean-one weights; ascending indices.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, Rng& rng);
/// In-place selection; weights reset to one.
void resample_particles(ParticleSystem& particles, const std::vector<std::size_t>& idx);

/// Random partition of 0..d-1 into n_blocks contiguous chunks of a permutation.
std::vector<std::vector<std::size_t>> random_blocks(std::size_t d, int n_blocks, Rng& rng);

/// RWMH moves at fixed phi. Returns the pooled acceptance rate.
double mutate(ParticleSystem& particles, const Bridge& bridge, double phi, const MutationTuning& tuning,
              const SmcConfig& config, long long* n_evals = nullptr);

/// c * f(accept) with f(x) = 0.95 + 0.10 * logistic(16 (x - target)).
double adapt_scale(double c_prev, double accept_rate, double target = 0.25);
double scale_multiplier(double accept_rate, double target = 0.25);

struct WeightedMoments {
  Vec mean;
  Mat cov;
};
/// Weighted mean and (ridged if near singular) covariance.
WeightedMoments weighted_moments(const ParticleSystem& particles);

/// Sum of the per-stage log increments. Throws IncompleteRun.
double log_mdd_ratio(const SmcRunResult& result);

}  // namespace tsmc
