#pragma once

#include <cstdint>
#include <memory>

#include "tsmc/bridges/bridges.hpp"
#include "tsmc/bridges/model.hpp"
#include "tsmc/smc/engine.hpp"

namespace tsmc {

/// Seed of the approximating-model (or data-prefix) run that precedes a
/// model- or anchored data-tempering run with seed `seed`.
std::uint64_t preliminary_seed(std::uint64_t seed);

/// Likelihood tempering of `m0` stopped at exponent psi*. Uses `config.seed`
/// as given; callers pick preliminary_seed() for the two-run workflow.
SmcRunResult run_tempered_m0(ModelPtr m0, double psi_star, const SmcConfig& config);

/// Equally weighted copy of a final swarm: systematic resampling keyed on
/// `seed` when the weights differ.
ParticleSystem equalize(const ParticleSystem& swarm, std::uint64_t seed);

/// Stage-0 swarm for any bridge. Bridges that cannot sample stage 0 directly
/// (model tempering, anchored data tempering) need the preliminary run.
ParticleSystem init_stage0(const Bridge& bridge, const SmcConfig& config, const SmcRunResult* preliminary = nullptr);

struct TwoStageRun {
  SmcRunResult preliminary;  // tempered M0 or data-prefix run; empty when unused
  SmcRunResult main;
  std::shared_ptr<const Bridge> bridge;
  /// log p(Y|M1): preliminary increments plus main increments.
  double log_mdd = 0.0;
  /// Main-run increments only: log p(Y|M1) - log of the stage-0 normaliser.
  double log_mdd_ratio = 0.0;
  /// Wall time of both runs, including the stage-0 evaluations.
  double wall_seconds = 0.0;
  /// Per stage-0 particle, log p_1(Y|theta) - log p_0(Y|theta): the
  /// importance log weights of a single jump to the terminal target.
  Vec stage0_jump;
};

/// log_likelihood(1) - log_likelihood(0) for every particle of `swarm`.
Vec jump_log_weights(const Bridge& bridge, const ParticleSystem& swarm);

struct ModelTemperingOptions {
  Theta0Mode theta0_mode = Theta0Mode::Fixed;
  /// Reuse a stored tempered-M0 run instead of running one.
  const SmcRunResult* m0_run = nullptr;
};

/// The M0 -> M1 bridge started from a completed tempered-M0 run; in fixed
/// mode the M0-only parameters sit at their weighted posterior mean.
std::shared_ptr<ModelTempering> make_mt_bridge(ModelPtr m0, ModelPtr m1, double psi_star, Theta0Mode mode,
                                               const SmcRunResult& m0_run);

/// Tempered M0 run at psi* followed by the M0 -> M1 bridge. psi* = 0 is plain
/// likelihood tempering of M1 with the same seed.
TwoStageRun run_model_tempering(ModelPtr m0, ModelPtr m1, double psi_star, const SmcConfig& config,
                                const ModelTemperingOptions& options = {});

/// A single run of a bridge that samples its own stage 0.
TwoStageRun run_direct(std::shared_ptr<const Bridge> bridge, const SmcConfig& config);

/// Likelihood tempering of M1 from the prior.
TwoStageRun run_likelihood_tempering(ModelPtr m1, const SmcConfig& config);

enum class DataTemperingVariant { Prefix, Anchored };

/// Data tempering; the anchored variant first runs likelihood tempering on
/// the first T0 observations.
TwoStageRun run_data_tempering(ModelPtr m1, DataTemperingVariant variant, std::size_t t0, const SmcConfig& config);

}  // namespace tsmc
