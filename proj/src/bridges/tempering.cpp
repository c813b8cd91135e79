#include "tsmc/bridges/tempering.hpp"

#include <chrono>

#include "tsmc/core/error.hpp"

namespace tsmc {

namespace {

constexpr std::uint64_t kPreliminaryTag = 0x7072656cULL;

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SmcConfig with_seed(SmcConfig c, std::uint64_t seed) {
  c.seed = seed;
  return c;
}

}  // namespace

std::uint64_t preliminary_seed(std::uint64_t seed) { return RngKey{seed, 0, 0, 0}.child(kPreliminaryTag).seed; }

SmcRunResult run_tempered_m0(ModelPtr m0, double psi_star, const SmcConfig& config) {
  if (!(psi_star > 0.0 && psi_star <= 1.0)) fail(ErrorKind::InvalidConfig, "psi* must lie in (0,1]");
  const LikelihoodTempering bridge(std::move(m0), psi_star);
  return run_smc(bridge, config);
}

ParticleSystem equalize(const ParticleSystem& swarm, std::uint64_t seed) {
  ParticleSystem out = swarm;
  if (!swarm.equal_weights()) {
    Rng rng(RngKey{seed, 0, kSwarmIndex, substep::kInitResample});
    const Vec w = swarm.weights();
    resample_particles(out, systematic_resample(std::span<const double>(w.data(), w.size()), rng));
  }
  out.log_weights.setZero();
  return out;
}

ParticleSystem init_stage0(const Bridge& bridge, const SmcConfig& config, const SmcRunResult* preliminary) {
  if (bridge.has_direct_stage0()) return make_stage0(bridge, config);
  if (preliminary == nullptr || !preliminary->complete) {
    fail(ErrorKind::InvalidConfig, "bridge " + bridge.strategy() + " needs a completed preliminary run");
  }
  const ParticleSystem src = equalize(preliminary->final_particles, config.seed);
  if (src.size() != static_cast<std::size_t>(config.n_particles)) {
    fail(ErrorKind::LayoutMismatch, "preliminary swarm has " + std::to_string(src.size()) + " particles, expected " +
                                        std::to_string(config.n_particles));
  }
  if (const auto* mt = dynamic_cast<const ModelTempering*>(&bridge)) {
    const RowMat values = mt->stage0_values(src.values, config.seed);
    return make_stage0(bridge, config, &values);
  }
  if (src.dim() != bridge.dim()) fail(ErrorKind::LayoutMismatch, "preliminary swarm dimension differs from the bridge");
  return make_stage0(bridge, config, &src.values);
}

Vec jump_log_weights(const Bridge& bridge, const ParticleSystem& swarm) {
  Vec out(static_cast<Eigen::Index>(swarm.size()));
  for (std::size_t i = 0; i < swarm.size(); ++i) {
    const double* c = swarm.cache.row(static_cast<Eigen::Index>(i)).data();
    out[static_cast<Eigen::Index>(i)] = bridge.log_likelihood(1.0, c) - bridge.log_likelihood(0.0, c);
  }
  return out;
}

TwoStageRun run_direct(std::shared_ptr<const Bridge> bridge, const SmcConfig& config) {
  if (!bridge->has_direct_stage0()) fail(ErrorKind::InvalidConfig, "bridge " + bridge->strategy() + " needs a preliminary run");
  const auto t0 = std::chrono::steady_clock::now();
  TwoStageRun out;
  const ParticleSystem init = init_stage0(*bridge, config);
  out.stage0_jump = jump_log_weights(*bridge, init);
  out.main = run_smc(*bridge, config, &init);
  for (const auto& name : bridge->evaluated_models()) out.main.likelihood_evals[name] += config.n_particles;
  out.bridge = std::move(bridge);
  out.log_mdd_ratio = log_mdd_ratio(out.main);
  out.log_mdd = out.log_mdd_ratio;
  out.wall_seconds = elapsed(t0);
  return out;
}

TwoStageRun run_likelihood_tempering(ModelPtr m1, const SmcConfig& config) {
  return run_direct(std::make_shared<LikelihoodTempering>(std::move(m1)), config);
}

std::shared_ptr<ModelTempering> make_mt_bridge(ModelPtr m0, ModelPtr m1, double psi_star, Theta0Mode mode,
                                               const SmcRunResult& m0_run) {
  if (m0_run.final_particles.dim() != m0->dim()) {
    fail(ErrorKind::LayoutMismatch, "stored M0 swarm does not match the approximating model");
  }
  Vec theta0;
  if (mode == Theta0Mode::Fixed) {
    const auto idx = indices_with_tag(*m0, ParamTag::M0Only);
    const Vec mean = weighted_moments(m0_run.final_particles).mean;
    theta0.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) theta0[static_cast<Eigen::Index>(k)] = mean[static_cast<Eigen::Index>(idx[k])];
  }
  return std::make_shared<ModelTempering>(std::move(m0), std::move(m1), psi_star, mode, theta0);
}

TwoStageRun run_model_tempering(ModelPtr m0, ModelPtr m1, double psi_star, const SmcConfig& config,
                                const ModelTemperingOptions& options) {
  if (!(psi_star >= 0.0 && psi_star <= 1.0)) fail(ErrorKind::InvalidConfig, "psi* must lie in [0,1]");
  if (psi_star == 0.0) return run_likelihood_tempering(std::move(m1), config);

  const auto t_start = std::chrono::steady_clock::now();
  TwoStageRun out;
  if (options.m0_run != nullptr) {
    if (!options.m0_run->complete || options.m0_run->terminal_phi != psi_star) {
      fail(ErrorKind::InvalidConfig, "stored M0 run does not end at psi* = " + std::to_string(psi_star));
    }
    out.preliminary = *options.m0_run;
  } else {
    out.preliminary = run_tempered_m0(m0, psi_star, with_seed(config, preliminary_seed(config.seed)));
  }

  auto bridge = make_mt_bridge(m0, m1, psi_star, options.theta0_mode, out.preliminary);
  const ParticleSystem init = init_stage0(*bridge, config, &out.preliminary);
  out.stage0_jump = jump_log_weights(*bridge, init);
  out.main = run_smc(*bridge, config, &init);
  for (const auto& name : bridge->evaluated_models()) out.main.likelihood_evals[name] += config.n_particles;
  out.bridge = bridge;
  out.log_mdd_ratio = log_mdd_ratio(out.main);
  out.log_mdd = log_mdd_ratio(out.preliminary) + out.log_mdd_ratio;
  out.wall_seconds = elapsed(t_start);
  return out;
}

TwoStageRun run_data_tempering(ModelPtr m1, DataTemperingVariant variant, std::size_t t0, const SmcConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  TwoStageRun out;
  if (variant == DataTemperingVariant::Prefix) return run_direct(std::make_shared<DataTemperingPrefix>(std::move(m1)), config);
  auto bridge = std::make_shared<DataTemperingAnchored>(m1, t0);
  if (t0 > 0) {
    auto head = std::make_shared<PrefixModel>(m1, t0);
    const LikelihoodTempering lt(head);
    out.preliminary = run_smc(lt, with_seed(config, preliminary_seed(config.seed)));
  }
  const ParticleSystem init = init_stage0(*bridge, config, t0 > 0 ? &out.preliminary : nullptr);
  out.stage0_jump = jump_log_weights(*bridge, init);
  out.main = run_smc(*bridge, config, &init);
  out.main.likelihood_evals[m1->name()] += config.n_particles;
  out.bridge = bridge;
  out.log_mdd_ratio = log_mdd_ratio(out.main);
  out.log_mdd = (t0 > 0 ? log_mdd_ratio(out.preliminary) : 0.0) + out.log_mdd_ratio;
  out.wall_seconds = elapsed(t_start);
  return out;
}

}  // namespace tsmc
