#include "tsmc/smc/particles.hpp"

#include <cmath>

#include "tsmc/core/error.hpp"

namespace tsmc {

Vec ParticleSystem::weights() const { return log_weights.array().exp().matrix(); }

bool ParticleSystem::equal_weights() const {
  for (Eigen::Index i = 1; i < log_weights.size(); ++i) {
    if (log_weights[i] != log_weights[0]) return false;
  }
  return true;
}

void SmcConfig::validate() const {
  if (n_particles < 2) fail(ErrorKind::InvalidConfig, "n_particles must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::InvalidConfig, "alpha must lie in (0,1)");
  if (!(resample_threshold > 0.0 && resample_threshold <= 1.0)) {
    fail(ErrorKind::InvalidConfig, "resample_threshold must lie in (0,1]");
  }
  if (n_mh < 1) fail(ErrorKind::InvalidConfig, "n_mh must be at least 1");
  if (n_blocks < 1) fail(ErrorKind::InvalidConfig, "n_blocks must be at least 1");
  if (!(initial_scale > 0.0) || !std::isfinite(initial_scale)) {
    fail(ErrorKind::InvalidConfig, "initial_scale must be positive");
  }
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    fail(ErrorKind::InvalidConfig, "target_accept must lie in (0,1)");
  }
  if (max_stages < 1) fail(ErrorKind::InvalidConfig, "max_stages must be at least 1");
}

}  // namespace tsmc
