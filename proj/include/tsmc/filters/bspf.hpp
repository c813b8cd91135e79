#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tsmc/core/rng.hpp"

namespace tsmc {

/// State-space model in the batched form the particle filter consumes.
/// States are stored component-major: `states[c * m + j]` is component c of
/// particle j.
class StateModel {
 public:
  virtual ~StateModel() = default;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t n_periods() const = 0;
  /// Draw s_0 for m particles.
  virtual void initialize(Rng& rng, double* states, std::size_t m) const = 0;
  /// Replace s_{t-1} by a draw of s_t.
  virtual void propagate(std::size_t t, Rng& rng, double* states, std::size_t m) const = 0;
  /// out[j] = log p(y_t | s_t^j).
  virtual void log_measurement(std::size_t t, const double* states, std::size_t m, double* out) const = 0;
};

struct BspfConfig {
  int n_particles = 100;
};

/// Bootstrap particle filter with multinomial resampling every period.
/// Writes the first n_terms per-period log-likelihood increments to `terms`
/// and returns their sum. A period whose weights all vanish yields -inf for
/// it and every later period.
double bspf_loglik(const StateModel& model, const BspfConfig& config, const RngKey& key, std::size_t n_terms,
                   double* terms);
double bspf_loglik(const StateModel& model, const BspfConfig& config, const RngKey& key);

/// Multinomial draw of weights.size() indices (ascending) from unnormalised
/// weights via sorted uniforms built from exponential spacings.
std::vector<std::size_t> multinomial_resample(std::span<const double> weights, Rng& rng);
void multinomial_resample(std::span<const double> weights, Rng& rng, std::size_t* out);

}  // namespace tsmc
