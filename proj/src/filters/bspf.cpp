#include "tsmc/filters/bspf.hpp"

#include <cmath>
#include <limits>

#include "tsmc/core/error.hpp"
#include "tsmc/simd/kernels.hpp"

namespace tsmc {

void multinomial_resample(std::span<const double> weights, Rng& rng, std::size_t* out) {
  const std::size_t m = weights.size();
  thread_local std::vector<std::uint64_t> bits;
  thread_local std::vector<double> spacing;
  bits.resize(m + 1);
  spacing.resize(m + 1);
  rng.fill_bits(bits);
  simd::kernels().neg_log_uniform(bits.data(), m + 1, spacing.data());
  double total_spacing = 0.0;
  for (double e : spacing) total_spacing += e;
  double total_weight = 0.0;
  for (double w : weights) total_weight += w;
  const double scale = total_weight / total_spacing;

  std::size_t j = 0;
  double cum_w = weights[0];
  double u = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    u += spacing[k] * scale;
    while (cum_w < u && j + 1 < m) cum_w += weights[++j];
    out[k] = j;
  }
}

std::vector<std::size_t> multinomial_resample(std::span<const double> weights, Rng& rng) {
  std::vector<std::size_t> idx(weights.size());
  multinomial_resample(weights, rng, idx.data());
  return idx;
}

double bspf_loglik(const StateModel& model, const BspfConfig& config, const RngKey& key, std::size_t n_terms,
                   double* terms) {
  if (config.n_particles < 2) fail(ErrorKind::InvalidConfig, "particle filter needs at least 2 particles");
  if (n_terms > model.n_periods()) fail(ErrorKind::InvalidConfig, "more likelihood terms requested than periods");
  const auto m = static_cast<std::size_t>(config.n_particles);
  const std::size_t ds = model.state_dim();
  const auto& k = simd::kernels();

  thread_local std::vector<double> states, scratch, logw, w;
  thread_local std::vector<std::size_t> idx;
  states.resize(ds * m);
  scratch.resize(ds * m);
  logw.resize(m);
  w.resize(m);
  idx.resize(m);

  Rng rng(key);
  model.initialize(rng, states.data(), m);
  double total = 0.0;
  const double log_m = std::log(static_cast<double>(m));
  for (std::size_t t = 0; t < n_terms; ++t) {
    model.propagate(t, rng, states.data(), m);
    model.log_measurement(t, states.data(), m, logw.data());
    const double mx = k.max(logw.data(), m);
    if (mx == -std::numeric_limits<double>::infinity() || std::isnan(mx)) {
      for (std::size_t s = t; s < n_terms; ++s) terms[s] = -std::numeric_limits<double>::infinity();
      return -std::numeric_limits<double>::infinity();
    }
    k.exp_shift(logw.data(), m, mx, w.data());
    double sw = 0.0;
    for (double v : w) sw += v;
    terms[t] = mx + std::log(sw) - log_m;
    total += terms[t];
    if (t + 1 == n_terms) break;
    multinomial_resample(std::span<const double>(w.data(), m), rng, idx.data());
    for (std::size_t c = 0; c < ds; ++c) {
      const double* src = states.data() + c * m;
      double* dst = scratch.data() + c * m;
      for (std::size_t j = 0; j < m; ++j) dst[j] = src[idx[j]];
    }
    states.swap(scratch);
  }
  return total;
}

double bspf_loglik(const StateModel& model, const BspfConfig& config, const RngKey& key) {
  std::vector<double> terms(model.n_periods());
  return bspf_loglik(model, config, key, terms.size(), terms.data());
}

}  // namespace tsmc
