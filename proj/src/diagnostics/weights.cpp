#include "tsmc/diagnostics/weights.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tsmc/core/error.hpp"
#include "tsmc/smc/engine.hpp"

namespace tsmc {

double normalized_weight_variance(std::span<const double> lw) {
  if (lw.empty()) fail(ErrorKind::InvalidConfig, "no weights");
  const double shift = log_mean_exp(lw);
  if (!std::isfinite(shift)) fail(ErrorKind::NonFiniteWeight, "importance weights are not finite");
  double acc = 0.0;
  for (double v : lw) {
    const double d = std::exp(v - shift) - 1.0;
    acc += d * d;
  }
  // Rounding in exp() can push a one-hot vector a few ulps past the bound.
  return std::min(acc / static_cast<double>(lw.size()), static_cast<double>(lw.size() - 1));
}

double importance_weight_variance(std::span<const double> m0_logliks, std::span<const double> m1_logliks,
                                  double psi_star) {
  if (m0_logliks.size() != m1_logliks.size()) fail(ErrorKind::InvalidConfig, "log-likelihood caches differ in length");
  std::vector<double> lw(m1_logliks.size());
  for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = m1_logliks[i] - tempered(psi_star, m0_logliks[i]);
  return normalized_weight_variance(lw);
}

}  // namespace tsmc
