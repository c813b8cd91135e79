#pragma once

#include <span>

namespace tsmc {

/// Variance (divisor N) of the weights exp(lw) rescaled to mean one. Lies in
/// [0, N - 1]; N - 1 exactly when a single weight carries all the mass.
double normalized_weight_variance(std::span<const double> log_weights);

/// Variance of the normalised importance weights
/// w_i = exp(logL1_i - psi * logL0_i) for draws from the psi-tempered M0
/// posterior.
double importance_weight_variance(std::span<const double> m0_logliks, std::span<const double> m1_logliks,
                                  double psi_star);

}  // namespace tsmc
