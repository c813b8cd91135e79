#pragma once

#include <span>
#include <vector>

#include "tsmc/smc/particles.hpp"

namespace tsmc {

/// Weighted empirical quantile. Sorted values sit at plotting positions
/// (C_i - w_i/2) / W (C_i the cumulative weight) and are linearly
/// interpolated between; q outside the first/last position clamps.
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> x);
/// Sample standard deviation (divisor n - 1); NaN for fewer than 2 values.
double sample_sd(std::span<const double> x);

struct ParamSummary {
  double mean = 0.0;
  double variance = 0.0;
  double q025 = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  double q975 = 0.0;
};

/// Weighted posterior summaries of each coordinate of the final swarm.
std::vector<ParamSummary> summarize_posterior(const ParticleSystem& swarm);

}  // namespace tsmc
