#include "tsmc/diagnostics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tsmc/core/error.hpp"

namespace tsmc {

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q) {
  const std::size_t n = values.size();
  if (n == 0 || weights.size() != n) fail(ErrorKind::InvalidConfig, "weighted quantile needs matching non-empty inputs");
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorKind::InvalidConfig, "quantile level must lie in [0,1]");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) fail(ErrorKind::NonFiniteWeight, "weights sum to zero");

  double cum = 0.0;
  double prev_pos = 0.0, prev_val = values[order[0]];
  for (std::size_t k = 0; k < n; ++k) {
    const double w = weights[order[k]];
    const double pos = (cum + 0.5 * w) / total;
    cum += w;
    const double v = values[order[k]];
    if (q <= pos) {
      if (k == 0 || pos == prev_pos) return k == 0 ? v : prev_val;
      const double t = (q - prev_pos) / (pos - prev_pos);
      return prev_val + t * (v - prev_val);
    }
    prev_pos = pos;
    prev_val = v;
  }
  return prev_val;
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorKind::InvalidConfig, "Spearman needs two equal-length samples");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

double mean(std::span<const double> x) {
  if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

std::vector<ParamSummary> summarize_posterior(const ParticleSystem& swarm) {
  const Vec w = swarm.weights();
  const std::span<const double> ws(w.data(), static_cast<std::size_t>(w.size()));
  const double total = w.sum();
  std::vector<ParamSummary> out(swarm.dim());
  std::vector<double> col(swarm.size());
  for (std::size_t j = 0; j < swarm.dim(); ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      col[i] = swarm.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      m += ws[i] * col[i];
    }
    m /= total;
    double v = 0.0;
    for (std::size_t i = 0; i < swarm.size(); ++i) v += ws[i] * (col[i] - m) * (col[i] - m);
    ParamSummary& s = out[j];
    s.mean = m;
    s.variance = v / total;
    s.q025 = weighted_quantile(col, ws, 0.025);
    s.q05 = weighted_quantile(col, ws, 0.05);
    s.q95 = weighted_quantile(col, ws, 0.95);
    s.q975 = weighted_quantile(col, ws, 0.975);
  }
  return out;
}

}  // namespace tsmc
