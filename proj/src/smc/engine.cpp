#include "tsmc/smc/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "tsmc/core/error.hpp"
#include "tsmc/core/parallel.hpp"
#include "tsmc/simd/kernels.hpp"

namespace tsmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kProposalEvalTag = 0x70726f70ULL;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ESS of log weights already holding exp-able values; 0 if every weight vanished.
double ess_of(const double* x, std::size_t n) {
  const auto& k = simd::kernels();
  const double m = k.max(x, n);
  if (m == kNegInf) return 0.0;
  double s1 = 0.0, s2 = 0.0;
  k.sum_exp2(x, n, m, &s1, &s2);
  return s1 * s1 / s2;
}

// log p_n(phi_new) - log p_n(phi_old) with -inf absorbing.
double increment(double a, double b) {
  if (a == kNegInf) return kNegInf;
  return a - b;
}

double linear_increment(double dphi, double slope) {
  if (slope == kNegInf) return kNegInf;
  return dphi * slope;
}

}  // namespace

double log_mean_exp(std::span<const double> x) {
  const auto& k = simd::kernels();
  const double m = k.max(x.data(), x.size());
  if (!std::isfinite(m)) return m;
  const double s = k.sum_exp(x.data(), x.size(), m);
  return m + std::log(s / static_cast<double>(x.size()));
}

void normalize_log_weights(Vec& lw) {
  const double c = log_mean_exp(std::span<const double>(lw.data(), lw.size()));
  if (!std::isfinite(c)) fail(ErrorKind::NonFiniteWeight, "all particle weights vanished");
  lw.array() -= c;
}

double compute_ess(std::span<const double> log_weights) {
  return ess_of(log_weights.data(), log_weights.size());
}

ParticleSystem make_stage0(const Bridge& bridge, const SmcConfig& config, const RowMat* values) {
  const std::size_t n = static_cast<std::size_t>(config.n_particles);
  const std::size_t d = bridge.dim();
  ParticleSystem ps;
  if (values != nullptr) {
    if (static_cast<std::size_t>(values->rows()) != n || static_cast<std::size_t>(values->cols()) != d) {
      fail(ErrorKind::LayoutMismatch, "stage-0 values do not match the bridge dimension or particle count");
    }
    ps.values = *values;
  } else {
    if (!bridge.has_direct_stage0()) {
      fail(ErrorKind::InvalidConfig, "bridge " + bridge.strategy() + " needs an initial swarm");
    }
    ps.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    parallel_for(n, [&](std::size_t i) {
      Rng rng(RngKey{config.seed, 0, i, substep::kStage0Draw});
      bridge.sample_stage0(rng, ps.values.row(static_cast<Eigen::Index>(i)).data());
    });
  }
  ps.cache.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(bridge.cache_width()));
  parallel_for(n, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    bridge.evaluate(ps.values.row(r).data(), RngKey{config.seed, 0, i, substep::kStage0Eval},
                    ps.cache.row(r).data());
  });
  ps.log_weights = Vec::Zero(static_cast<Eigen::Index>(n));
  ps.stage = 0;
  ps.phi = 0.0;
  return ps;
}

Correction correction_step(ParticleSystem& particles, const Bridge& bridge, double phi_new) {
  if (!(phi_new > particles.phi)) fail(ErrorKind::InvalidConfig, "correction requires phi_new > phi");
  const std::size_t n = particles.size();
  const double phi_old = particles.phi;
  Correction out;
  out.incr_log_weights.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double* c = particles.cache.row(static_cast<Eigen::Index>(i)).data();
    const double w = bridge.linear_in_phi()
                         ? linear_increment(phi_new - phi_old, bridge.slope(c))
                         : increment(bridge.log_likelihood(phi_new, c), bridge.log_likelihood(phi_old, c));
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity()) {
      fail(ErrorKind::NonFiniteWeight, "incremental weight of particle " + std::to_string(i) + " is not finite");
    }
    out.incr_log_weights[static_cast<Eigen::Index>(i)] = w;
  }
  Vec x = particles.log_weights + out.incr_log_weights;
  out.log_mdd_increment = log_mean_exp(std::span<const double>(x.data(), x.size()));
  if (!std::isfinite(out.log_mdd_increment)) {
    fail(ErrorKind::NonFiniteWeight, "all incremental weights vanished");
  }
  x.array() -= out.log_mdd_increment;
  particles.log_weights = std::move(x);
  particles.phi = phi_new;
  return out;
}

double solve_next_phi(const ParticleSystem& particles, const Bridge& bridge, double alpha, double ess_star) {
  const std::size_t n = particles.size();
  const double phi_old = particles.phi;
  const double terminal = bridge.terminal_phi();
  const double target = alpha * ess_star;
  const double* lw = particles.log_weights.data();
  const auto& k = simd::kernels();

  std::vector<double> x(n);
  std::vector<double> slope;
  std::vector<double> base;
  if (bridge.linear_in_phi()) {
    slope.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      slope[i] = bridge.slope(particles.cache.row(static_cast<Eigen::Index>(i)).data());
    }
  } else {
    base.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      base[i] = bridge.relaxed_log_likelihood(phi_old, particles.cache.row(static_cast<Eigen::Index>(i)).data());
    }
  }
  auto f = [&](double phi) {
    if (bridge.linear_in_phi()) {
      k.axpy(lw, slope.data(), n, phi - phi_old, x.data());
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double a = bridge.relaxed_log_likelihood(phi, particles.cache.row(static_cast<Eigen::Index>(i)).data());
        x[i] = lw[i] + increment(a, base[i]);
      }
    }
    for (double v : x) {
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        fail(ErrorKind::NonFiniteWeight, "non-finite weight while solving for the next exponent");
      }
    }
    return ess_of(x.data(), n) - target;
  };

  if (f(terminal) >= 0.0) return terminal;
  double lo = phi_old;
  double hi = terminal;
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo < 0.0) fail(ErrorKind::BracketFailure, "ESS target not bracketed at the current exponent");
  const double f_tol = 1e-9 * static_cast<double>(n);
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 1e-8 && std::min(f_lo, -f_hi) <= f_tol) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm >= 0.0) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
      f_hi = fm;
    }
  }
  double phi = (f_lo <= -f_hi && lo > phi_old) ? lo : hi;
  phi = std::min(bridge.snap_phi(phi, phi_old), terminal);
  return phi;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, Rng& rng) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> idx(n);
  double total = 0.0;
  for (double w : weights) total += w;
  const double step = total / static_cast<double>(n);
  const double u = rng.uniform();
  std::size_t j = 0;
  double cum = weights[0];
  for (std::size_t k = 0; k < n; ++k) {
    const double point = (u + static_cast<double>(k)) * step;
    while (cum < point && j + 1 < n) cum += weights[++j];
    idx[k] = j;
  }
  return idx;
}

void resample_particles(ParticleSystem& particles, const std::vector<std::size_t>& idx) {
  RowMat values(particles.values.rows(), particles.values.cols());
  RowMat cache(particles.cache.rows(), particles.cache.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    const auto s = static_cast<Eigen::Index>(idx[k]);
    values.row(r) = particles.values.row(s);
    cache.row(r) = particles.cache.row(s);
  }
  particles.values = std::move(values);
  particles.cache = std::move(cache);
  particles.log_weights.setZero();
}

std::vector<std::vector<std::size_t>> random_blocks(std::size_t d, int n_blocks, Rng& rng) {
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = d; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  const std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(n_blocks), std::max<std::size_t>(d, 1));
  std::vector<std::vector<std::size_t>> blocks(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = b * d / nb;
    const std::size_t hi = (b + 1) * d / nb;
    blocks[b].assign(perm.begin() + static_cast<std::ptrdiff_t>(lo), perm.begin() + static_cast<std::ptrdiff_t>(hi));
  }
  return blocks;
}

double scale_multiplier(double accept_rate, double target) {
  const double e = std::exp(16.0 * (accept_rate - target));
  return 0.95 + 0.10 * e / (1.0 + e);
}

double adapt_scale(double c_prev, double accept_rate, double target) {
  return c_prev * scale_multiplier(accept_rate, target);
}

double mutate(ParticleSystem& particles, const Bridge& bridge, double phi, const MutationTuning& tuning,
              const SmcConfig& config, long long* n_evals) {
  const std::size_t n = particles.size();
  const std::size_t d = particles.dim();
  const auto stage = static_cast<std::uint64_t>(particles.stage);
  Rng part_rng(RngKey{config.seed, stage, kSwarmIndex, substep::kPartition});
  const auto blocks = random_blocks(d, config.n_blocks, part_rng);
  const std::size_t nb = blocks.size();

  std::vector<Mat> chol(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t m = blocks[b].size();
    Mat sub(m, m);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) sub(r, c) = tuning.proposal_cov(blocks[b][r], blocks[b][c]);
    }
    Eigen::LLT<Mat> llt(sub);
    if (llt.info() == Eigen::Success) {
      chol[b] = tuning.scale * Mat(llt.matrixL());
    } else {
      Eigen::SelfAdjointEigenSolver<Mat> es(sub);
      chol[b] = tuning.scale * es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
  }

  const std::size_t w = bridge.cache_width();
  std::vector<long long> accepted(n, 0);
  std::vector<long long> evals(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    std::vector<double> theta(particles.values.row(row).data(), particles.values.row(row).data() + d);
    std::vector<double> cache(particles.cache.row(row).data(), particles.cache.row(row).data() + w);
    std::vector<double> prop(d), prop_cache(w), z;
    double cur = bridge.log_prior(theta.data()) + bridge.log_likelihood(phi, cache.data());
    for (int s = 0; s < config.n_mh; ++s) {
      for (std::size_t b = 0; b < nb; ++b) {
        const RngKey key{config.seed, stage, i, static_cast<std::uint64_t>(s) * nb + b};
        Rng rng(key);
        const auto& blk = blocks[b];
        z.resize(blk.size());
        rng.fill_normal(z);
        prop = theta;
        for (std::size_t r = 0; r < blk.size(); ++r) {
          double step = 0.0;
          for (std::size_t c = 0; c <= r; ++c) step += chol[b](r, c) * z[c];
          prop[blk[r]] += step;
        }
        const double log_u = std::log(rng.uniform());
        const double lp = bridge.log_prior(prop.data());
        if (lp == kNegInf) continue;
        bridge.evaluate(prop.data(), key.child(kProposalEvalTag), prop_cache.data());
        ++evals[i];
        const double cand = lp + bridge.log_likelihood(phi, prop_cache.data());
        if (std::isnan(cand) || cand == std::numeric_limits<double>::infinity()) {
          fail(ErrorKind::NonFiniteProposalDensity,
               "proposal kernel is " + std::to_string(cand) + " for particle " + std::to_string(i));
        }
        const double log_ratio = cand - cur;
        if (std::isnan(log_ratio)) continue;
        if (log_u < log_ratio) {
          theta.swap(prop);
          cache.swap(prop_cache);
          cur = cand;
          ++accepted[i];
        }
      }
    }
    std::copy(theta.begin(), theta.end(), particles.values.row(row).data());
    std::copy(cache.begin(), cache.end(), particles.cache.row(row).data());
  });
  if (n_evals != nullptr) *n_evals += std::accumulate(evals.begin(), evals.end(), 0LL);
  const long long acc = std::accumulate(accepted.begin(), accepted.end(), 0LL);
  return static_cast<double>(acc) / (static_cast<double>(n) * config.n_mh * static_cast<double>(nb));
}

WeightedMoments weighted_moments(const ParticleSystem& particles) {
  const std::size_t n = particles.size();
  const std::size_t d = particles.dim();
  const Vec w = particles.weights();
  WeightedMoments m;
  m.mean = Vec::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    m.mean += w[static_cast<Eigen::Index>(i)] * particles.values.row(static_cast<Eigen::Index>(i)).transpose();
  }
  m.mean /= static_cast<double>(n);
  m.cov = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const Vec dev = particles.values.row(static_cast<Eigen::Index>(i)).transpose() - m.mean;
    m.cov.noalias() += w[static_cast<Eigen::Index>(i)] * dev * dev.transpose();
  }
  m.cov /= static_cast<double>(n);
  m.cov = 0.5 * (m.cov + m.cov.transpose()).eval();
  if (d > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m.cov, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 1e-10) {
      const double avg = m.cov.trace() / static_cast<double>(d);
      const double ridge = avg > 0.0 ? 1e-8 * avg : 1e-8;
      m.cov.diagonal().array() += ridge;
    }
  }
  return m;
}

double log_mdd_ratio(const SmcRunResult& result) {
  if (!result.complete) fail(ErrorKind::IncompleteRun, "run did not reach its terminal exponent");
  double s = 0.0;
  for (double v : result.log_mdd_increments) s += v;
  return s;
}

SmcRunResult run_smc(const Bridge& bridge, const SmcConfig& config, const ParticleSystem* init) {
  config.validate();
  const auto t_start = Clock::now();
  SmcRunResult res;
  res.terminal_phi = bridge.terminal_phi();
  const auto models = bridge.evaluated_models();
  auto count = [&](long long k) {
    for (const auto& m : models) res.likelihood_evals[m] += k;
  };
  for (const auto& m : models) res.likelihood_evals[m] = 0;

  ParticleSystem ps;
  if (init != nullptr) {
    if (init->phi != 0.0) fail(ErrorKind::InvalidConfig, "initial swarm must be at stage 0");
    if (init->size() != static_cast<std::size_t>(config.n_particles) || init->dim() != bridge.dim()) {
      fail(ErrorKind::LayoutMismatch, "initial swarm does not match the bridge");
    }
    if (static_cast<std::size_t>(init->cache.cols()) != bridge.cache_width() ||
        init->cache.rows() != init->values.rows()) {
      fail(ErrorKind::MissingCache, "initial swarm carries no likelihood cache for this bridge");
    }
    ps = *init;
  } else {
    ps = make_stage0(bridge, config);
    count(config.n_particles);
  }
  res.stage0_seconds = seconds_since(t_start);

  const double n = static_cast<double>(config.n_particles);
  MutationTuning tuning;
  tuning.scale = config.initial_scale;
  int degenerate = 0;
  while (ps.phi < res.terminal_phi) {
    if (res.n_stages >= config.max_stages) {
      fail(ErrorKind::StageCapExceeded, "exponent " + std::to_string(ps.phi) + " after " +
                                            std::to_string(res.n_stages) + " stages");
    }
    const auto t_stage = Clock::now();
    const int stage = res.n_stages + 1;

    const double ess_star = compute_ess(ps.log_weights);
    const double phi_new = solve_next_phi(ps, bridge, config.alpha, ess_star);
    const Correction corr = correction_step(ps, bridge, phi_new);
    const double ess = compute_ess(ps.log_weights);
    if (ess < 1.0 + 1e-9) {
      if (++degenerate >= 2) fail(ErrorKind::DegenerateSwarm, "ESS collapsed to one particle twice in a row");
    } else {
      degenerate = 0;
    }

    tuning.proposal_cov = weighted_moments(ps).cov;
    ps.stage = stage;
    const bool resample = ess < config.resample_threshold * n;
    if (resample) {
      Rng rng(RngKey{config.seed, static_cast<std::uint64_t>(stage), kSwarmIndex, substep::kResample});
      const Vec w = ps.weights();
      resample_particles(ps, systematic_resample(std::span<const double>(w.data(), w.size()), rng));
    }
    if (stage > 1) tuning.scale = adapt_scale(tuning.scale, tuning.last_accept_rate, config.target_accept);
    long long evals = 0;
    tuning.last_accept_rate = mutate(ps, bridge, phi_new, tuning, config, &evals);
    count(evals);

    res.n_stages = stage;
    res.schedule.push_back(phi_new);
    res.ess_history.push_back(ess);
    res.resampled_flags.push_back(resample);
    res.accept_rates.push_back(tuning.last_accept_rate);
    res.scales.push_back(tuning.scale);
    res.log_mdd_increments.push_back(corr.log_mdd_increment);
    res.wall_times.push_back(seconds_since(t_stage));
  }
  res.final_particles = std::move(ps);
  res.complete = true;
  res.total_seconds = seconds_since(t_start);
  return res;
}

}  // namespace tsmc
