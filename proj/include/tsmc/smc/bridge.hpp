#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsmc/core/rng.hpp"

namespace tsmc {

enum class ParamTag { Common, M0Only, M1Only };

std::string to_string(ParamTag tag);

struct ParamInfo {
  std::string name;
  /// "real", "positive (log)", "unit (logit)", ... for reporting only; the
  /// sampler always moves in unconstrained coordinates.
  std::string support;
  ParamTag tag = ParamTag::Common;
};

/// The stage-n target pi_n(theta) ∝ p_n(Y|theta) p(theta) seen by the sampler.
///
/// Likelihood ingredients are evaluated once per particle into a fixed-width
/// cache row; the tempered log-likelihood at any phi is then a cheap function
/// of that row. Stochastic likelihood estimates therefore stay frozen between
/// proposals.
class Bridge {
 public:
  virtual ~Bridge() = default;

  virtual std::string strategy() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::vector<ParamInfo> layout() const = 0;
  virtual std::size_t cache_width() const = 0;

  /// -inf off support.
  virtual double log_prior(const double* theta) const = 0;
  /// Fill `cache` with the likelihood ingredients at theta.
  virtual void evaluate(const double* theta, const RngKey& key, double* cache) const = 0;
  /// log p_n(Y|theta) at exponent phi.
  virtual double log_likelihood(double phi, const double* cache) const = 0;

  /// Bridges with log_likelihood(phi) = phi * slope exactly (up to a phi-free
  /// term absent from incremental weights) return true and implement slope().
  virtual bool linear_in_phi() const { return false; }
  virtual double slope(const double* cache) const;

  /// Continuous surrogate of log_likelihood used by the schedule solver.
  virtual double relaxed_log_likelihood(double phi, const double* cache) const {
    return log_likelihood(phi, cache);
  }
  /// Map a solver root to an attainable exponent in (phi_old, 1].
  virtual double snap_phi(double phi, double /*phi_old*/) const { return phi; }

  /// Final exponent of the run (1 unless the bridge is a tempered run).
  virtual double terminal_phi() const { return 1.0; }

  virtual bool has_direct_stage0() const { return true; }
  virtual void sample_stage0(Rng& rng, double* theta) const = 0;

  /// Names of the models whose likelihood one evaluate() call computes.
  virtual std::vector<std::string> evaluated_models() const = 0;
};

/// phi * value with 0 * (-inf) read as 0.
inline double tempered(double phi, double value) { return phi == 0.0 ? 0.0 : phi * value; }

}  // namespace tsmc
