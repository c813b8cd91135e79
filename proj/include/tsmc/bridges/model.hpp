#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "tsmc/core/rng.hpp"
#include "tsmc/core/types.hpp"
#include "tsmc/smc/bridge.hpp"

namespace tsmc {

/// A Bayesian model: prior and likelihood over an unconstrained parameter vector.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  virtual const std::vector<ParamInfo>& params() const = 0;
  std::size_t dim() const { return params().size(); }

  /// -inf off support; includes the Jacobian of any transform.
  virtual double log_prior(const double* theta) const = 0;
  virtual void sample_prior(Rng& rng, double* theta) const = 0;
  /// Marginal log prior of the coordinates tagged `tag`, for priors that
  /// factor across tags. Throws InvalidConfig otherwise.
  virtual double log_prior_block(const double* theta, ParamTag tag) const;

  /// False when the likelihood is a particle-filter estimate.
  virtual bool deterministic() const = 0;
  virtual std::size_t n_periods() const = 0;
  /// Predictive log densities of the first n_terms periods; their partial
  /// sums are the log-likelihoods of the data prefixes. The same key gives
  /// the same leading terms whatever n_terms is.
  virtual void log_likelihood_terms(const double* theta, const RngKey& key, std::size_t n_terms,
                                    double* out) const = 0;
  virtual double log_likelihood(const double* theta, const RngKey& key) const;

  /// A representative in-support point for timing likelihood calls.
  virtual Vec reference_point() const = 0;
};

using ModelPtr = std::shared_ptr<const Model>;

/// Indices of coordinates carrying `tag`, in order.
std::vector<std::size_t> indices_with_tag(const Model& m, ParamTag tag);

}  // namespace tsmc
