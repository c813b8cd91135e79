#pragma once

#include <string>
#include <vector>

#include "tsmc/smc/bridge.hpp"

namespace tsmc {

struct NormalDensity {
  double mean = 0.0;
  double sd = 1.0;
  double log_pdf(double x) const;
  double pdf(double x) const;
};

/// Target N(0,1) reached from the proposal N(mu, sigma^2).
struct GaussianToySpec {
  double mu = -3.0;
  double sigma = 0.2;
  double target_mean = 0.0;
  double target_sd = 1.0;

  void validate() const;
};

/// Geometric bridge between two normal densities. The densities play the
/// posterior role, so the prior term is flat and stage 0 is sampled directly.
class ToyBridge final : public Bridge {
 public:
  explicit ToyBridge(const GaussianToySpec& spec);

  std::string strategy() const override { return "toy"; }
  std::size_t dim() const override { return 1; }
  std::vector<ParamInfo> layout() const override { return {{"theta", "real", ParamTag::Common}}; }
  std::size_t cache_width() const override { return 2; }
  double log_prior(const double*) const override { return 0.0; }
  void evaluate(const double* theta, const RngKey& key, double* cache) const override;
  double log_likelihood(double phi, const double* cache) const override;
  bool linear_in_phi() const override { return true; }
  double slope(const double* cache) const override { return cache[0] - cache[1]; }
  void sample_stage0(Rng& rng, double* theta) const override;
  std::vector<std::string> evaluated_models() const override { return {"toy"}; }

  /// Mean and SD of the normalised bridge density at phi.
  NormalDensity bridge_density(double phi) const;

 private:
  GaussianToySpec spec_;
  NormalDensity target_, proposal_;
};

/// 1 minus the area under min(p0, p1), by adaptive Simpson quadrature.
/// Throws QuadratureNonConvergence.
double overlap_discrepancy(const NormalDensity& p0, const NormalDensity& p1, double tol = 1e-8);

/// The (mu, sigma) grid of the Gaussian illustration.
std::vector<double> toy_mu_grid();
std::vector<double> toy_sigma_grid();

}  // namespace tsmc
