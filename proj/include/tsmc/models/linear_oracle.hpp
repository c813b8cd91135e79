#pragma once

#include <utility>
#include <vector>

#include "tsmc/bridges/model.hpp"
#include "tsmc/filters/bspf.hpp"
#include "tsmc/filters/kalman.hpp"

namespace tsmc {

/// y_t = mu + s_t + e_t per dimension, s_t = a s_{t-1} + eta_t with
/// eta ~ N(0, q), e ~ N(0, r). The unknown parameter is mu with prior
/// N(prior_mean, prior_var I). M1 uses noise variance r (1 + gap). With
/// m0_offset, M0 also carries delta (added to the first series) with prior
/// N(0, offset_var), an approximating-model-only parameter.
struct LinearOracleSpec {
  int dims = 2;
  int periods = 50;
  double ar = 0.7;
  double state_var = 0.5;
  double noise_var = 1.0;
  double gap = 0.0;
  double prior_mean = 0.0;
  double prior_var = 4.0;
  bool m0_offset = false;
  double offset_var = 1.0;

  void validate() const;
};

/// Simulated from M1 at mu = (0.5, -0.5, 0.5, ...).
Mat linear_oracle_simulate(const LinearOracleSpec& spec, Rng& rng);

/// State-space form at given mu (and delta), noise variance r * noise_scale.
LinearGaussianSS oracle_state_space(const LinearOracleSpec& spec, const Vec& mu, double noise_scale, double delta = 0.0);

/// Exact log MDD with mu (and delta) integrated out as constant states.
double oracle_exact_log_mdd(const LinearOracleSpec& spec, const Mat& data, bool m1);

/// Particle-filter form of the same state space.
class OracleStateModel final : public StateModel {
 public:
  OracleStateModel(const LinearOracleSpec& spec, Vec mu, double noise_scale, const Mat& data);

  std::size_t state_dim() const override { return static_cast<std::size_t>(spec_.dims); }
  std::size_t n_periods() const override { return static_cast<std::size_t>(data_.rows()); }
  void initialize(Rng& rng, double* states, std::size_t m) const override;
  void propagate(std::size_t t, Rng& rng, double* states, std::size_t m) const override;
  void log_measurement(std::size_t t, const double* states, std::size_t m, double* out) const override;

 private:
  LinearOracleSpec spec_;
  Vec mu_;
  double noise_var_;
  const Mat& data_;
};

enum class OracleLikelihood { Kalman, ParticleFilter };

class LinearOracleModel final : public Model {
 public:
  LinearOracleModel(LinearOracleSpec spec, Mat data, bool m1, OracleLikelihood kind = OracleLikelihood::Kalman,
                    BspfConfig bspf = {});

  std::string name() const override { return m1_ ? "oracle_m1" : "oracle_m0"; }
  const std::vector<ParamInfo>& params() const override { return info_; }
  double log_prior(const double* theta) const override;
  double log_prior_block(const double* theta, ParamTag tag) const override;
  void sample_prior(Rng& rng, double* theta) const override;
  bool deterministic() const override { return kind_ == OracleLikelihood::Kalman; }
  std::size_t n_periods() const override { return static_cast<std::size_t>(data_.rows()); }
  void log_likelihood_terms(const double* theta, const RngKey& key, std::size_t n_terms,
                            double* out) const override;
  Vec reference_point() const override;

  /// Exact log MDD of this model.
  double exact_log_mdd() const { return oracle_exact_log_mdd(spec_, data_, m1_); }

 private:
  LinearOracleSpec spec_;
  Mat data_;
  bool m1_;
  OracleLikelihood kind_;
  BspfConfig bspf_;
  std::vector<ParamInfo> info_;
};

std::pair<ModelPtr, ModelPtr> linear_oracle_pair(const LinearOracleSpec& spec, const Mat& data,
                                                 OracleLikelihood m1_kind = OracleLikelihood::Kalman,
                                                 BspfConfig bspf = {});

}  // namespace tsmc
