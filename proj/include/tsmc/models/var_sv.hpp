#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tsmc/bridges/model.hpp"
#include "tsmc/filters/bspf.hpp"
#include "tsmc/models/minnesota.hpp"

namespace tsmc {

/// Bivariate VAR(1): y_t = phi1 y_{t-1} + phic + chol(sigma) eps_t,
/// eps_t ~ N(0, diag(d_t)), ln d_it = rho_i ln d_{i,t-1} + xi_i eta_it.
/// xi = 0 gives the homoskedastic VAR.
struct VarSvParams {
  Mat phi1 = Mat::Zero(2, 2);
  Vec phic = Vec::Zero(2);
  Mat sigma = Mat::Identity(2, 2);
  Vec rho = Vec::Zero(2);
  Vec xi = Vec::Zero(2);
};

/// "dgp1", "dgp2" or "dgp3". Throws InvalidConfig.
VarSvParams varsv_preset(const std::string& name);
std::vector<std::string> varsv_preset_names();

struct VarSvSample {
  Mat data;  // T x 2
  Mat vol;   // T x 2, d_t
};

/// Simulates T observations after a burn-in started at zero volatility and
/// zero observations. Throws InvalidConfig for T < 2 or explosive phi1.
VarSvSample varsv_simulate(const VarSvParams& params, int periods, Rng& rng, int burn_in = 200);

/// Gaussian log-likelihood of the homoskedastic VAR conditional on the first
/// row of `data` (T - 1 terms). Throws SingularSigma.
double var_loglik(const VarSvParams& params, const Mat& data);
void var_loglik_terms(const VarSvParams& params, const Mat& data, std::size_t n_terms, double* out);

/// Parameter vector (13): vec of the 3x2 stacked [phi1'; phic'], the
/// log-Cholesky coordinates (log L11, L21, log L22) of sigma, logit rho,
/// log xi. The homoskedastic model uses the first 9.
inline constexpr std::size_t kVarDim = 9;
inline constexpr std::size_t kVarSvDim = 13;
std::vector<ParamInfo> varsv_param_info(bool with_sv);
void encode_varsv(const VarSvParams& p, bool with_sv, double* theta);
VarSvParams decode_varsv(const double* theta, bool with_sv);
/// log |d vech(Sigma) / d (log L11, L21, log L22)|
double log_cholesky_jacobian(double log_l11, double log_l22);

/// Batched state model of the SV log-volatilities for the particle filter.
class VarSvStateModel final : public StateModel {
 public:
  VarSvStateModel(const VarSvParams& params, const Mat& data);

  std::size_t state_dim() const override { return 2; }
  std::size_t n_periods() const override { return e1sq_.size(); }
  void initialize(Rng& rng, double* states, std::size_t m) const override;
  void propagate(std::size_t t, Rng& rng, double* states, std::size_t m) const override;
  void log_measurement(std::size_t t, const double* states, std::size_t m, double* out) const override;

 private:
  Vec rho_, xi_;
  std::vector<double> e1sq_, e2sq_;
  double log_norm_ = 0.0;
};

struct VarSvPrior {
  MniwPrior mniw;
  double xi_scale = 0.3;  // sqrt(s^2) of the scaled inverse chi-square on xi^2
  double xi_dof = 2.0;

  /// Minnesota prior with lambda = (1, 1, 3) from the sample moments of `data`.
  static VarSvPrior from_data(const Mat& data);

  double log_prior_common(const double* theta) const;
  double log_prior_sv(const double* theta) const;
  void sample_common(Rng& rng, double* theta) const;
  void sample_sv(Rng& rng, double* theta) const;
};

/// Homoskedastic VAR with exact likelihood.
class VarModel final : public Model {
 public:
  VarModel(Mat data, VarSvPrior prior);

  std::string name() const override { return "var"; }
  const std::vector<ParamInfo>& params() const override { return info_; }
  double log_prior(const double* theta) const override { return prior_.log_prior_common(theta); }
  double log_prior_block(const double* theta, ParamTag tag) const override;
  void sample_prior(Rng& rng, double* theta) const override { prior_.sample_common(rng, theta); }
  bool deterministic() const override { return true; }
  std::size_t n_periods() const override { return static_cast<std::size_t>(data_.rows()) - 1; }
  void log_likelihood_terms(const double* theta, const RngKey& key, std::size_t n_terms,
                            double* out) const override;
  Vec reference_point() const override;

 private:
  Mat data_;
  VarSvPrior prior_;
  std::vector<ParamInfo> info_;
};

/// VAR with stochastic volatility; likelihood estimated by the bootstrap
/// particle filter.
class VarSvModel final : public Model {
 public:
  VarSvModel(Mat data, VarSvPrior prior, BspfConfig bspf);

  std::string name() const override { return "varsv"; }
  const std::vector<ParamInfo>& params() const override { return info_; }
  double log_prior(const double* theta) const override;
  double log_prior_block(const double* theta, ParamTag tag) const override;
  void sample_prior(Rng& rng, double* theta) const override;
  bool deterministic() const override { return false; }
  std::size_t n_periods() const override { return static_cast<std::size_t>(data_.rows()) - 1; }
  void log_likelihood_terms(const double* theta, const RngKey& key, std::size_t n_terms,
                            double* out) const override;
  Vec reference_point() const override;

 private:
  Mat data_;
  VarSvPrior prior_;
  BspfConfig bspf_;
  std::vector<ParamInfo> info_;
};

/// (M0, M1) = (homoskedastic VAR, VAR-SV) sharing data and prior.
std::pair<ModelPtr, ModelPtr> varsv_model_pair(const Mat& data, const VarSvPrior& prior, const BspfConfig& bspf);

}  // namespace tsmc
