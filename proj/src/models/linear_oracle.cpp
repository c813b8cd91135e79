#include "tsmc/models/linear_oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tsmc/core/error.hpp"
#include "tsmc/simd/kernels.hpp"

namespace tsmc {

void LinearOracleSpec::validate() const {
  if (dims < 1) fail(ErrorKind::InvalidConfig, "oracle needs at least one series");
  if (periods < 1) fail(ErrorKind::InvalidConfig, "oracle needs at least one period");
  if (!(std::abs(ar) < 1.0)) fail(ErrorKind::InvalidConfig, "oracle AR coefficient must be stationary");
  if (!(state_var > 0.0 && noise_var > 0.0 && prior_var > 0.0 && offset_var > 0.0)) {
    fail(ErrorKind::InvalidConfig, "oracle variances must be positive");
  }
  if (!(gap >= 0.0)) fail(ErrorKind::InvalidConfig, "oracle gap must be nonnegative");
}

namespace {

Vec true_mu(int dims) {
  Vec mu(dims);
  for (int i = 0; i < dims; ++i) mu[i] = (i % 2 == 0) ? 0.5 : -0.5;
  return mu;
}

}  // namespace

Mat linear_oracle_simulate(const LinearOracleSpec& spec, Rng& rng) {
  spec.validate();
  const Vec mu = true_mu(spec.dims);
  const double sd_s = std::sqrt(spec.state_var);
  const double sd_e = std::sqrt(spec.noise_var * (1.0 + spec.gap));
  Vec s(spec.dims);
  for (int i = 0; i < spec.dims; ++i) s[i] = rng.normal() * sd_s / std::sqrt(1.0 - spec.ar * spec.ar);
  Mat y(spec.periods, spec.dims);
  for (int t = 0; t < spec.periods; ++t) {
    for (int i = 0; i < spec.dims; ++i) {
      s[i] = spec.ar * s[i] + sd_s * rng.normal();
      y(t, i) = mu[i] + s[i] + sd_e * rng.normal();
    }
  }
  return y;
}

LinearGaussianSS oracle_state_space(const LinearOracleSpec& spec, const Vec& mu, double noise_scale, double delta) {
  const int n = spec.dims;
  LinearGaussianSS m;
  m.transition = spec.ar * Mat::Identity(n, n);
  m.shock_loading = Mat::Identity(n, n);
  m.shock_cov = spec.state_var * Mat::Identity(n, n);
  m.measurement = Mat::Identity(n, n);
  m.intercept = mu;
  m.intercept[0] += delta;
  m.measurement_cov = spec.noise_var * noise_scale * Mat::Identity(n, n);
  m.init_mean = Vec::Zero(n);
  m.init_cov = (spec.state_var / (1.0 - spec.ar * spec.ar)) * Mat::Identity(n, n);
  return m;
}

double oracle_exact_log_mdd(const LinearOracleSpec& spec, const Mat& data, bool m1) {
  // Augmented state [s, mu, delta] with the constants carrying their priors.
  const int n = spec.dims;
  const bool offset = spec.m0_offset && !m1;
  const int ns = 2 * n + (offset ? 1 : 0);
  LinearGaussianSS m;
  m.transition = Mat::Identity(ns, ns);
  m.transition.topLeftCorner(n, n) *= spec.ar;
  m.shock_loading = Mat::Zero(ns, n);
  m.shock_loading.topRows(n) = Mat::Identity(n, n);
  m.shock_cov = spec.state_var * Mat::Identity(n, n);
  m.measurement = Mat::Zero(n, ns);
  m.measurement.leftCols(n) = Mat::Identity(n, n);
  m.measurement.middleCols(n, n) = Mat::Identity(n, n);
  if (offset) m.measurement(0, 2 * n) = 1.0;
  m.intercept = Vec::Zero(n);
  m.measurement_cov = spec.noise_var * (m1 ? 1.0 + spec.gap : 1.0) * Mat::Identity(n, n);
  // The filter predicts before its first update, so start one step back:
  // s_{-1} stationary maps to s_0 stationary.
  m.init_mean = Vec::Zero(ns);
  m.init_mean.segment(n, n).setConstant(spec.prior_mean);
  m.init_cov = Mat::Zero(ns, ns);
  m.init_cov.topLeftCorner(n, n) = (spec.state_var / (1.0 - spec.ar * spec.ar)) * Mat::Identity(n, n);
  m.init_cov.block(n, n, n, n) = spec.prior_var * Mat::Identity(n, n);
  if (offset) m.init_cov(2 * n, 2 * n) = spec.offset_var;
  return kalman_loglik(m, data).log_likelihood;
}

OracleStateModel::OracleStateModel(const LinearOracleSpec& spec, Vec mu, double noise_scale, const Mat& data)
    : spec_(spec), mu_(std::move(mu)), noise_var_(spec.noise_var * noise_scale), data_(data) {}

void OracleStateModel::initialize(Rng& rng, double* states, std::size_t m) const {
  const std::size_t n = state_dim();
  rng.fill_normal(std::span<double>(states, n * m));
  const double sd = std::sqrt(spec_.state_var / (1.0 - spec_.ar * spec_.ar));
  for (std::size_t j = 0; j < n * m; ++j) states[j] *= sd;
}

void OracleStateModel::propagate(std::size_t, Rng& rng, double* states, std::size_t m) const {
  const std::size_t n = state_dim();
  thread_local std::vector<double> z;
  z.resize(n * m);
  rng.fill_normal(z);
  const double sd = std::sqrt(spec_.state_var);
  for (std::size_t c = 0; c < n; ++c) simd::kernels().affine_update(states + c * m, m, spec_.ar, sd, z.data() + c * m);
}

void OracleStateModel::log_measurement(std::size_t t, const double* states, std::size_t m, double* out) const {
  const std::size_t n = state_dim();
  const double c = -0.5 * std::log(2.0 * std::numbers::pi * noise_var_);
  for (std::size_t j = 0; j < m; ++j) out[j] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    const double resid = data_(static_cast<Eigen::Index>(t), col) - mu_[col];
    simd::kernels().gauss_logpdf_acc(states + k * m, m, resid, 1.0 / noise_var_, c, out);
  }
}

LinearOracleModel::LinearOracleModel(LinearOracleSpec spec, Mat data, bool m1, OracleLikelihood kind, BspfConfig bspf)
    : spec_(spec), data_(std::move(data)), m1_(m1), kind_(kind), bspf_(bspf) {
  spec_.validate();
  if (data_.cols() != spec_.dims) fail(ErrorKind::InvalidConfig, "oracle data has the wrong number of columns");
  for (int i = 0; i < spec_.dims; ++i) info_.push_back({"mu[" + std::to_string(i + 1) + "]", "real", ParamTag::Common});
  if (!m1_ && spec_.m0_offset) info_.push_back({"delta", "real", ParamTag::M0Only});
}

double LinearOracleModel::log_prior(const double* theta) const {
  return log_prior_block(theta, ParamTag::Common) +
         (!m1_ && spec_.m0_offset ? log_prior_block(theta, ParamTag::M0Only) : 0.0);
}

double LinearOracleModel::log_prior_block(const double* theta, ParamTag tag) const {
  const double l2pi = std::log(2.0 * std::numbers::pi);
  if (tag == ParamTag::Common) {
    double lp = 0.0;
    for (int i = 0; i < spec_.dims; ++i) {
      const double z = theta[i] - spec_.prior_mean;
      lp += -0.5 * (l2pi + std::log(spec_.prior_var) + z * z / spec_.prior_var);
    }
    return lp;
  }
  if (tag == ParamTag::M0Only && !m1_ && spec_.m0_offset) {
    const double z = theta[spec_.dims];
    return -0.5 * (l2pi + std::log(spec_.offset_var) + z * z / spec_.offset_var);
  }
  return 0.0;
}

void LinearOracleModel::sample_prior(Rng& rng, double* theta) const {
  for (int i = 0; i < spec_.dims; ++i) theta[i] = rng.normal(spec_.prior_mean, std::sqrt(spec_.prior_var));
  if (!m1_ && spec_.m0_offset) theta[spec_.dims] = rng.normal(0.0, std::sqrt(spec_.offset_var));
}

void LinearOracleModel::log_likelihood_terms(const double* theta, const RngKey& key, std::size_t n_terms,
                                             double* out) const {
  const Vec mu = Eigen::Map<const Vec>(theta, spec_.dims);
  const double scale = m1_ ? 1.0 + spec_.gap : 1.0;
  const double delta = (!m1_ && spec_.m0_offset) ? theta[spec_.dims] : 0.0;
  if (kind_ == OracleLikelihood::Kalman) {
    const KalmanResult r = kalman_loglik(oracle_state_space(spec_, mu, scale, delta), data_.topRows(static_cast<Eigen::Index>(n_terms)));
    for (std::size_t t = 0; t < n_terms; ++t) out[t] = r.terms[static_cast<Eigen::Index>(t)];
    return;
  }
  Vec shifted = mu;
  shifted[0] += delta;
  const OracleStateModel sm(spec_, shifted, scale, data_);
  bspf_loglik(sm, bspf_, key, n_terms, out);
}

Vec LinearOracleModel::reference_point() const {
  Vec theta = Vec::Constant(static_cast<Eigen::Index>(dim()), spec_.prior_mean);
  if (!m1_ && spec_.m0_offset) theta[spec_.dims] = 0.0;
  return theta;
}

std::pair<ModelPtr, ModelPtr> linear_oracle_pair(const LinearOracleSpec& spec, const Mat& data,
                                                 OracleLikelihood m1_kind, BspfConfig bspf) {
  return {std::make_shared<LinearOracleModel>(spec, data, false),
          std::make_shared<LinearOracleModel>(spec, data, true, m1_kind, bspf)};
}

}  // namespace tsmc
