#include "tsmc/models/var_sv.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "tsmc/core/error.hpp"
#include "tsmc/simd/kernels.hpp"

namespace tsmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_logistic(double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_data(const Mat& data) {
  if (data.cols() != 2) fail(ErrorKind::InvalidConfig, "VAR data must have two columns");
  if (data.rows() < 2) fail(ErrorKind::InvalidConfig, "VAR data needs at least two rows");
  if (!data.allFinite()) fail(ErrorKind::InvalidConfig, "VAR data must be finite");
}

}  // namespace

VarSvParams varsv_preset(const std::string& name) {
  VarSvParams p;
  p.phi1 << 0.6, 0.3, 0.0, 0.4;
  p.phic << 0.0, 0.0;
  Mat l(2, 2);
  l << 1.0, 0.0, 0.7, 1.0;
  p.sigma = l * l.transpose();
  if (name == "dgp1") {
    p.rho << 0.50, 0.90;
    p.xi << 0.20, 0.20;
  } else if (name == "dgp2") {
    p.rho << 0.20, 0.60;
    p.xi << 0.80, 0.90;
  } else if (name == "dgp3") {
    p.rho << 0.50, 0.90;
    p.xi << 0.80, 0.90;
  } else {
    fail(ErrorKind::InvalidConfig, "unknown VAR-SV preset '" + name + "'");
  }
  return p;
}

std::vector<std::string> varsv_preset_names() { return {"dgp1", "dgp2", "dgp3"}; }

VarSvSample varsv_simulate(const VarSvParams& p, int periods, Rng& rng, int burn_in) {
  if (periods < 2) fail(ErrorKind::InvalidConfig, "need at least two periods, got " + std::to_string(periods));
  const Eigen::EigenSolver<Mat> es(p.phi1, false);
  if (es.eigenvalues().cwiseAbs().maxCoeff() >= 1.0) fail(ErrorKind::InvalidConfig, "phi1 is not stationary");
  Eigen::LLT<Mat> llt(p.sigma);
  if (llt.info() != Eigen::Success) fail(ErrorKind::SingularSigma, "sigma is not positive definite");
  const Mat l = llt.matrixL();
  VarSvSample out;
  out.data.resize(periods, 2);
  out.vol.resize(periods, 2);
  Vec y = Vec::Zero(2);
  Vec h = Vec::Zero(2);
  for (int t = -burn_in; t < periods; ++t) {
    Vec eps(2);
    for (int i = 0; i < 2; ++i) {
      h[i] = p.rho[i] * h[i] + p.xi[i] * rng.normal();
      eps[i] = std::exp(0.5 * h[i]) * rng.normal();
    }
    y = p.phi1 * y + p.phic + l * eps;
    if (t >= 0) {
      out.data.row(t) = y.transpose();
      out.vol.row(t) = h.array().exp().transpose();
    }
  }
  return out;
}

void var_loglik_terms(const VarSvParams& p, const Mat& data, std::size_t n_terms, double* out) {
  check_data(data);
  Eigen::LLT<Mat> llt(p.sigma);
  if (llt.info() != Eigen::Success) fail(ErrorKind::SingularSigma, "sigma is not positive definite");
  const Mat l = llt.matrixL();
  const double c = -std::log(2.0 * std::numbers::pi) - std::log(l(0, 0)) - std::log(l(1, 1));
  for (std::size_t t = 0; t < n_terms; ++t) {
    const auto r = static_cast<Eigen::Index>(t + 1);
    const Vec u = data.row(r).transpose() - p.phi1 * data.row(r - 1).transpose() - p.phic;
    const double w1 = u[0] / l(0, 0);
    const double w2 = (u[1] - l(1, 0) * w1) / l(1, 1);
    out[t] = c - 0.5 * (w1 * w1 + w2 * w2);
  }
}

double var_loglik(const VarSvParams& p, const Mat& data) {
  std::vector<double> terms(static_cast<std::size_t>(data.rows()) - 1);
  var_loglik_terms(p, data, terms.size(), terms.data());
  double s = 0.0;
  for (double v : terms) s += v;
  return s;
}

std::vector<ParamInfo> varsv_param_info(bool with_sv) {
  std::vector<ParamInfo> info = {
      {"Phi1[1,1]", "real", ParamTag::Common},    {"Phi1[1,2]", "real", ParamTag::Common},
      {"Phic[1]", "real", ParamTag::Common},      {"Phi1[2,1]", "real", ParamTag::Common},
      {"Phi1[2,2]", "real", ParamTag::Common},    {"Phic[2]", "real", ParamTag::Common},
      {"log L[1,1]", "positive (log)", ParamTag::Common}, {"L[2,1]", "real", ParamTag::Common},
      {"log L[2,2]", "positive (log)", ParamTag::Common},
  };
  if (with_sv) {
    info.push_back({"logit rho[1]", "unit (logit)", ParamTag::M1Only});
    info.push_back({"logit rho[2]", "unit (logit)", ParamTag::M1Only});
    info.push_back({"log xi[1]", "positive (log)", ParamTag::M1Only});
    info.push_back({"log xi[2]", "positive (log)", ParamTag::M1Only});
  }
  return info;
}

void encode_varsv(const VarSvParams& p, bool with_sv, double* theta) {
  for (int eq = 0; eq < 2; ++eq) {
    theta[3 * eq + 0] = p.phi1(eq, 0);
    theta[3 * eq + 1] = p.phi1(eq, 1);
    theta[3 * eq + 2] = p.phic[eq];
  }
  Eigen::LLT<Mat> llt(p.sigma);
  if (llt.info() != Eigen::Success) fail(ErrorKind::SingularSigma, "sigma is not positive definite");
  const Mat l = llt.matrixL();
  theta[6] = std::log(l(0, 0));
  theta[7] = l(1, 0);
  theta[8] = std::log(l(1, 1));
  if (with_sv) {
    for (int i = 0; i < 2; ++i) {
      theta[9 + i] = std::log(p.rho[i] / (1.0 - p.rho[i]));
      theta[11 + i] = std::log(p.xi[i]);
    }
  }
}

VarSvParams decode_varsv(const double* theta, bool with_sv) {
  VarSvParams p;
  for (int eq = 0; eq < 2; ++eq) {
    p.phi1(eq, 0) = theta[3 * eq + 0];
    p.phi1(eq, 1) = theta[3 * eq + 1];
    p.phic[eq] = theta[3 * eq + 2];
  }
  Mat l = Mat::Zero(2, 2);
  l(0, 0) = std::exp(theta[6]);
  l(1, 0) = theta[7];
  l(1, 1) = std::exp(theta[8]);
  p.sigma = l * l.transpose();
  if (with_sv) {
    for (int i = 0; i < 2; ++i) {
      p.rho[i] = logistic(theta[9 + i]);
      p.xi[i] = std::exp(theta[11 + i]);
    }
  }
  return p;
}

double log_cholesky_jacobian(double log_l11, double log_l22) {
  return 2.0 * std::numbers::ln2 + 3.0 * log_l11 + 2.0 * log_l22;
}

VarSvStateModel::VarSvStateModel(const VarSvParams& p, const Mat& data) : rho_(p.rho), xi_(p.xi) {
  check_data(data);
  Eigen::LLT<Mat> llt(p.sigma);
  if (llt.info() != Eigen::Success) fail(ErrorKind::SingularSigma, "sigma is not positive definite");
  const Mat l = llt.matrixL();
  log_norm_ = -std::log(2.0 * std::numbers::pi) - std::log(l(0, 0)) - std::log(l(1, 1));
  const auto periods = static_cast<std::size_t>(data.rows()) - 1;
  e1sq_.resize(periods);
  e2sq_.resize(periods);
  for (std::size_t t = 0; t < periods; ++t) {
    const auto r = static_cast<Eigen::Index>(t + 1);
    const Vec u = data.row(r).transpose() - p.phi1 * data.row(r - 1).transpose() - p.phic;
    const double w1 = u[0] / l(0, 0);
    const double w2 = (u[1] - l(1, 0) * w1) / l(1, 1);
    e1sq_[t] = w1 * w1;
    e2sq_[t] = w2 * w2;
  }
}

void VarSvStateModel::initialize(Rng& rng, double* states, std::size_t m) const {
  rng.fill_normal(std::span<double>(states, 2 * m));
  for (int i = 0; i < 2; ++i) {
    const double sd = xi_[i] / std::sqrt(std::max(1.0 - rho_[i] * rho_[i], 1e-10));
    double* h = states + static_cast<std::size_t>(i) * m;
    for (std::size_t j = 0; j < m; ++j) h[j] *= sd;
  }
}

void VarSvStateModel::propagate(std::size_t, Rng& rng, double* states, std::size_t m) const {
  thread_local std::vector<double> z;
  z.resize(2 * m);
  rng.fill_normal(z);
  const auto& k = simd::kernels();
  k.affine_update(states, m, rho_[0], xi_[0], z.data());
  k.affine_update(states + m, m, rho_[1], xi_[1], z.data() + m);
}

void VarSvStateModel::log_measurement(std::size_t t, const double* states, std::size_t m, double* out) const {
  simd::kernels().sv_logpdf(states, states + m, m, e1sq_[t], e2sq_[t], log_norm_, out);
}

VarSvPrior VarSvPrior::from_data(const Mat& data) {
  check_data(data);
  const auto [y, x] = minnesota_dummies(MinnesotaHyper::from_sample(data));
  VarSvPrior p;
  p.mniw = mniw_from_dummies(y, x);
  return p;
}

double VarSvPrior::log_prior_common(const double* theta) const {
  for (std::size_t i = 0; i < kVarDim; ++i) {
    if (!std::isfinite(theta[i])) return kNegInf;
  }
  const VarSvParams p = decode_varsv(theta, false);
  Mat phi(3, 2);
  phi.topRows(2) = p.phi1.transpose();
  phi.row(2) = p.phic.transpose();
  return mniw.log_density(phi, p.sigma) + log_cholesky_jacobian(theta[6], theta[8]);
}

double VarSvPrior::log_prior_sv(const double* theta) const {
  double lp = 0.0;
  const double s2 = xi_scale * xi_scale;
  const double nu = xi_dof;
  const double log_const = 0.5 * nu * std::log(0.5 * nu) - std::lgamma(0.5 * nu) + nu * std::log(xi_scale);
  for (int i = 0; i < 2; ++i) {
    const double a = theta[9 + i];
    const double u = theta[11 + i];
    if (!std::isfinite(a) || !std::isfinite(u)) return kNegInf;
    // rho ~ U[0,1] in logit coordinates
    lp += log_logistic(a) + log_logistic(-a);
    // xi^2 ~ scaled inverse chi-square, mapped to u = log xi
    const double x = std::exp(2.0 * u);
    lp += log_const - (0.5 * nu + 1.0) * 2.0 * u - 0.5 * nu * s2 / x + std::numbers::ln2 + 2.0 * u;
  }
  return lp;
}

void VarSvPrior::sample_common(Rng& rng, double* theta) const {
  const auto [phi, sigma] = mniw.sample(rng);
  VarSvParams p;
  p.phi1 = phi.topRows(2).transpose();
  p.phic = phi.row(2).transpose();
  p.sigma = sigma;
  encode_varsv(p, false, theta);
}

void VarSvPrior::sample_sv(Rng& rng, double* theta) const {
  std::chi_squared_distribution<double> chi(xi_dof);
  for (int i = 0; i < 2; ++i) {
    const double rho = rng.uniform();
    theta[9 + i] = std::log(rho / (1.0 - rho));
    const double xi2 = xi_dof * xi_scale * xi_scale / chi(rng);
    theta[11 + i] = 0.5 * std::log(xi2);
  }
}

VarModel::VarModel(Mat data, VarSvPrior prior)
    : data_(std::move(data)), prior_(std::move(prior)), info_(varsv_param_info(false)) {
  check_data(data_);
}

double VarModel::log_prior_block(const double* theta, ParamTag tag) const {
  return tag == ParamTag::Common ? prior_.log_prior_common(theta) : 0.0;
}

void VarModel::log_likelihood_terms(const double* theta, const RngKey&, std::size_t n_terms, double* out) const {
  var_loglik_terms(decode_varsv(theta, false), data_, n_terms, out);
}

Vec VarModel::reference_point() const {
  VarSvParams p;
  p.phi1 = prior_.mniw.mean.topRows(2).transpose();
  p.phic = prior_.mniw.mean.row(2).transpose();
  p.sigma = prior_.mniw.sigma_mean();
  Vec theta(kVarDim);
  encode_varsv(p, false, theta.data());
  return theta;
}

VarSvModel::VarSvModel(Mat data, VarSvPrior prior, BspfConfig bspf)
    : data_(std::move(data)), prior_(std::move(prior)), bspf_(bspf), info_(varsv_param_info(true)) {
  check_data(data_);
}

double VarSvModel::log_prior(const double* theta) const {
  const double a = prior_.log_prior_common(theta);
  if (a == kNegInf) return a;
  return a + prior_.log_prior_sv(theta);
}

double VarSvModel::log_prior_block(const double* theta, ParamTag tag) const {
  if (tag == ParamTag::Common) return prior_.log_prior_common(theta);
  if (tag == ParamTag::M1Only) return prior_.log_prior_sv(theta);
  return 0.0;
}

void VarSvModel::sample_prior(Rng& rng, double* theta) const {
  prior_.sample_common(rng, theta);
  prior_.sample_sv(rng, theta);
}

void VarSvModel::log_likelihood_terms(const double* theta, const RngKey& key, std::size_t n_terms,
                                      double* out) const {
  const VarSvStateModel sm(decode_varsv(theta, true), data_);
  bspf_loglik(sm, bspf_, key, n_terms, out);
}

Vec VarSvModel::reference_point() const {
  VarSvParams p;
  p.phi1 = prior_.mniw.mean.topRows(2).transpose();
  p.phic = prior_.mniw.mean.row(2).transpose();
  p.sigma = prior_.mniw.sigma_mean();
  p.rho << 0.5, 0.5;
  p.xi << prior_.xi_scale, prior_.xi_scale;
  Vec theta(kVarSvDim);
  encode_varsv(p, true, theta.data());
  return theta;
}

std::pair<ModelPtr, ModelPtr> varsv_model_pair(const Mat& data, const VarSvPrior& prior, const BspfConfig& bspf) {
  return {std::make_shared<VarModel>(data, prior), std::make_shared<VarSvModel>(data, prior, bspf)};
}

}  // namespace tsmc
