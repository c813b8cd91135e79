#include "tsmc/bridges/bridges.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "tsmc/core/error.hpp"
#include "tsmc/core/parallel.hpp"

namespace tsmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kM0EvalTag = 0x6d30ULL;

double minus_inf_safe(double a, double b) {
  if (a == kNegInf) return kNegInf;
  return a - b;
}

}  // namespace

LikelihoodTempering::LikelihoodTempering(ModelPtr model, double terminal)
    : model_(std::move(model)), terminal_(terminal) {
  if (!(terminal_ >= 0.0 && terminal_ <= 1.0)) fail(ErrorKind::InvalidConfig, "terminal exponent must lie in [0,1]");
}

void LikelihoodTempering::evaluate(const double* theta, const RngKey& key, double* cache) const {
  cache[0] = model_->log_likelihood(theta, key);
}

DataTemperingPrefix::DataTemperingPrefix(ModelPtr model) : model_(std::move(model)), periods_(model_->n_periods()) {
  if (periods_ == 0) fail(ErrorKind::InvalidConfig, "data tempering needs at least one period");
}

void DataTemperingPrefix::evaluate(const double* theta, const RngKey& key, double* cache) const {
  model_->log_likelihood_terms(theta, key, periods_, cache + 1);
  cache[0] = 0.0;
  for (std::size_t t = 1; t <= periods_; ++t) cache[t] += cache[t - 1];
}

std::size_t DataTemperingPrefix::sample_size(double phi) const {
  const double x = std::floor(phi * static_cast<double>(periods_) + 1e-9);
  if (x <= 0.0) return 0;
  return std::min(periods_, static_cast<std::size_t>(x));
}

double DataTemperingPrefix::log_likelihood(double phi, const double* cache) const {
  return cache[sample_size(phi)];
}

double DataTemperingPrefix::relaxed_log_likelihood(double phi, const double* cache) const {
  const double x = phi * static_cast<double>(periods_);
  const std::size_t k = std::min(periods_, static_cast<std::size_t>(std::max(0.0, std::floor(x))));
  if (k == periods_) return cache[periods_];
  const double w = x - static_cast<double>(k);
  if (w <= 0.0) return cache[k];
  if (cache[k + 1] == kNegInf) return kNegInf;
  return (1.0 - w) * cache[k] + w * cache[k + 1];
}

double DataTemperingPrefix::snap_phi(double phi, double phi_old) const {
  const double t = static_cast<double>(periods_);
  const std::size_t next = sample_size(phi_old) + 1;
  double k = std::ceil(phi * t - 1e-9);
  k = std::max(k, static_cast<double>(next));
  return std::min(1.0, k / t);
}

DataTemperingAnchored::DataTemperingAnchored(ModelPtr model, std::size_t t0) : model_(std::move(model)), t0_(t0) {
  if (t0_ >= model_->n_periods()) fail(ErrorKind::InvalidConfig, "data tempering requires 0 <= T0 < T");
}

void DataTemperingAnchored::evaluate(const double* theta, const RngKey& key, double* cache) const {
  thread_local std::vector<double> terms;
  terms.resize(model_->n_periods());
  model_->log_likelihood_terms(theta, key, terms.size(), terms.data());
  double head = 0.0;
  double all = 0.0;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    all += terms[t];
    if (t + 1 == t0_) head = all;
  }
  cache[0] = all;
  cache[1] = head;
}

double DataTemperingAnchored::log_likelihood(double phi, const double* cache) const {
  return tempered(phi, cache[0]) + tempered(1.0 - phi, cache[1]);
}

double DataTemperingAnchored::slope(const double* cache) const { return minus_inf_safe(cache[0], cache[1]); }

PrefixModel::PrefixModel(ModelPtr inner, std::size_t t0) : inner_(std::move(inner)), t0_(t0) {
  if (t0_ > inner_->n_periods()) fail(ErrorKind::InvalidConfig, "prefix longer than the sample");
}

void PrefixModel::log_likelihood_terms(const double* theta, const RngKey& key, std::size_t n_terms,
                                       double* out) const {
  inner_->log_likelihood_terms(theta, key, std::min(n_terms, t0_), out);
}

void check_common_layout(const Model& m0, const Model& m1) {
  const auto c0 = indices_with_tag(m0, ParamTag::Common);
  const auto c1 = indices_with_tag(m1, ParamTag::Common);
  if (c0.size() != c1.size()) {
    fail(ErrorKind::LayoutMismatch, "models disagree on the number of common parameters (" +
                                        std::to_string(c0.size()) + " vs " + std::to_string(c1.size()) + ")");
  }
  for (std::size_t k = 0; k < c0.size(); ++k) {
    if (m0.params()[c0[k]].name != m1.params()[c1[k]].name) {
      fail(ErrorKind::LayoutMismatch, "common parameter " + std::to_string(k) + " is '" + m0.params()[c0[k]].name +
                                          "' in M0 but '" + m1.params()[c1[k]].name + "' in M1");
    }
  }
  if (!indices_with_tag(m0, ParamTag::M1Only).empty() || !indices_with_tag(m1, ParamTag::M0Only).empty()) {
    fail(ErrorKind::LayoutMismatch, "parameter tags are inconsistent with the model roles");
  }
}

ModelTempering::ModelTempering(ModelPtr m0, ModelPtr m1, double psi_star, Theta0Mode mode, Vec theta0_fixed)
    : m0_(std::move(m0)), m1_(std::move(m1)), psi_(psi_star), mode_(mode), theta0_fixed_(std::move(theta0_fixed)) {
  if (!(psi_ > 0.0 && psi_ <= 1.0)) fail(ErrorKind::InvalidConfig, "model tempering needs psi* in (0,1]");
  check_common_layout(*m0_, *m1_);
  layout_ = m1_->params();
  m0_specific_ = indices_with_tag(*m0_, ParamTag::M0Only);
  m1_specific_ = indices_with_tag(*m1_, ParamTag::M1Only);
  if (mode_ == Theta0Mode::Fixed && static_cast<std::size_t>(theta0_fixed_.size()) != m0_specific_.size()) {
    fail(ErrorKind::LayoutMismatch, "fixed theta_0 has the wrong length");
  }
  const auto c0 = indices_with_tag(*m0_, ParamTag::Common);
  const auto c1 = indices_with_tag(*m1_, ParamTag::Common);
  m0_from_.assign(m0_->dim(), -1);
  for (std::size_t k = 0; k < c0.size(); ++k) m0_from_[c0[k]] = static_cast<long>(c1[k]);
  if (mode_ == Theta0Mode::Enlarged) {
    for (std::size_t j : m0_specific_) {
      m0_from_[j] = static_cast<long>(layout_.size());
      layout_.push_back(m0_->params()[j]);
    }
  }
}

void ModelTempering::m0_theta(const double* theta, double* out) const {
  std::size_t fixed = 0;
  for (std::size_t j = 0; j < m0_from_.size(); ++j) {
    if (m0_from_[j] >= 0) {
      out[j] = theta[m0_from_[j]];
    } else {
      out[j] = theta0_fixed_[static_cast<Eigen::Index>(fixed++)];
    }
  }
}

double ModelTempering::log_prior(const double* theta) const {
  double lp = m1_->log_prior(theta);
  if (mode_ == Theta0Mode::Enlarged && !m0_specific_.empty() && lp != kNegInf) {
    thread_local std::vector<double> t0;
    t0.resize(m0_->dim());
    m0_theta(theta, t0.data());
    lp += m0_->log_prior_block(t0.data(), ParamTag::M0Only);
  }
  return lp;
}

void ModelTempering::evaluate(const double* theta, const RngKey& key, double* cache) const {
  thread_local std::vector<double> t0;
  t0.resize(m0_->dim());
  m0_theta(theta, t0.data());
  cache[0] = m1_->log_likelihood(theta, key);
  cache[1] = m0_->log_likelihood(t0.data(), key.child(kM0EvalTag));
}

double ModelTempering::log_likelihood(double phi, const double* cache) const {
  return tempered(phi, cache[0]) + tempered((1.0 - phi) * psi_, cache[1]);
}

double ModelTempering::slope(const double* cache) const {
  if (cache[0] == kNegInf) return kNegInf;
  return cache[0] - psi_ * cache[1];
}

void ModelTempering::sample_stage0(Rng&, double*) const {
  fail(ErrorKind::InvalidConfig, "model tempering starts from an approximating-model swarm");
}

RowMat ModelTempering::stage0_values(const RowMat& m0_values, std::uint64_t seed) const {
  if (static_cast<std::size_t>(m0_values.cols()) != m0_->dim()) {
    fail(ErrorKind::LayoutMismatch, "approximating-model swarm has " + std::to_string(m0_values.cols()) +
                                        " columns, expected " + std::to_string(m0_->dim()));
  }
  const auto n = static_cast<std::size_t>(m0_values.rows());
  RowMat out(m0_values.rows(), static_cast<Eigen::Index>(dim()));
  parallel_for(n, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::vector<double> prior(m1_->dim());
    Rng rng(RngKey{seed, 0, i, substep::kStage0Draw});
    m1_->sample_prior(rng, prior.data());
    for (std::size_t j : m1_specific_) out(r, static_cast<Eigen::Index>(j)) = prior[j];
    for (std::size_t j = 0; j < m0_from_.size(); ++j) {
      if (m0_from_[j] >= 0) out(r, m0_from_[j]) = m0_values(r, static_cast<Eigen::Index>(j));
    }
  });
  return out;
}

}  // namespace tsmc
