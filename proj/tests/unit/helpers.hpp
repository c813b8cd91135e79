#pragma once

// Small models and wrappers shared by the unit tests.

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "tsmc/bridges/model.hpp"
#include "tsmc/core/types.hpp"
#include "tsmc/smc/bridge.hpp"

namespace tsmc::testing {

/// y_t ~ N(theta, s^2) iid, theta ~ N(m, v).
class ConjugateNormal final : public Model {
 public:
  ConjugateNormal(Vec y, double s, double m, double v, std::string name = "normal")
      : y_(std::move(y)), s_(s), m_(m), v_(v), name_(std::move(name)) {
    info_.push_back({"theta", "real", ParamTag::Common});
  }

  std::string name() const override { return name_; }
  const std::vector<ParamInfo>& params() const override { return info_; }
  double log_prior(const double* t) const override {
    const double z = t[0] - m_;
    return -0.5 * (std::log(2.0 * std::numbers::pi * v_) + z * z / v_);
  }
  double log_prior_block(const double* t, ParamTag tag) const override {
    return tag == ParamTag::Common ? log_prior(t) : 0.0;
  }
  void sample_prior(Rng& rng, double* t) const override { t[0] = rng.normal(m_, std::sqrt(v_)); }
  bool deterministic() const override { return true; }
  std::size_t n_periods() const override { return static_cast<std::size_t>(y_.size()); }
  void log_likelihood_terms(const double* t, const RngKey&, std::size_t n, double* out) const override {
    for (std::size_t i = 0; i < n; ++i) {
      const double z = y_[static_cast<Eigen::Index>(i)] - t[0];
      out[i] = -0.5 * (std::log(2.0 * std::numbers::pi * s_ * s_) + z * z / (s_ * s_));
    }
  }
  Vec reference_point() const override { return Vec::Constant(1, m_); }

  /// log N(y; m 1, s^2 I + v 11') from a dense Cholesky factorisation.
  double exact_log_mdd() const {
    const Eigen::Index n = y_.size();
    const Mat cov = s_ * s_ * Mat::Identity(n, n) + v_ * Mat::Ones(n, n);
    const Eigen::LLT<Mat> llt(cov);
    const Vec r = y_ - Vec::Constant(n, m_);
    const Vec w = llt.matrixL().solve(r);
    const double logdet = 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();
    return -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + logdet + w.squaredNorm());
  }
  /// Posterior variance of theta under likelihood^psi.
  double tempered_posterior_variance(double psi) const {
    return 1.0 / (1.0 / v_ + psi * static_cast<double>(y_.size()) / (s_ * s_));
  }
  double tempered_posterior_mean(double psi) const {
    return tempered_posterior_variance(psi) * (m_ / v_ + psi * y_.sum() / (s_ * s_));
  }

 private:
  Vec y_;
  double s_, m_, v_;
  std::string name_;
  std::vector<ParamInfo> info_;
};

/// Delegates to another bridge but stops at a different terminal exponent.
class CappedBridge final : public Bridge {
 public:
  CappedBridge(std::shared_ptr<const Bridge> inner, double terminal) : inner_(std::move(inner)), terminal_(terminal) {}

  std::string strategy() const override { return inner_->strategy(); }
  std::size_t dim() const override { return inner_->dim(); }
  std::vector<ParamInfo> layout() const override { return inner_->layout(); }
  std::size_t cache_width() const override { return inner_->cache_width(); }
  double log_prior(const double* t) const override { return inner_->log_prior(t); }
  void evaluate(const double* t, const RngKey& k, double* c) const override { inner_->evaluate(t, k, c); }
  double log_likelihood(double phi, const double* c) const override { return inner_->log_likelihood(phi, c); }
  bool linear_in_phi() const override { return inner_->linear_in_phi(); }
  double slope(const double* c) const override { return inner_->slope(c); }
  double terminal_phi() const override { return terminal_; }
  void sample_stage0(Rng& rng, double* t) const override { inner_->sample_stage0(rng, t); }
  std::vector<std::string> evaluated_models() const override { return inner_->evaluated_models(); }

 private:
  std::shared_ptr<const Bridge> inner_;
  double terminal_;
};

/// One coordinate, cache = {ratio}; log_likelihood(phi) = phi * ratio.
class RatioBridge final : public Bridge {
 public:
  std::string strategy() const override { return "ratio"; }
  std::size_t dim() const override { return 1; }
  std::vector<ParamInfo> layout() const override { return {{"x", "real", ParamTag::Common}}; }
  std::size_t cache_width() const override { return 1; }
  double log_prior(const double*) const override { return 0.0; }
  void evaluate(const double* t, const RngKey&, double* c) const override { c[0] = t[0]; }
  double log_likelihood(double phi, const double* c) const override { return tempered(phi, c[0]); }
  bool linear_in_phi() const override { return true; }
  double slope(const double* c) const override { return c[0]; }
  void sample_stage0(Rng&, double* t) const override { t[0] = 0.0; }
  std::vector<std::string> evaluated_models() const override { return {"ratio"}; }
};

inline double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace tsmc::testing
