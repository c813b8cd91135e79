#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsmc/bridges/model.hpp"
#include "tsmc/smc/bridge.hpp"
#include "tsmc/smc/particles.hpp"

namespace tsmc {

/// p_n(Y|theta) = p(Y|theta)^phi, run up to `terminal` (psi* for a tempered
/// approximating-model run).
class LikelihoodTempering final : public Bridge {
 public:
  explicit LikelihoodTempering(ModelPtr model, double terminal = 1.0);

  std::string strategy() const override { return "lt"; }
  std::size_t dim() const override { return model_->dim(); }
  std::vector<ParamInfo> layout() const override { return model_->params(); }
  std::size_t cache_width() const override { return 1; }
  double log_prior(const double* theta) const override { return model_->log_prior(theta); }
  void evaluate(const double* theta, const RngKey& key, double* cache) const override;
  double log_likelihood(double phi, const double* cache) const override { return tempered(phi, cache[0]); }
  bool linear_in_phi() const override { return true; }
  double slope(const double* cache) const override { return cache[0]; }
  double terminal_phi() const override { return terminal_; }
  void sample_stage0(Rng& rng, double* theta) const override { model_->sample_prior(rng, theta); }
  std::vector<std::string> evaluated_models() const override { return {model_->name()}; }

 private:
  ModelPtr model_;
  double terminal_;
};

/// p_n(Y|theta) = p(Y_{1:floor(phi T)}|theta). The schedule solver works on
/// the piecewise-linear interpolation between sample sizes and snaps up to
/// the next whole period.
class DataTemperingPrefix final : public Bridge {
 public:
  explicit DataTemperingPrefix(ModelPtr model);

  std::string strategy() const override { return "dt"; }
  std::size_t dim() const override { return model_->dim(); }
  std::vector<ParamInfo> layout() const override { return model_->params(); }
  std::size_t cache_width() const override { return periods_ + 1; }
  double log_prior(const double* theta) const override { return model_->log_prior(theta); }
  void evaluate(const double* theta, const RngKey& key, double* cache) const override;
  double log_likelihood(double phi, const double* cache) const override;
  double relaxed_log_likelihood(double phi, const double* cache) const override;
  double snap_phi(double phi, double phi_old) const override;
  void sample_stage0(Rng& rng, double* theta) const override { model_->sample_prior(rng, theta); }
  std::vector<std::string> evaluated_models() const override { return {model_->name()}; }

  /// floor(phi T) with a 1e-9 guard against representation error.
  std::size_t sample_size(double phi) const;

 private:
  ModelPtr model_;
  std::size_t periods_;
};

/// p_n(Y|theta) = p(Y_{1:T}|theta)^phi p(Y_{1:T0}|theta)^(1-phi), started
/// from the posterior given the first T0 observations.
class DataTemperingAnchored final : public Bridge {
 public:
  DataTemperingAnchored(ModelPtr model, std::size_t t0);

  std::string strategy() const override { return "dt"; }
  std::size_t dim() const override { return model_->dim(); }
  std::vector<ParamInfo> layout() const override { return model_->params(); }
  std::size_t cache_width() const override { return 2; }
  double log_prior(const double* theta) const override { return model_->log_prior(theta); }
  void evaluate(const double* theta, const RngKey& key, double* cache) const override;
  double log_likelihood(double phi, const double* cache) const override;
  bool linear_in_phi() const override { return true; }
  double slope(const double* cache) const override;
  bool has_direct_stage0() const override { return t0_ == 0; }
  void sample_stage0(Rng& rng, double* theta) const override { model_->sample_prior(rng, theta); }
  std::vector<std::string> evaluated_models() const override { return {model_->name()}; }

  std::size_t t0() const { return t0_; }

 private:
  ModelPtr model_;
  std::size_t t0_;
};

/// The first `t0` periods of another model's sample.
class PrefixModel final : public Model {
 public:
  PrefixModel(ModelPtr inner, std::size_t t0);

  std::string name() const override { return inner_->name() + "[1:" + std::to_string(t0_) + "]"; }
  const std::vector<ParamInfo>& params() const override { return inner_->params(); }
  double log_prior(const double* theta) const override { return inner_->log_prior(theta); }
  void sample_prior(Rng& rng, double* theta) const override { inner_->sample_prior(rng, theta); }
  bool deterministic() const override { return inner_->deterministic(); }
  std::size_t n_periods() const override { return t0_; }
  void log_likelihood_terms(const double* theta, const RngKey& key, std::size_t n_terms,
                            double* out) const override;
  Vec reference_point() const override { return inner_->reference_point(); }

 private:
  ModelPtr inner_;
  std::size_t t0_;
};

/// How approximating-model-only parameters enter a model-tempering bridge.
enum class Theta0Mode {
  Fixed,    // held at a point estimate and dropped from theta
  Enlarged  // kept in theta with their prior
};

/// p_n(Y|theta) = p(Y|theta_c,theta_1,M1)^phi p(Y|theta_c,theta_0,M0)^((1-phi) psi*).
///
/// theta holds M1's parameters in M1's order followed, in enlarged mode, by
/// M0's own parameters. Stage 0 is the psi*-tempered M0 posterior times the
/// prior of theta_1.
class ModelTempering final : public Bridge {
 public:
  ModelTempering(ModelPtr m0, ModelPtr m1, double psi_star, Theta0Mode mode = Theta0Mode::Fixed,
                 Vec theta0_fixed = Vec());

  std::string strategy() const override { return "mt"; }
  std::size_t dim() const override { return layout_.size(); }
  std::vector<ParamInfo> layout() const override { return layout_; }
  std::size_t cache_width() const override { return 2; }
  double log_prior(const double* theta) const override;
  void evaluate(const double* theta, const RngKey& key, double* cache) const override;
  double log_likelihood(double phi, const double* cache) const override;
  bool linear_in_phi() const override { return true; }
  double slope(const double* cache) const override;
  bool has_direct_stage0() const override { return false; }
  void sample_stage0(Rng& rng, double* theta) const override;
  std::vector<std::string> evaluated_models() const override { return {m1_->name(), m0_->name()}; }

  double psi_star() const { return psi_; }
  Theta0Mode theta0_mode() const { return mode_; }
  /// M0's parameter vector implied by an MT theta.
  void m0_theta(const double* theta, double* out) const;
  /// Stage-0 values from an equally weighted M0 swarm: (theta_c, theta_0)
  /// copied, theta_1 drawn from M1's prior with per-particle keys.
  RowMat stage0_values(const RowMat& m0_values, std::uint64_t seed) const;

 private:
  ModelPtr m0_, m1_;
  double psi_;
  Theta0Mode mode_;
  Vec theta0_fixed_;
  std::vector<ParamInfo> layout_;
  std::vector<long> m0_from_;  // per M0 coordinate: MT index, or -1 for a fixed value
  std::vector<std::size_t> m0_specific_;
  std::vector<std::size_t> m1_specific_;
};

/// Checks that M0 and M1 agree on the names and order of their common
/// parameters. Throws LayoutMismatch.
void check_common_layout(const Model& m0, const Model& m1);

}  // namespace tsmc
