#pragma once

#include "tsmc/core/types.hpp"

namespace tsmc {

/// s_t = T s_{t-1} + R eta_t,  eta_t ~ N(0, Q)
/// y_t = d + Z s_t + e_t,      e_t ~ N(0, H)
/// s_0 ~ N(a0, P0)
struct LinearGaussianSS {
  Mat transition;
  Mat shock_loading;
  Mat shock_cov;
  Mat measurement;
  Vec intercept;
  Mat measurement_cov;
  Vec init_mean;
  Mat init_cov;

  Eigen::Index n_state() const { return transition.rows(); }
  Eigen::Index n_obs() const { return measurement.rows(); }
};

struct KalmanResult {
  double log_likelihood = 0.0;
  Vec terms;  // per-period predictive log densities
  /// Smallest eigenvalue of any filtered covariance seen.
  double min_cov_eigenvalue = 0.0;
};

/// Exact log p(y_{1:T}) by the prediction/update recursion. `data` is T x n_obs.
/// Throws SingularPredictiveCovariance.
KalmanResult kalman_loglik(const LinearGaussianSS& model, const Mat& data, bool track_eigenvalues = false);

/// Stationary covariance solving P = A P A' + V by doubling.
Mat stationary_covariance(const Mat& transition, const Mat& innovation_cov);

}  // namespace tsmc
