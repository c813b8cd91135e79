#pragma once

#include <utility>

#include "tsmc/core/rng.hpp"
#include "tsmc/core/types.hpp"

namespace tsmc {

/// Hyperparameters of the dummy-observation Minnesota prior for a VAR(1)
/// with intercept. ybar and sbar are per-series sample means and SDs.
struct MinnesotaHyper {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  int lambda3 = 3;
  Vec ybar;
  Vec sbar;

  /// ybar and sbar from the rows of `data` (SD with divisor T - 1).
  static MinnesotaHyper from_sample(const Mat& data, double lambda1 = 1.0, double lambda2 = 1.0, int lambda3 = 3);
};

/// Dummy observations (Y*, X*); regressors ordered [y_{1,t-1}, ..., y_{n,t-1}, 1].
std::pair<Mat, Mat> minnesota_dummies(const MinnesotaHyper& hyper);

/// Sigma ~ IW(scale, dof),  Phi | Sigma ~ MN(mean, Sigma ⊗ precision^{-1}).
struct MniwPrior {
  Mat mean;       // k x n
  Mat precision;  // k x k
  Mat scale;      // n x n
  double dof = 0.0;

  /// log p(Phi, Sigma).
  double log_density(const Mat& phi, const Mat& sigma) const;
  /// log p(Sigma) alone.
  double log_density_sigma(const Mat& sigma) const;
  /// Direct draw of (Phi, Sigma).
  std::pair<Mat, Mat> sample(Rng& rng) const;
  /// E[Sigma] = scale / (dof - n - 1).
  Mat sigma_mean() const;
};

/// Phi* = (X'X)^{-1} X'Y, S* = (Y - X Phi*)'(Y - X Phi*), P = X'X, nu = T* - k.
/// Throws RankDeficientDummies.
MniwPrior mniw_from_dummies(const Mat& y_star, const Mat& x_star);

/// log multivariate gamma Gamma_n(a).
double log_multigamma(int n, double a);

}  // namespace tsmc
