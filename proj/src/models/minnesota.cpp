#include "tsmc/models/minnesota.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "tsmc/core/error.hpp"

namespace tsmc {

MinnesotaHyper MinnesotaHyper::from_sample(const Mat& data, double lambda1, double lambda2, int lambda3) {
  if (data.rows() < 2) fail(ErrorKind::InvalidConfig, "Minnesota hyperparameters need at least two observations");
  MinnesotaHyper h;
  h.lambda1 = lambda1;
  h.lambda2 = lambda2;
  h.lambda3 = lambda3;
  h.ybar = data.colwise().mean().transpose();
  const Mat centered = data.rowwise() - h.ybar.transpose();
  h.sbar = (centered.colwise().squaredNorm() / static_cast<double>(data.rows() - 1)).cwiseSqrt().transpose();
  return h;
}

std::pair<Mat, Mat> minnesota_dummies(const MinnesotaHyper& h) {
  if (!(h.lambda1 > 0.0 && h.lambda2 > 0.0) || h.lambda3 < 1) {
    fail(ErrorKind::InvalidConfig, "Minnesota hyperparameters must be positive");
  }
  const Eigen::Index n = h.ybar.size();
  if (h.sbar.size() != n) fail(ErrorKind::InvalidConfig, "ybar and sbar lengths differ");
  const Eigen::Index k = n + 1;
  const Eigen::Index rows = n + 1 + n * h.lambda3;
  Mat y = Mat::Zero(rows, n);
  Mat x = Mat::Zero(rows, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i, i) = h.lambda1 * h.sbar[i];
    x(i, i) = h.lambda1 * h.sbar[i];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    y(n, i) = h.lambda2 * h.ybar[i];
    x(n, i) = h.lambda2 * h.ybar[i];
  }
  x(n, n) = h.lambda2;
  for (int r = 0; r < h.lambda3; ++r) {
    for (Eigen::Index i = 0; i < n; ++i) y(n + 1 + r * n + i, i) = h.sbar[i];
  }
  return {y, x};
}

double log_multigamma(int n, double a) {
  double s = 0.25 * n * (n - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= n; ++j) s += std::lgamma(a + 0.5 * (1 - j));
  return s;
}

MniwPrior mniw_from_dummies(const Mat& y_star, const Mat& x_star) {
  const Eigen::Index k = x_star.cols();
  const Eigen::Index n = y_star.cols();
  const Mat xtx = x_star.transpose() * x_star;
  Eigen::LLT<Mat> llt(xtx);
  Eigen::SelfAdjointEigenSolver<Mat> ex(xtx, Eigen::EigenvaluesOnly);
  if (llt.info() != Eigen::Success || ex.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, xtx.trace())) {
    fail(ErrorKind::RankDeficientDummies, "X*'X* is singular");
  }
  MniwPrior p;
  p.mean = llt.solve(x_star.transpose() * y_star);
  const Mat resid = y_star - x_star * p.mean;
  p.scale = resid.transpose() * resid;
  p.scale = 0.5 * (p.scale + p.scale.transpose()).eval();
  p.precision = xtx;
  p.dof = static_cast<double>(x_star.rows() - k);
  if (p.dof <= static_cast<double>(n - 1)) {
    fail(ErrorKind::RankDeficientDummies, "too few dummy observations for a proper inverse-Wishart");
  }
  const double ref = std::max(1.0, (y_star.transpose() * y_star).trace());
  Eigen::SelfAdjointEigenSolver<Mat> es(p.scale, Eigen::EigenvaluesOnly);
  if (n > 0 && es.eigenvalues().minCoeff() <= 1e-12 * ref) {
    fail(ErrorKind::RankDeficientDummies, "dummy residual cross-product is not positive definite");
  }
  return p;
}

double MniwPrior::log_density_sigma(const Mat& sigma) const {
  const auto n = static_cast<int>(scale.rows());
  Eigen::LLT<Mat> ls(sigma);
  if (ls.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  Eigen::LLT<Mat> lS(scale);
  const double logdet_sigma = 2.0 * Mat(ls.matrixL()).diagonal().array().log().sum();
  const double logdet_s = 2.0 * Mat(lS.matrixL()).diagonal().array().log().sum();
  const double tr = ls.solve(scale).trace();
  return 0.5 * dof * logdet_s - 0.5 * dof * n * std::log(2.0) - log_multigamma(n, 0.5 * dof) -
         0.5 * (dof + n + 1) * logdet_sigma - 0.5 * tr;
}

double MniwPrior::log_density(const Mat& phi, const Mat& sigma) const {
  const double ls = log_density_sigma(sigma);
  if (!std::isfinite(ls)) return ls;
  const auto n = static_cast<double>(scale.rows());
  const auto k = static_cast<double>(precision.rows());
  Eigen::LLT<Mat> lsig(sigma);
  Eigen::LLT<Mat> lp(precision);
  const double logdet_sigma = 2.0 * Mat(lsig.matrixL()).diagonal().array().log().sum();
  const double logdet_p = 2.0 * Mat(lp.matrixL()).diagonal().array().log().sum();
  const Mat dev = phi - mean;
  const double quad = lsig.solve((dev.transpose() * precision * dev)).trace();
  return ls - 0.5 * n * k * std::log(2.0 * std::numbers::pi) - 0.5 * k * logdet_sigma + 0.5 * n * logdet_p -
         0.5 * quad;
}

std::pair<Mat, Mat> MniwPrior::sample(Rng& rng) const {
  const Eigen::Index n = scale.rows();
  const Eigen::Index k = precision.rows();
  // Sigma^{-1} ~ Wishart(scale^{-1}, dof) by the Bartlett decomposition.
  const Mat s_inv = scale.inverse();
  const Mat l = Eigen::LLT<Mat>(0.5 * (s_inv + s_inv.transpose())).matrixL();
  Mat a = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::chi_squared_distribution<double> chi(dof - static_cast<double>(i));
    a(i, i) = std::sqrt(chi(rng));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const Mat la = l * a;
  const Mat w = la * la.transpose();
  Mat sigma = w.inverse();
  sigma = 0.5 * (sigma + sigma.transpose()).eval();

  const Mat p_inv = precision.inverse();
  const Mat lp = Eigen::LLT<Mat>(0.5 * (p_inv + p_inv.transpose())).matrixL();
  const Mat ls = Eigen::LLT<Mat>(sigma).matrixL();
  Mat z(k, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = rng.normal();
  }
  Mat phi = mean + lp * z * ls.transpose();
  return {phi, sigma};
}

Mat MniwPrior::sigma_mean() const { return scale / (dof - static_cast<double>(scale.rows()) - 1.0); }

}  // namespace tsmc
