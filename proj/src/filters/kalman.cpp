#include "tsmc/filters/kalman.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tsmc/core/error.hpp"

namespace tsmc {

KalmanResult kalman_loglik(const LinearGaussianSS& m, const Mat& data, bool track_eigenvalues) {
  const Eigen::Index n = m.n_obs();
  if (data.cols() != n || m.measurement.cols() != m.n_state() || m.intercept.size() != n) {
    fail(ErrorKind::InvalidConfig, "Kalman filter dimensions are inconsistent");
  }
  const Mat rqr = m.shock_loading * m.shock_cov * m.shock_loading.transpose();
  const double log2pi = std::log(2.0 * std::numbers::pi);
  Vec a = m.init_mean;
  Mat p = m.init_cov;
  KalmanResult res;
  res.terms.resize(data.rows());
  res.min_cov_eigenvalue = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < data.rows(); ++t) {
    a = m.transition * a;
    p = m.transition * p * m.transition.transpose() + rqr;
    p = 0.5 * (p + p.transpose()).eval();
    Mat f = m.measurement * p * m.measurement.transpose() + m.measurement_cov;
    f = 0.5 * (f + f.transpose()).eval();
    Eigen::LLT<Mat> llt(f);
    if (llt.info() != Eigen::Success) {
      f.diagonal().array() += 1e-10;
      llt.compute(f);
      if (llt.info() != Eigen::Success) {
        fail(ErrorKind::SingularPredictiveCovariance, "forecast covariance singular at period " + std::to_string(t + 1));
      }
    }
    const Vec v = data.row(t).transpose() - m.intercept - m.measurement * a;
    const Vec w = llt.matrixL().solve(v);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    res.terms[t] = -0.5 * (static_cast<double>(n) * log2pi + logdet + w.squaredNorm());
    const Mat pz = p * m.measurement.transpose();
    const Mat k = llt.solve(pz.transpose()).transpose();
    a += k * v;
    p -= k * pz.transpose();
    p = 0.5 * (p + p.transpose()).eval();
    if (track_eigenvalues) {
      Eigen::SelfAdjointEigenSolver<Mat> es(p, Eigen::EigenvaluesOnly);
      res.min_cov_eigenvalue = std::min(res.min_cov_eigenvalue, es.eigenvalues().minCoeff());
    }
  }
  res.log_likelihood = res.terms.sum();
  return res;
}

Mat stationary_covariance(const Mat& transition, const Mat& shock_cov) {
  Mat a = transition;
  Mat p = shock_cov;
  for (int it = 0; it < 200; ++it) {
    const Mat next = p + a * p * a.transpose();
    a = (a * a).eval();
    const double change = (next - p).cwiseAbs().maxCoeff();
    p = next;
    if (change <= 1e-15 * (1.0 + p.cwiseAbs().maxCoeff())) break;
  }
  return 0.5 * (p + p.transpose());
}

}  // namespace tsmc
