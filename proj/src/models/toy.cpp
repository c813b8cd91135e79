#include "tsmc/models/toy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "tsmc/core/error.hpp"

namespace tsmc {

double NormalDensity::log_pdf(double x) const {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double NormalDensity::pdf(double x) const { return std::exp(log_pdf(x)); }

void GaussianToySpec::validate() const {
  if (!(sigma > 0.0) || !(target_sd > 0.0)) fail(ErrorKind::InvalidConfig, "toy densities need positive SDs");
  if (!std::isfinite(mu) || !std::isfinite(target_mean)) fail(ErrorKind::InvalidConfig, "toy means must be finite");
}

ToyBridge::ToyBridge(const GaussianToySpec& spec)
    : spec_(spec), target_{spec.target_mean, spec.target_sd}, proposal_{spec.mu, spec.sigma} {
  spec_.validate();
}

void ToyBridge::evaluate(const double* theta, const RngKey&, double* cache) const {
  cache[0] = target_.log_pdf(theta[0]);
  cache[1] = proposal_.log_pdf(theta[0]);
}

double ToyBridge::log_likelihood(double phi, const double* cache) const {
  return tempered(phi, cache[0]) + tempered(1.0 - phi, cache[1]);
}

void ToyBridge::sample_stage0(Rng& rng, double* theta) const { theta[0] = rng.normal(spec_.mu, spec_.sigma); }

NormalDensity ToyBridge::bridge_density(double phi) const {
  const double p0 = 1.0 / (spec_.sigma * spec_.sigma);
  const double p1 = 1.0 / (spec_.target_sd * spec_.target_sd);
  const double prec = (1.0 - phi) * p0 + phi * p1;
  const double mean = ((1.0 - phi) * p0 * spec_.mu + phi * p1 * spec_.target_mean) / prec;
  return {mean, 1.0 / std::sqrt(prec)};
}

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;
  // An unattainable tolerance would otherwise cost 2^max_depth evaluations per panel.
  long long budget;

  double run(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    if ((budget -= 2) < 0) fail(ErrorKind::QuadratureNonConvergence, "adaptive Simpson exhausted its evaluation budget");
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= max_depth) {
      fail(ErrorKind::QuadratureNonConvergence, "adaptive Simpson hit its depth limit near " + std::to_string(m));
    }
    return run(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + run(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

double overlap_discrepancy(const NormalDensity& p0, const NormalDensity& p1, double tol) {
  const double smax = std::max(p0.sd, p1.sd);
  const double lo = std::min(p0.mean, p1.mean) - 10.0 * smax;
  const double hi = std::max(p0.mean, p1.mean) + 10.0 * smax;
  const std::function<double(double)> f = [&](double x) { return std::min(p0.pdf(x), p1.pdf(x)); };
  // A fixed pre-partition keeps narrow peaks from slipping between the first nodes.
  constexpr int kPanels = 256;
  Simpson simpson{f, 50, 20'000'000};
  const double h = (hi - lo) / kPanels;
  double area = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double a = lo + i * h;
    const double b = (i + 1 == kPanels) ? hi : a + h;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    area += simpson.run(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol / kPanels, 0);
  }
  return std::clamp(1.0 - area, 0.0, 1.0);
}

std::vector<double> toy_mu_grid() { return {-3.0, -2.5, -2.0, -1.5, -1.0, -0.5, 0.0}; }

std::vector<double> toy_sigma_grid() { return {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0}; }

}  // namespace tsmc
