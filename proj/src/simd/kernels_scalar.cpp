#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tsmc/core/rng.hpp"
#include "tsmc/simd/kernels.hpp"

namespace tsmc::simd {

namespace {

double max_scalar(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

double sum_exp_scalar(const double* x, std::size_t n, double shift) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] - shift);
  return s;
}

void sum_exp2_scalar(const double* x, std::size_t n, double shift, double* s1, double* s2) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(x[i] - shift);
    a += e;
    b += e * e;
  }
  *s1 = a;
  *s2 = b;
}

void exp_shift_scalar(const double* x, std::size_t n, double shift, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i] - shift);
}

void axpy_scalar(const double* base, const double* slope, std::size_t n, double a, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(a, slope[i], base[i]);
}

void affine_update_scalar(double* h, std::size_t n, double a, double b, const double* z) {
  for (std::size_t i = 0; i < n; ++i) h[i] = std::fma(a, h[i], b * z[i]);
}

void box_muller_scalar(const std::uint64_t* bits, std::size_t pairs, double* out) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t p = 0; p < pairs; ++p) {
    const double u1 = bits_to_open_uniform(bits[p]);
    const double u2 = static_cast<double>(bits[pairs + p] >> 12) * 0x1.0p-52;
    const double r = std::sqrt(-2.0 * std::log(u1));
    out[p] = r * std::cos(two_pi * u2);
    out[pairs + p] = r * std::sin(two_pi * u2);
  }
}

void neg_log_uniform_scalar(const std::uint64_t* bits, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -std::log(bits_to_open_uniform(bits[i]));
}

void sv_logpdf_scalar(const double* h1, const double* h2, std::size_t n, double e1sq, double e2sq,
                      double c, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = c - 0.5 * (h1[i] + h2[i] + e1sq * std::exp(-h1[i]) + e2sq * std::exp(-h2[i]));
  }
}

void gauss_logpdf_acc_scalar(const double* s, std::size_t n, double resid, double inv_var, double c,
                             double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double d = resid - s[i];
    out[i] += c - 0.5 * inv_var * d * d;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar",          max_scalar,           sum_exp_scalar,         sum_exp2_scalar,
      exp_shift_scalar,  axpy_scalar,          affine_update_scalar,   box_muller_scalar,
      neg_log_uniform_scalar, sv_logpdf_scalar, gauss_logpdf_acc_scalar,
  };
  return table;
}

}  // namespace tsmc::simd
