#pragma once

// Data-parallel inner loops of the sampler and the particle filters.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is chosen once at startup from CPUID; set
// TSMC_SIMD=scalar to force the reference path. Both paths reduce in a fixed
// lane order, so a given binary on a given machine is bit-reproducible
// regardless of thread count.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace tsmc::simd {

struct KernelTable {
  std::string_view name;

  /// max_i x[i]; -inf for n == 0.
  double (*max)(const double* x, std::size_t n);
  /// sum_i exp(x[i] - shift)
  double (*sum_exp)(const double* x, std::size_t n, double shift);
  /// s1 = sum_i exp(x[i] - shift), s2 = sum_i exp(2 (x[i] - shift))
  void (*sum_exp2)(const double* x, std::size_t n, double shift, double* s1, double* s2);
  /// out[i] = exp(x[i] - shift)
  void (*exp_shift)(const double* x, std::size_t n, double shift, double* out);
  /// out[i] = base[i] + a * slope[i]   (a > 0)
  void (*axpy)(const double* base, const double* slope, std::size_t n, double a, double* out);
  /// h[i] = a * h[i] + b * z[i]
  void (*affine_update)(double* h, std::size_t n, double a, double b, const double* z);
  /// Box-Muller on `pairs` pairs of 64-bit words: u1 = bits[p], u2 = bits[pairs + p];
  /// out[p] = R cos(2 pi u2), out[pairs + p] = R sin(2 pi u2), R = sqrt(-2 ln u1).
  void (*box_muller)(const std::uint64_t* bits, std::size_t pairs, double* out);
  /// out[i] = -ln(u(bits[i]))   (standard exponential draws)
  void (*neg_log_uniform)(const std::uint64_t* bits, std::size_t n, double* out);
  /// Bivariate stochastic-volatility measurement density on whitened residuals:
  /// out[i] = c - 0.5 (h1 + h2 + e1sq exp(-h1) + e2sq exp(-h2))
  void (*sv_logpdf)(const double* h1, const double* h2, std::size_t n, double e1sq, double e2sq,
                    double c, double* out);
  /// out[i] += c - 0.5 inv_var (resid - s[i])^2
  void (*gauss_logpdf_acc)(const double* s, std::size_t n, double resid, double inv_var, double c,
                           double* out);
};

/// Table selected for this process.
const KernelTable& kernels();
const KernelTable& scalar_kernels();
/// nullptr when the binary or CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

}  // namespace tsmc::simd
