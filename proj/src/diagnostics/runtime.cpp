#include "tsmc/diagnostics/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "tsmc/core/error.hpp"

namespace tsmc {

void RuntimeModel::validate() const {
  if (!(n_stages_m1 > 0.0) || !(n_stages_m0 >= 0.0)) fail(ErrorKind::InvalidConfig, "stage counts must be positive");
  if (!(tau0 >= 0.0 && tau1 > 0.0)) fail(ErrorKind::InvalidConfig, "likelihood call times must be positive");
  if (!(evals_per_stage > 0.0)) fail(ErrorKind::InvalidConfig, "evaluations per stage must be positive");
}

double predicted_runtime(const RuntimeModel& rm, double psi_star) {
  rm.validate();
  double t = rm.n_stages_m1 * rm.tau1;
  if (psi_star > 0.0) t += (rm.n_stages_m1 + rm.n_stages_m0) * rm.tau0;
  return rm.evals_per_stage * t;
}

double runtime_reduction(const RuntimeModel& at_zero, const RuntimeModel& at_psi, double psi_star) {
  at_zero.validate();
  at_psi.validate();
  double r = at_psi.n_stages_m1 / at_zero.n_stages_m1;
  if (psi_star > 0.0) r += (at_psi.n_stages_m1 + at_psi.n_stages_m0) / at_zero.n_stages_m1 * (at_psi.tau0 / at_psi.tau1);
  return r;
}

double runtime_reduction_limit(const RuntimeModel& at_zero, const RuntimeModel& at_psi) {
  at_zero.validate();
  at_psi.validate();
  return at_psi.n_stages_m1 / at_zero.n_stages_m1;
}

double measure_tau(const Model& model, int calls) {
  if (calls < 1) fail(ErrorKind::InvalidConfig, "need at least one timed call");
  const Vec theta = model.reference_point();
  std::vector<double> times(static_cast<std::size_t>(calls));
  volatile double sink = 0.0;
  for (int c = 0; c < calls; ++c) {
    const auto t0 = std::chrono::steady_clock::now();
    sink = sink + model.log_likelihood(theta.data(), RngKey{0, 0, static_cast<std::uint64_t>(c), 0});
    times[static_cast<std::size_t>(c)] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  auto mid = times.begin() + calls / 2;
  std::nth_element(times.begin(), mid, times.end());
  double med = *mid;
  if (calls % 2 == 0) med = 0.5 * (med + *std::max_element(times.begin(), mid));
  return med;
}

}  // namespace tsmc
