#pragma once

#include "tsmc/bridges/model.hpp"

namespace tsmc {

/// Ingredients of the runtime model of a model-tempering run.
struct RuntimeModel {
  double n_stages_m0 = 0.0;  // stages of the tempered M0 run; 0 when psi* = 0
  double n_stages_m1 = 0.0;  // stages of the M0 -> M1 (or LT) run
  double tau0 = 0.0;         // seconds per M0 likelihood call
  double tau1 = 0.0;         // seconds per M1 likelihood call
  double evals_per_stage = 0.0;  // N * N_MH * N_blocks

  /// Throws InvalidConfig.
  void validate() const;
};

/// N* (N1 tau1 + 1{psi>0} (N1 + N0) tau0).
double predicted_runtime(const RuntimeModel& rm, double psi_star);

/// Predicted runtime at psi* relative to likelihood tempering (psi* = 0).
double runtime_reduction(const RuntimeModel& at_zero, const RuntimeModel& at_psi, double psi_star);
/// The tau0/tau1 -> 0 limit: N1(psi*) / N1(0).
double runtime_reduction_limit(const RuntimeModel& at_zero, const RuntimeModel& at_psi);

/// Median wall time of `calls` likelihood evaluations at the model's
/// reference point.
double measure_tau(const Model& model, int calls = 100);

}  // namespace tsmc
