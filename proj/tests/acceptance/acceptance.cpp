// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "tsmc/bridges/tempering.hpp"
#include "tsmc/cli/io.hpp"
#include "tsmc/diagnostics/multi_run.hpp"
#include "tsmc/diagnostics/stats.hpp"
#include "tsmc/filters/bspf.hpp"
#include "tsmc/filters/kalman.hpp"
#include "tsmc/models/linear_oracle.hpp"
#include "tsmc/models/toy.hpp"
#include "tsmc/models/var_sv.hpp"
#include "tsmc/smc/engine.hpp"

using namespace tsmc;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr int kToyParticles = 1000;
constexpr int kToySeeds = 20;
constexpr int kToyStagesLo = 40, kToyStagesHi = 110;
constexpr double kToyMeanTol = 0.15, kToySdTol = 0.10;
constexpr double kToyBudgetSeconds = 120.0;
constexpr double kGridSpearman = 0.8;
constexpr int kBspfPeriods = 50, kBspfParticles = 2000, kBspfReps = 200;
constexpr double kBspfBudgetSeconds = 300.0;
constexpr double kSigmas = 3.0;
constexpr int kMddSeeds = 20;
constexpr double kPsiInvarianceSds = 2.0;
constexpr double kVarianceAtZeroTol = 0.05;
constexpr double kVarianceDropRatio = 0.5;
constexpr double kRuntimeTolerance = 0.15;
constexpr double kBestReduction = 0.5;
constexpr double kEssTolPerParticle = 1e-6;
constexpr double kAcceptLo = 0.15, kAcceptHi = 0.35;

int g_failed = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failed;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SmcConfig config(std::uint64_t seed, int n) {
  SmcConfig c;
  c.seed = seed;
  c.n_particles = n;
  c.alpha = 0.95;
  c.n_mh = 1;
  return c;
}

/// Every completed sampler run seen by the suite, for the schedule check.
std::vector<SmcRunResult> g_runs;

// 1 and 9: the Gaussian illustration.
std::vector<double> g_late_accept;

void gaussian_illustration() {
  GaussianToySpec spec;
  spec.mu = -3.0;
  spec.sigma = 0.2;
  const auto bridge = std::make_shared<ToyBridge>(spec);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> means, sds;
  int lo = 1 << 30, hi = 0;
  bool stages_ok = true;
  for (int s = 0; s < kToySeeds; ++s) {
    const TwoStageRun run = run_direct(bridge, config(static_cast<std::uint64_t>(s), kToyParticles));
    const int n = run.main.n_stages;
    lo = std::min(lo, n);
    hi = std::max(hi, n);
    stages_ok = stages_ok && run.main.complete && run.main.schedule.back() == 1.0 && n >= kToyStagesLo &&
                n <= kToyStagesHi;
    const WeightedMoments m = weighted_moments(run.main.final_particles);
    means.push_back(m.mean[0]);
    sds.push_back(std::sqrt(m.cov(0, 0)));
    g_late_accept.push_back(summarize_run(run, s, static_cast<std::uint64_t>(s)).late_accept_rate);
    g_runs.push_back(run.main);
  }
  const double secs = seconds_since(t0);
  const double mean_mean = mean(means), mean_sd = mean(sds);
  const bool pass = stages_ok && std::abs(mean_mean) < kToyMeanTol && std::abs(mean_sd - 1.0) < kToySdTol &&
                    secs < kToyBudgetSeconds;
  report(1, pass,
         fmt("toy N_phi in [%d,%d] over %d seeds (bound [%d,%d]); posterior mean %.4f (tol %.2f), SD %.4f "
             "(tol %.2f); %.1f s for all seeds (limit %.0f s)",
             lo, hi, kToySeeds, kToyStagesLo, kToyStagesHi, mean_mean, kToyMeanTol, mean_sd, kToySdTol, secs,
             kToyBudgetSeconds));
}

// 2: stage counts against the overlap discrepancy.
void discrepancy_monotonicity() {
  std::vector<double> d, stages;
  const NormalDensity target{0.0, 1.0};
  bool ok = true;
  for (double mu : toy_mu_grid()) {
    for (double sigma : toy_sigma_grid()) {
      GaussianToySpec spec;
      spec.mu = mu;
      spec.sigma = sigma;
      const auto bridge = std::make_shared<ToyBridge>(spec);
      const MultiRunStats st = multi_run([&](const SmcConfig& c) { return run_direct(bridge, c); },
                                         config(0, kToyParticles), kToySeeds);
      ok = ok && st.ok();
      d.push_back(overlap_discrepancy(NormalDensity{mu, sigma}, target));
      stages.push_back(st.mean_stages);
    }
  }
  const double rho = spearman(d, stages);
  report(2, ok && rho > kGridSpearman,
         fmt("Spearman(D, mean N_phi) = %.4f over %zu grid points x %d seeds (threshold %.1f)", rho, d.size(),
             kToySeeds, kGridSpearman));
}

// 3: particle filter against the Kalman filter.
void bspf_oracle() {
  LinearOracleSpec spec;
  spec.dims = 1;
  spec.periods = kBspfPeriods;
  Rng rng(RngKey{2024, 0, 0, substep::kSimulate});
  const Mat y = linear_oracle_simulate(spec, rng);
  const Vec mu = Vec::Constant(1, 0.5);
  const double exact = kalman_loglik(oracle_state_space(spec, mu, 1.0), y).log_likelihood;
  const OracleStateModel sm(spec, mu, 1.0, y);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> ll, ratio;
  for (int r = 0; r < kBspfReps; ++r) {
    const double v = bspf_loglik(sm, BspfConfig{kBspfParticles}, RngKey{77, 0, static_cast<std::uint64_t>(r), 0});
    ll.push_back(v);
    ratio.push_back(std::exp(v - exact));
  }
  const double secs = seconds_since(t0);
  const double sd = sample_sd(ll);
  const double gap = mean(ll) - exact;
  const double se_ratio = sample_sd(ratio) / std::sqrt(static_cast<double>(kBspfReps));
  const double mean_ratio = mean(ratio);
  const bool pass =
      std::abs(gap) < kSigmas * sd && std::abs(mean_ratio - 1.0) < kSigmas * se_ratio && secs < kBspfBudgetSeconds;
  report(3, pass,
         fmt("mean BSPF - Kalman = %.4f (replication SD %.4f); mean exp ratio %.4f (SE %.4f); %d reps, M=%d, "
             "%.1f s (limit %.0f s)",
             gap, sd, mean_ratio, se_ratio, kBspfReps, kBspfParticles, secs, kBspfBudgetSeconds));
}

// 4: model tempering recovers the exact log MDD difference.
void mdd_exactness() {
  LinearOracleSpec spec;
  spec.dims = 2;
  spec.periods = 50;
  spec.gap = 0.3;
  Rng rng(RngKey{11, 0, 0, substep::kSimulate});
  const Mat y = linear_oracle_simulate(spec, rng);
  const double exact = oracle_exact_log_mdd(spec, y, true) - oracle_exact_log_mdd(spec, y, false);
  const auto [m0, m1] = linear_oracle_pair(spec, y);
  std::vector<double> est;
  for (int s = 0; s < kMddSeeds; ++s) {
    const TwoStageRun run = run_model_tempering(m0, m1, 1.0, config(static_cast<std::uint64_t>(s), 500));
    est.push_back(run.log_mdd_ratio);
    g_runs.push_back(run.preliminary);
    g_runs.push_back(run.main);
  }
  const double sd = sample_sd(est);
  const double err = mean(est) - exact;

  LinearOracleSpec same = spec;
  same.gap = 0.0;
  const auto [s0, s1] = linear_oracle_pair(same, y);
  bool zero = true;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const TwoStageRun run = run_model_tempering(s0, s1, 1.0, config(s, 500));
    zero = zero && run.log_mdd_ratio == 0.0;
    g_runs.push_back(run.main);
  }
  report(4, std::abs(err) < kSigmas * sd && zero,
         fmt("mean MT log ratio - exact = %.4f (exact %.4f, MC SD %.4f, SE %.4f); identical models give exactly 0: "
             "%s",
             err, exact, sd, sd / std::sqrt(static_cast<double>(kMddSeeds)), zero ? "yes" : "no"));
}

// 5, 6, 7: one desk-scale VAR-SV sweep.
void varsv_sweep() {
  Rng rng(RngKey{1, 0, 0, substep::kSimulate});
  const Mat y = varsv_simulate(varsv_preset("dgp1"), 50, rng).data;
  const auto [m0, m1] = varsv_model_pair(y, VarSvPrior::from_data(y), BspfConfig{100});
  SweepSettings st;
  st.config = config(0, 200);
  st.n_run = 20;
  const SweepReport rep = run_sweep(m0, m1, st);
  const std::size_t nc = rep.cells.size();
  bool all_ok = true;
  for (const auto& c : rep.cells) all_ok = all_ok && c.stats.ok();

  // 5: psi*-invariance, with SDs pooled across cells from run-level estimates.
  double pooled_var = 0.0, max_diff = 0.0;
  for (const auto& c : rep.cells) pooled_var += c.stats.sd_log_mdd * c.stats.sd_log_mdd / static_cast<double>(nc);
  for (std::size_t a = 0; a < nc; ++a) {
    for (std::size_t b = a + 1; b < nc; ++b) {
      max_diff = std::max(max_diff, std::abs(rep.cells[a].stats.mean_log_mdd - rep.cells[b].stats.mean_log_mdd));
    }
  }
  const double pooled = std::sqrt(pooled_var);
  int worst_param = -1;
  double worst_ratio = 0.0;
  for (std::size_t j = 0; j < kVarDim; ++j) {
    double pv = 0.0, md = 0.0;
    for (const auto& c : rep.cells) pv += c.stats.sd_post_mean[j] * c.stats.sd_post_mean[j] / static_cast<double>(nc);
    for (std::size_t a = 0; a < nc; ++a) {
      for (std::size_t b = a + 1; b < nc; ++b) {
        md = std::max(md, std::abs(rep.cells[a].stats.mean_post_mean[j] - rep.cells[b].stats.mean_post_mean[j]));
      }
    }
    const double r = md / std::sqrt(pv);
    if (r > worst_ratio) {
      worst_ratio = r;
      worst_param = static_cast<int>(j);
    }
  }
  std::string means;
  for (const auto& c : rep.cells) means += fmt(" %.2f:%.3f(sd %.3f)", c.psi, c.stats.mean_log_mdd, c.stats.sd_log_mdd);
  report(5, all_ok && max_diff < kPsiInvarianceSds * pooled && worst_ratio < kPsiInvarianceSds,
         fmt("max pairwise log MDD gap %.4f vs %.1f pooled SDs = %.4f; worst common-parameter gap %.2f pooled SDs "
             "(param %d); cells",
             max_diff, kPsiInvarianceSds, kPsiInvarianceSds * pooled, worst_ratio, worst_param) +
             means);

  // 6: weight-variance profile.
  const double cap = static_cast<double>(st.config.n_particles - 1);
  double v0 = std::nan(""), v2 = std::nan("");
  for (const auto& c : rep.cells) {
    if (c.psi == 0.0) v0 = c.stats.mean_weight_variance;
    if (std::abs(c.psi - 0.2) < 1e-12) v2 = c.stats.mean_weight_variance;
  }
  report(6, std::abs(v0 / cap - 1.0) < kVarianceAtZeroTol && v2 < kVarianceDropRatio * cap,
         fmt("mean weight variance at psi*=0: %.2f = %.3f (N-1) (tol %.0f%%); at psi*=0.2: %.2f = %.3f (N-1) "
             "(limit %.1f)",
             v0, v0 / cap, 100 * kVarianceAtZeroTol, v2, v2 / cap, kVarianceDropRatio));

  // 7: runtime model against measured wall time.
  double worst = 0.0, best = 1e300;
  std::string cells;
  for (std::size_t k = 0; k < nc; ++k) {
    if (rep.cells[k].psi == 0.0) continue;
    const double pred = rep.predicted_reduction(k), meas = rep.measured_reduction(k);
    worst = std::max(worst, std::abs(pred - meas));
    best = std::min(best, pred);
    cells += fmt(" %.1f:%.3f/%.3f", rep.cells[k].psi, pred, meas);
  }
  report(7, std::isfinite(worst) && worst < kRuntimeTolerance && best < kBestReduction,
         fmt("max |R predicted - measured| = %.3f (limit %.2f); best predicted R %.3f (limit %.1f); "
             "predicted/measured",
             worst, kRuntimeTolerance, best, kBestReduction) +
             cells);

  const long base = rep.baseline();
  for (const auto& c : rep.cells) {
    if (std::abs(c.psi - 0.2) < 1e-12 && base >= 0) {
      std::printf("info: log MDD SD at psi*=0.2 is %.4f vs %.4f at psi*=0\n", c.stats.sd_log_mdd,
                  rep.cells[static_cast<std::size_t>(base)].stats.sd_log_mdd);
    }
  }
}

// 8: schedule targets and the resampling rule on every run above.
void schedule_property() {
  std::size_t stages = 0;
  double worst = 0.0;
  bool resample_ok = true;
  for (const auto& r : g_runs) {
    const double n = static_cast<double>(r.final_particles.size());
    for (std::size_t k = 0; k < r.schedule.size(); ++k) {
      const bool prev_reset = k == 0 || r.resampled_flags[k - 1];
      const double ess_star = prev_reset ? n : r.ess_history[k - 1];
      if (r.schedule[k] < r.terminal_phi) {
        worst = std::max(worst, std::abs(r.ess_history[k] - 0.95 * ess_star) / n);
        ++stages;
      }
      resample_ok = resample_ok && (r.resampled_flags[k] == (r.ess_history[k] < 0.5 * n));
    }
  }
  report(8, worst <= kEssTolPerParticle && resample_ok,
         fmt("max |ESS - alpha ESS*| / N = %.2e over %zu interior stages of %zu runs (limit %.0e); resampling iff "
             "ESS < N/2: %s",
             worst, stages, g_runs.size(), kEssTolPerParticle, resample_ok ? "yes" : "no"));
}

// 9: scale adaptation.
void mutation_adaptation() {
  const bool fixed_point = scale_multiplier(0.25) == 1.0 && adapt_scale(0.7, 0.25) == 0.7;
  const double acc = mean(g_late_accept);
  const auto [lo, hi] = std::minmax_element(g_late_accept.begin(), g_late_accept.end());
  report(9, fixed_point && acc >= kAcceptLo && acc <= kAcceptHi,
         fmt("f(0.25) = %.17g; long-run toy acceptance %.4f (per seed %.3f to %.3f; band [%.2f, %.2f])",
             scale_multiplier(0.25), acc, *lo, *hi, kAcceptLo, kAcceptHi));
}

// 10: byte-identical CLI output across executions and worker counts.
void determinism() {
  const fs::path root = fs::temp_directory_path() / "tsmc_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"varsv_mt", "estimate --model dgp1 --strategy mt --psi 0.4 --seed 5"},
      {"varsv_lt", "estimate --model dgp1 --strategy lt --particles 100 --seed 6"},
      {"toy", "estimate --model toy --seed 7"},
      {"oracle_dt", "estimate --model oracle --strategy dt --particles 300 --seed 8"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, args] : commands) {
    std::vector<fs::path> dirs;
    for (const char* threads : {"1", "8"}) {
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path out = root / (name + "_t" + threads + "_" + std::to_string(rep));
        const std::string cmd = std::string("TSMC_THREADS=") + threads + " '" + TSMC_CLI_PATH + "' " + args +
                                " --out '" + out.string() + "' > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) {
          ok = false;
          detail += " " + name + ":exit-failure";
        }
        dirs.push_back(out);
      }
    }
    bool same = true;
    for (const char* f : {"particles.csv", "summary.json"}) {
      const std::string ref = cli::read_text(dirs[0] / f);
      for (std::size_t k = 1; k < dirs.size(); ++k) same = same && fs::exists(dirs[k] / f) && cli::read_text(dirs[k] / f) == ref;
    }
    ok = ok && same;
    detail += " " + name + (same ? ":identical" : ":DIFFERENT");
  }
  fs::remove_all(root);
  report(10, ok, "4 executions each (TSMC_THREADS 1 and 8, twice);" + detail);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> steps = {gaussian_illustration, discrepancy_monotonicity, bspf_oracle,
                                                    mdd_exactness,         varsv_sweep,              schedule_property,
                                                    mutation_adaptation,   determinism};
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      std::printf("FAIL step raised: %s\n", e.what());
      ++g_failed;
    }
  }
  std::printf("acceptance: %d failing criteria, %.0f s\n", g_failed, seconds_since(t0));
  return g_failed == 0 ? 0 : 1;
}
