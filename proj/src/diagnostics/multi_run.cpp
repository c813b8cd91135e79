#include "tsmc/diagnostics/multi_run.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsmc/diagnostics/weights.hpp"

namespace tsmc {

RunSummary summarize_run(const TwoStageRun& run, int index, std::uint64_t seed) {
  RunSummary s;
  s.run = index;
  s.seed = seed;
  s.log_mdd = run.log_mdd;
  s.posterior = summarize_posterior(run.main.final_particles);
  s.n_stages = run.main.n_stages;
  s.n_stages_m0 = run.preliminary.n_stages;
  s.wall_seconds = run.wall_seconds;
  if (run.stage0_jump.size() > 0) {
    s.weight_variance = normalized_weight_variance(
        std::span<const double>(run.stage0_jump.data(), static_cast<std::size_t>(run.stage0_jump.size())));
  }
  const auto& acc = run.main.accept_rates;
  if (!acc.empty()) {
    const std::size_t from = acc.size() - std::max<std::size_t>(1, acc.size() / 4);
    s.late_accept_rate = mean(std::span<const double>(acc.data() + from, acc.size() - from));
  }
  s.likelihood_evals = run.main.likelihood_evals;
  for (const auto& [name, n] : run.preliminary.likelihood_evals) s.likelihood_evals[name] += n;
  return s;
}

std::vector<double> MultiRunStats::log_mdds() const {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(r.log_mdd);
  return v;
}

void aggregate(MultiRunStats& st) {
  auto collect = [&](auto get) {
    std::vector<double> v;
    for (const auto& r : st.runs) v.push_back(get(r));
    return v;
  };
  const auto mdd = st.log_mdds();
  st.mean_log_mdd = mean(mdd);
  st.sd_log_mdd = sample_sd(mdd);
  const auto stages = collect([](const RunSummary& r) { return static_cast<double>(r.n_stages); });
  st.mean_stages = mean(stages);
  st.sd_stages = sample_sd(stages);
  st.mean_stages_m0 = mean(collect([](const RunSummary& r) { return static_cast<double>(r.n_stages_m0); }));
  const auto wall = collect([](const RunSummary& r) { return r.wall_seconds; });
  st.mean_wall = mean(wall);
  st.sd_wall = sample_sd(wall);
  const auto wv = collect([](const RunSummary& r) { return r.weight_variance; });
  st.mean_weight_variance = mean(wv);
  st.sd_weight_variance = sample_sd(wv);

  st.mean_post_mean.clear();
  st.sd_post_mean.clear();
  if (st.runs.empty()) return;
  const std::size_t d = st.runs.front().posterior.size();
  for (std::size_t j = 0; j < d; ++j) {
    const auto pm = collect([j](const RunSummary& r) { return r.posterior[j].mean; });
    st.mean_post_mean.push_back(mean(pm));
    st.sd_post_mean.push_back(sample_sd(pm));
  }
}

MultiRunStats multi_run(const RunFactory& factory, const SmcConfig& config, int n_run, const StopRequest& stop) {
  if (n_run < 1) fail(ErrorKind::InvalidConfig, "n_run must be at least 1");
  MultiRunStats st;
  for (int r = 0; r < n_run; ++r) {
    if (stop && stop()) {
      st.n_skipped = n_run - r;
      break;
    }
    SmcConfig c = config;
    c.seed = config.seed + static_cast<std::uint64_t>(r);
    try {
      st.runs.push_back(summarize_run(factory(c), r, c.seed));
    } catch (const Error& e) {
      st.failures.push_back({r, c.seed, e.kind(), e.what()});
    }
  }
  aggregate(st);
  return st;
}

std::vector<double> default_psi_grid() { return {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}; }

RuntimeModel SweepReport::runtime_model(std::size_t cell) const {
  RuntimeModel rm;
  rm.n_stages_m0 = cells.at(cell).stats.mean_stages_m0;
  rm.n_stages_m1 = cells.at(cell).stats.mean_stages;
  rm.tau0 = tau0;
  rm.tau1 = tau1;
  rm.evals_per_stage = evals_per_stage;
  return rm;
}

long SweepReport::baseline() const {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k].psi == 0.0 && !cells[k].stats.runs.empty()) return static_cast<long>(k);
  }
  return -1;
}

double SweepReport::predicted_reduction(std::size_t cell) const {
  const long b = baseline();
  if (b < 0 || cells.at(cell).stats.runs.empty()) return std::numeric_limits<double>::quiet_NaN();
  return runtime_reduction(runtime_model(static_cast<std::size_t>(b)), runtime_model(cell), cells[cell].psi);
}

double SweepReport::reduction_limit(std::size_t cell) const {
  const long b = baseline();
  if (b < 0 || cells.at(cell).stats.runs.empty()) return std::numeric_limits<double>::quiet_NaN();
  return runtime_reduction_limit(runtime_model(static_cast<std::size_t>(b)), runtime_model(cell));
}

double SweepReport::measured_reduction(std::size_t cell) const {
  const long b = baseline();
  if (b < 0 || cells.at(cell).stats.runs.empty()) return std::numeric_limits<double>::quiet_NaN();
  return cells[cell].stats.mean_wall / cells[static_cast<std::size_t>(b)].stats.mean_wall;
}

SweepReport run_sweep(ModelPtr m0, ModelPtr m1, const SweepSettings& settings) {
  settings.config.validate();
  for (double psi : settings.psi_grid) {
    if (!(psi >= 0.0 && psi <= 1.0)) fail(ErrorKind::InvalidConfig, "psi* values must lie in [0,1]");
  }
  SweepReport rep;
  rep.tau0 = measure_tau(*m0, settings.tau_calls);
  rep.tau1 = measure_tau(*m1, settings.tau_calls);
  rep.evals_per_stage = static_cast<double>(settings.config.n_particles) * settings.config.n_mh *
                        settings.config.n_blocks;
  ModelTemperingOptions opts;
  opts.theta0_mode = settings.theta0_mode;
  for (double psi : settings.psi_grid) {
    SweepCell cell;
    cell.psi = psi;
    cell.stats = multi_run([&](const SmcConfig& c) { return run_model_tempering(m0, m1, psi, c, opts); },
                           settings.config, settings.n_run, settings.stop);
    rep.cells.push_back(std::move(cell));
  }
  return rep;
}

}  // namespace tsmc
