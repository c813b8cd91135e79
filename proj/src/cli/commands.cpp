#include "tsmc/cli/commands.hpp"

#include <atomic>
#include <csignal>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "tsmc/bridges/tempering.hpp"
#include "tsmc/cli/io.hpp"
#include "tsmc/diagnostics/figures.hpp"
#include "tsmc/diagnostics/multi_run.hpp"
#include "tsmc/diagnostics/runtime.hpp"
#include "tsmc/diagnostics/weights.hpp"
#include "tsmc/models/linear_oracle.hpp"
#include "tsmc/models/var_sv.hpp"

namespace tsmc::cli {

using nlohmann::json;

namespace {

std::atomic<bool> g_interrupted{false};

void on_sigint(int) { g_interrupted.store(true); }

bool interrupted() { return g_interrupted.load(); }

constexpr int kInterruptedExit = 130;

LinearOracleSpec oracle_spec(int periods) {
  LinearOracleSpec s;
  s.periods = periods;
  s.gap = 1.0;
  return s;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json posterior_json(const std::vector<ParamSummary>& post, const std::vector<ParamInfo>& layout) {
  json arr = json::array();
  for (std::size_t j = 0; j < post.size(); ++j) {
    arr.push_back({{"name", layout[j].name},
                   {"tag", to_string(layout[j].tag)},
                   {"mean", post[j].mean},
                   {"variance", post[j].variance},
                   {"q025", post[j].q025},
                   {"q05", post[j].q05},
                   {"q95", post[j].q95},
                   {"q975", post[j].q975}});
  }
  return arr;
}

Theta0Mode theta0_mode(const RunConfig& cfg) {
  return cfg.theta0_mode == "enlarged" ? Theta0Mode::Enlarged : Theta0Mode::Fixed;
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path p(cfg.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create output directory " + p.string());
  return p;
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::LayoutMismatch:
    case ErrorKind::MissingCache:
      return 2;
    case ErrorKind::IoError:
      return 4;
    default:
      return 3;
  }
}

json error_json(ErrorKind kind, const std::string& message) {
  return {{"error", std::string(to_string(kind))}, {"message", message}, {"exit_code", exit_code(kind)}};
}

Problem build_problem(const RunConfig& cfg) {
  Problem p;
  if (cfg.model == "toy") {
    p.family = "toy";
    p.toy.mu = cfg.toy_mu;
    p.toy.sigma = cfg.toy_sigma;
    p.toy.validate();
    return p;
  }
  if (cfg.model == "oracle") {
    p.family = "oracle";
    const LinearOracleSpec spec = oracle_spec(cfg.periods);
    if (!cfg.data.empty()) {
      p.data = read_matrix_csv(cfg.data);
    } else {
      Rng rng(RngKey{cfg.data_seed, 0, 0, substep::kSimulate});
      p.data = linear_oracle_simulate(spec, rng);
    }
    std::tie(p.m0, p.m1) = linear_oracle_pair(spec, p.data);
    return p;
  }
  p.family = "var";
  if (!cfg.data.empty()) {
    p.data = read_matrix_csv(cfg.data);
    if (p.data.cols() != 2 || p.data.rows() < 3) fail(ErrorKind::InvalidConfig, "VAR data must be a T x 2 table, T >= 3");
  } else {
    Rng rng(RngKey{cfg.data_seed, 0, 0, substep::kSimulate});
    p.data = varsv_simulate(varsv_preset(cfg.model), cfg.periods, rng).data;
  }
  const VarSvPrior prior = VarSvPrior::from_data(p.data);
  std::tie(p.m0, p.m1) = varsv_model_pair(p.data, prior, cfg.bspf);
  return p;
}

int cmd_simulate(const RunConfig& cfg) {
  if (cfg.model.rfind("dgp", 0) != 0) fail(ErrorKind::InvalidConfig, "simulate needs a dgp1, dgp2 or dgp3 model");
  const fs::path dir = out_dir(cfg);
  const VarSvParams par = varsv_preset(cfg.model);
  Rng rng(RngKey{cfg.data_seed, 0, 0, substep::kSimulate});
  const VarSvSample s = varsv_simulate(par, cfg.periods, rng);
  write_text(dir / "data.csv", matrix_csv(s.data, {"y1", "y2"}));
  write_text(dir / "volatility.csv", matrix_csv(s.vol, {"d1", "d2"}));
  auto mat = [](const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json r = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
      rows.push_back(r);
    }
    return rows;
  };
  auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  write_json(dir / "params.json", {{"model", cfg.model},
                                   {"T", cfg.periods},
                                   {"data_seed", cfg.data_seed},
                                   {"phi1", mat(par.phi1)},
                                   {"phic", vec(par.phic)},
                                   {"sigma", mat(par.sigma)},
                                   {"rho", vec(par.rho)},
                                   {"xi", vec(par.xi)}});
  return 0;
}

int cmd_estimate(const RunConfig& cfg) {
  const Problem prob = build_problem(cfg);
  const fs::path dir = out_dir(cfg);
  write_json(dir / "config.json", cfg.to_json());

  TwoStageRun run;
  double psi = 0.0;
  std::string strategy = cfg.strategy;
  if (prob.family == "toy") {
    strategy = "toy";
    run = run_direct(std::make_shared<ToyBridge>(prob.toy), cfg.smc);
  } else if (cfg.strategy == "lt") {
    run = run_likelihood_tempering(prob.m1, cfg.smc);
  } else if (cfg.strategy == "dt") {
    const auto variant = cfg.dt_variant == "anchored" ? DataTemperingVariant::Anchored : DataTemperingVariant::Prefix;
    run = run_data_tempering(prob.m1, variant, static_cast<std::size_t>(cfg.dt_t0), cfg.smc);
  } else {
    if (cfg.psi.size() != 1) fail(ErrorKind::InvalidConfig, "estimate takes a single psi value");
    psi = cfg.psi.front();
    ModelTemperingOptions opts;
    opts.theta0_mode = theta0_mode(cfg);
    SmcRunResult stored;
    if (!cfg.m0_run.empty() && psi > 0.0) {
      stored = load_m0_run(cfg.m0_run, prob.m0->name());
      opts.m0_run = &stored;
    }
    run = run_model_tempering(prob.m0, prob.m1, psi, cfg.smc, opts);
    if (psi > 0.0 && cfg.m0_run.empty()) save_m0_run(dir / "m0", run.preliminary, prob.m0->name(), prob.m0->params());
  }

  const auto layout = run.bridge->layout();
  write_text(dir / "particles.csv", particles_csv(run.main.final_particles, layout, false));
  write_text(dir / "stages.csv", stages_csv(run.main));
  const RunSummary s = summarize_run(run, 0, cfg.smc.seed);

  json files = json::array({"config.json", "particles.csv", "stages.csv", "summary.json", "timing.json"});
  if (strategy == "mt" && psi > 0.0 && cfg.m0_run.empty()) {
    files.push_back("m0/run.json");
    files.push_back("m0/particles.csv");
  }
  json summary{{"version", kVersion},
               {"model", cfg.model},
               {"strategy", strategy},
               {"psi_star", psi},
               {"seed", cfg.smc.seed},
               {"n_particles", cfg.smc.n_particles},
               {"log_mdd", num_or_null(run.log_mdd)},
               {"log_mdd_ratio", num_or_null(run.log_mdd_ratio)},
               {"n_stages", run.main.n_stages},
               {"n_stages_m0", run.preliminary.n_stages},
               {"schedule", run.main.schedule},
               {"late_accept_rate", s.late_accept_rate},
               {"weight_variance", num_or_null(s.weight_variance)},
               {"likelihood_evals", s.likelihood_evals},
               {"posterior", posterior_json(s.posterior, layout)},
               {"files", files}};
  write_json(dir / "summary.json", summary);

  json timing{{"wall_seconds", run.wall_seconds},
              {"main_seconds", run.main.total_seconds},
              {"preliminary_seconds", run.preliminary.total_seconds},
              {"stage_seconds", run.main.wall_times}};
  if (prob.family != "toy") {
    RuntimeModel rm;
    rm.n_stages_m0 = psi > 0.0 ? run.preliminary.n_stages : 0;
    rm.n_stages_m1 = std::max(1, run.main.n_stages);
    rm.tau0 = measure_tau(*prob.m0);
    rm.tau1 = measure_tau(*prob.m1);
    rm.evals_per_stage = static_cast<double>(cfg.smc.n_particles) * cfg.smc.n_mh * cfg.smc.n_blocks;
    timing["tau0"] = rm.tau0;
    timing["tau1"] = rm.tau1;
    timing["predicted_seconds"] = predicted_runtime(rm, strategy == "mt" ? psi : 0.0);
  }
  write_json(dir / "timing.json", timing);
  return 0;
}

namespace {

int toy_sweep(const RunConfig& cfg, const fs::path& dir) {
  std::vector<ToyGridPoint> grid;
  const NormalDensity target{0.0, 1.0};
  for (double mu : toy_mu_grid()) {
    for (double sigma : toy_sigma_grid()) {
      ToyGridPoint g;
      g.mu = mu;
      g.sigma = sigma;
      g.discrepancy = overlap_discrepancy(NormalDensity{mu, sigma}, target);
      GaussianToySpec spec;
      spec.mu = mu;
      spec.sigma = sigma;
      g.stats = multi_run([&](const SmcConfig& c) { return run_direct(std::make_shared<ToyBridge>(spec), c); },
                          cfg.smc, cfg.n_run, interrupted);
      grid.push_back(std::move(g));
      if (interrupted()) break;
    }
    if (interrupted()) break;
  }
  write_table(dir / "toy_grid.csv", toy_grid_panel(grid));
  std::vector<double> disc, stages;
  for (const auto& g : grid) {
    if (g.stats.runs.empty()) continue;
    disc.push_back(g.discrepancy);
    stages.push_back(g.stats.mean_stages);
  }
  const double rho = disc.size() >= 2 ? spearman(disc, stages) : std::nan("");
  write_json(dir / "sweep.json", {{"version", kVersion},
                                  {"model", "toy"},
                                  {"n_run", cfg.n_run},
                                  {"grid_points", grid.size()},
                                  {"spearman_discrepancy_stages", num_or_null(rho)},
                                  {"files", {"toy_grid.csv", "sweep.json"}}});
  return interrupted() ? kInterruptedExit : 0;
}

}  // namespace

int cmd_sweep(const RunConfig& cfg) {
  const Problem prob = build_problem(cfg);
  const fs::path dir = out_dir(cfg);
  write_json(dir / "config.json", cfg.to_json());
  if (prob.family == "toy") return toy_sweep(cfg, dir);

  SweepSettings st;
  st.psi_grid = cfg.psi;
  st.config = cfg.smc;
  st.n_run = cfg.n_run;
  st.theta0_mode = theta0_mode(cfg);
  st.stop = interrupted;
  const SweepReport rep = run_sweep(prob.m0, prob.m1, st);

  const auto layout = prob.m1->params();
  write_table(dir / "runtime_profile.csv", runtime_profile(rep));
  write_table(dir / "weight_variance_profile.csv", weight_variance_profile(rep, cfg.smc.n_particles));
  write_table(dir / "log_mdd_profile.csv", log_mdd_profile(rep));
  write_table(dir / "posterior_profile.csv", posterior_profile(rep, layout));
  write_table(dir / "cell_status.csv", cell_status(rep));

  json cells = json::array();
  bool all_ok = true;
  for (const auto& c : rep.cells) {
    all_ok = all_ok && c.stats.ok() && c.stats.n_skipped == 0;
    json failures = json::array();
    for (const auto& f : c.stats.failures) {
      failures.push_back({{"run", f.run}, {"seed", f.seed}, {"error", std::string(to_string(f.kind))}, {"message", f.message}});
    }
    cells.push_back({{"psi", c.psi},
                     {"n_ok", c.stats.runs.size()},
                     {"n_skipped", c.stats.n_skipped},
                     {"failures", failures},
                     {"mean_log_mdd", num_or_null(c.stats.mean_log_mdd)},
                     {"sd_log_mdd", num_or_null(c.stats.sd_log_mdd)},
                     {"mean_stages", num_or_null(c.stats.mean_stages)},
                     {"mean_stages_m0", num_or_null(c.stats.mean_stages_m0)},
                     {"mean_weight_variance", num_or_null(c.stats.mean_weight_variance)}});
  }
  write_json(dir / "sweep.json", {{"version", kVersion},
                                  {"model", cfg.model},
                                  {"n_run", cfg.n_run},
                                  {"cells", cells},
                                  {"files",
                                   {"config.json", "runtime_profile.csv", "weight_variance_profile.csv",
                                    "log_mdd_profile.csv", "posterior_profile.csv", "cell_status.csv", "sweep.json",
                                    "timing.json"}}});
  json timing{{"tau0", rep.tau0}, {"tau1", rep.tau1}, {"cells", json::array()}};
  for (std::size_t k = 0; k < rep.cells.size(); ++k) {
    timing["cells"].push_back({{"psi", rep.cells[k].psi},
                               {"mean_wall", num_or_null(rep.cells[k].stats.mean_wall)},
                               {"r_predicted", num_or_null(rep.predicted_reduction(k))},
                               {"r_measured", num_or_null(rep.measured_reduction(k))}});
  }
  write_json(dir / "timing.json", timing);
  if (interrupted()) return kInterruptedExit;
  if (!all_ok) {
    std::cerr << error_json(ErrorKind::IncompleteRun, "some sweep cells failed; see cell_status.csv").dump() << "\n";
    return 3;
  }
  return 0;
}

int cmd_assess(const RunConfig& cfg) {
  const Problem prob = build_problem(cfg);
  if (prob.family == "toy") fail(ErrorKind::InvalidConfig, "assess needs a model pair (dgp or oracle)");
  const fs::path dir = out_dir(cfg);
  const double cap = static_cast<double>(cfg.smc.n_particles - 1);
  Table t{{"psi", "variance", "ratio_to_n_minus_1", "promising", "n_stages_m0"}, {}};
  json rows = json::array();
  for (double psi : cfg.psi) {
    Vec jump;
    int stages_m0 = 0;
    if (psi == 0.0) {
      const LikelihoodTempering lt(prob.m1);
      jump = jump_log_weights(lt, init_stage0(lt, cfg.smc));
    } else {
      SmcRunResult m0run;
      if (!cfg.m0_run.empty()) m0run = load_m0_run(cfg.m0_run, prob.m0->name());
      if (!m0run.complete || m0run.terminal_phi != psi) {
        SmcConfig c = cfg.smc;
        c.seed = preliminary_seed(cfg.smc.seed);
        m0run = run_tempered_m0(prob.m0, psi, c);
      }
      stages_m0 = m0run.n_stages;
      const auto bridge = make_mt_bridge(prob.m0, prob.m1, psi, theta0_mode(cfg), m0run);
      jump = jump_log_weights(*bridge, init_stage0(*bridge, cfg.smc, &m0run));
    }
    const double v = normalized_weight_variance(std::span<const double>(jump.data(), static_cast<std::size_t>(jump.size())));
    const bool promising = v / cap < 0.5;
    t.add_row({format_number(psi), format_number(v), format_number(v / cap), promising ? "1" : "0",
               std::to_string(stages_m0)});
    rows.push_back({{"psi", psi}, {"variance", v}, {"ratio_to_n_minus_1", v / cap}, {"promising", promising}});
  }
  write_table(dir / "weight_variance.csv", t);
  write_json(dir / "assess.json", {{"version", kVersion}, {"model", cfg.model}, {"n_particles", cfg.smc.n_particles},
                                   {"rows", rows}, {"files", {"weight_variance.csv", "assess.json"}}});
  std::cout << t.to_csv();
  return 0;
}

int cmd_report(const RunConfig& cfg) {
  const fs::path dir(cfg.out);
  fs::path record;
  for (const char* name : {"summary.json", "sweep.json", "assess.json"}) {
    if (fs::exists(dir / name)) {
      record = dir / name;
      break;
    }
  }
  if (record.empty()) fail(ErrorKind::IoError, "no run record in " + dir.string());
  const json j = read_json(record);
  if (!j.contains("files")) fail(ErrorKind::IoError, record.string() + " lists no files");
  for (const auto& f : j["files"]) {
    const fs::path p = dir / f.get<std::string>();
    if (!fs::exists(p)) fail(ErrorKind::IoError, "declared output missing: " + p.string());
    const std::string ext = p.extension().string();
    if (ext == ".json") {
      (void)read_json(p);
    } else if (ext == ".csv") {
      (void)read_text(p);
    }
  }
  if (record.filename() == "summary.json") {
    const auto n = j.at("n_particles").get<Eigen::Index>();
    const std::string text = read_text(dir / "particles.csv");
    const auto lines = static_cast<Eigen::Index>(std::count(text.begin(), text.end(), '\n'));
    if (lines != n + 1) fail(ErrorKind::IoError, "particles.csv has " + std::to_string(lines - 1) + " rows, expected " + std::to_string(n));
    std::cout << "model " << j["model"].get<std::string>() << ", strategy " << j["strategy"].get<std::string>()
              << ", psi* " << j["psi_star"] << "\n"
              << "log MDD " << j["log_mdd"] << " after " << j["n_stages"] << " stages (" << j["n_stages_m0"]
              << " in the M0 run)\n";
    for (const auto& p : j["posterior"]) {
      std::cout << "  " << p["name"].get<std::string>() << "  mean " << p["mean"] << "  90% [" << p["q05"] << ", "
                << p["q95"] << "]\n";
    }
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  enum Kind { Str, Int, UInt, Real, RealList } kind;
  const char* help;
};

const std::vector<FlagSpec> kFlags = {
    {"--model", "model", FlagSpec::Str, "toy, dgp1, dgp2, dgp3 or oracle"},
    {"--data", "data", FlagSpec::Str, "data CSV instead of simulating from the preset"},
    {"--data-seed", "data_seed", FlagSpec::UInt, "seed of the simulated data set"},
    {"--T", "T", FlagSpec::Int, "sample size of simulated data"},
    {"--strategy", "strategy", FlagSpec::Str, "lt, dt or mt"},
    {"--psi", "psi", FlagSpec::RealList, "comma-separated psi* values"},
    {"--particles", "particles", FlagSpec::Int, "number of SMC particles N"},
    {"--alpha", "alpha", FlagSpec::Real, "ESS reduction target per stage"},
    {"--seed", "seed", FlagSpec::UInt, "sampler seed"},
    {"--n-run", "n_run", FlagSpec::Int, "independent runs per cell"},
    {"--n-mh", "n_mh", FlagSpec::Int, "Metropolis steps per stage"},
    {"--n-blocks", "n_blocks", FlagSpec::Int, "parameter blocks per Metropolis step"},
    {"--bspf-particles", "bspf_particles", FlagSpec::Int, "particle-filter particles"},
    {"--max-stages", "max_stages", FlagSpec::Int, "stage cap"},
    {"--profile", "profile", FlagSpec::Str, "desk or full"},
    {"--out", "out", FlagSpec::Str, "output directory"},
    {"--m0-run", "m0_run", FlagSpec::Str, "directory of a stored tempered-M0 run"},
    {"--theta0-mode", "theta0_mode", FlagSpec::Str, "fixed or enlarged"},
    {"--dt-variant", "dt_variant", FlagSpec::Str, "prefix or anchored"},
    {"--dt-t0", "dt_t0", FlagSpec::Int, "anchor sample size for anchored data tempering"},
    {"--toy-mu", "toy_mu", FlagSpec::Real, "mean of the toy starting density"},
    {"--toy-sigma", "toy_sigma", FlagSpec::Real, "SD of the toy starting density"},
};

json flag_value(const FlagSpec& f, const std::string& text) {
  try {
    std::size_t used = 0;
    switch (f.kind) {
      case FlagSpec::Str:
        return text;
      case FlagSpec::Int: {
        const long v = std::stol(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case FlagSpec::UInt: {
        if (!text.empty() && text[0] == '-') break;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case FlagSpec::Real: {
        const double v = std::stod(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case FlagSpec::RealList: {
        json arr = json::array();
        std::size_t pos = 0;
        while (pos <= text.size()) {
          std::size_t end = text.find(',', pos);
          if (end == std::string::npos) end = text.size();
          const std::string item = text.substr(pos, end - pos);
          const double v = std::stod(item, &used);
          if (used != item.size()) fail(ErrorKind::InvalidConfig, "bad number in " + std::string(f.flag));
          arr.push_back(v);
          pos = end + 1;
        }
        return arr;
      }
    }
  } catch (const std::logic_error&) {
  }
  fail(ErrorKind::InvalidConfig, "invalid value '" + text + "' for " + f.flag);
}

}  // namespace

int run_cli(int argc, char** argv) {
  std::signal(SIGINT, on_sigint);
  CLI::App app{"Tempered sequential Monte Carlo estimation"};
  app.require_subcommand(1);
  std::map<std::string, std::string> values;
  std::string config_path;
  std::vector<std::pair<CLI::App*, std::vector<CLI::Option*>>> subs;
  const std::vector<std::pair<const char*, const char*>> names = {
      {"simulate", "simulate a VAR-SV data set"},
      {"estimate", "run the sampler once and write a run record"},
      {"sweep", "multi-run statistics across psi* (or the toy grid)"},
      {"assess", "importance-weight variance per psi*"},
      {"report", "check and print a run directory"}};
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    std::vector<CLI::Option*> opts;
    for (const auto& f : kFlags) opts.push_back(sub->add_option(f.flag, values[f.key], f.help));
    sub->add_option("--config", config_path, "JSON config file; flags override its keys");
    subs.emplace_back(sub, opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json(ErrorKind::InvalidConfig, e.what()).dump() << "\n";
    return 2;
  }

  try {
    for (const auto& [sub, opts] : subs) {
      if (!sub->parsed()) continue;
      json flags = json::object();
      for (std::size_t k = 0; k < kFlags.size(); ++k) {
        if (opts[k]->count() > 0) flags[kFlags[k].key] = flag_value(kFlags[k], values[kFlags[k].key]);
      }
      // simulate has no sampler, so --seed names the data seed there.
      if (sub->get_name() == "simulate" && flags.contains("seed") && !flags.contains("data_seed")) {
        flags["data_seed"] = flags["seed"];
      }
      json file = json::object();
      if (!config_path.empty()) {
        if (!fs::exists(config_path)) fail(ErrorKind::InvalidConfig, "config file not found: " + config_path);
        try {
          file = json::parse(read_text(config_path));
        } catch (const json::exception& e) {
          fail(ErrorKind::InvalidConfig, std::string("config file is not valid JSON: ") + e.what());
        }
      }
      const RunConfig cfg = resolve_config(file, flags);
      cfg.validate();
      const std::string name = sub->get_name();
      if (name == "simulate") return cmd_simulate(cfg);
      if (name == "estimate") return cmd_estimate(cfg);
      if (name == "sweep") return cmd_sweep(cfg);
      if (name == "assess") return cmd_assess(cfg);
      return cmd_report(cfg);
    }
  } catch (const Error& e) {
    std::cerr << error_json(e.kind(), e.what()).dump() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << error_json(ErrorKind::IoError, e.what()).dump() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Internal"}, {"message", e.what()}, {"exit_code", 3}}.dump() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace tsmc::cli
