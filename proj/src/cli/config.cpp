#include "tsmc/cli/config.hpp"

#include <filesystem>
#include <set>

#include "tsmc/core/error.hpp"
#include <cmath>

namespace tsmc::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kModels = {"toy", "dgp1", "dgp2", "dgp3", "oracle"};

template <class T>
void read(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::InvalidConfig, std::string("config key '") + key + "' has the wrong type");
  }
}

bool is_var(const std::string& model) { return model.rfind("dgp", 0) == 0; }

}  // namespace

void RunConfig::validate() const {
  if (!kModels.count(model)) fail(ErrorKind::InvalidConfig, "unknown model '" + model + "'");
  if (strategy != "lt" && strategy != "dt" && strategy != "mt") {
    fail(ErrorKind::InvalidConfig, "strategy must be lt, dt or mt");
  }
  if (psi.empty()) fail(ErrorKind::InvalidConfig, "psi list is empty");
  for (double p : psi) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::InvalidConfig, "psi values must lie in [0,1]");
  }
  smc.validate();
  if (bspf.n_particles < 2) fail(ErrorKind::InvalidConfig, "bspf_particles must be at least 2");
  if (n_run < 1) fail(ErrorKind::InvalidConfig, "n_run must be at least 1");
  if (periods < 1) fail(ErrorKind::InvalidConfig, "T must be positive");
  if (is_var(model) && data.empty() && periods < 2) fail(ErrorKind::InvalidConfig, "the VAR needs T >= 2");
  if (profile != "desk" && profile != "full") fail(ErrorKind::InvalidConfig, "profile must be desk or full");
  if (theta0_mode != "fixed" && theta0_mode != "enlarged") {
    fail(ErrorKind::InvalidConfig, "theta0_mode must be fixed or enlarged");
  }
  if (dt_variant != "prefix" && dt_variant != "anchored") {
    fail(ErrorKind::InvalidConfig, "dt_variant must be prefix or anchored");
  }
  if (dt_t0 < 0) fail(ErrorKind::InvalidConfig, "dt_t0 must be nonnegative");
  if (!(toy_sigma > 0.0) || !std::isfinite(toy_mu)) fail(ErrorKind::InvalidConfig, "toy proposal must be a proper normal");
  if (!data.empty() && !std::filesystem::exists(data)) fail(ErrorKind::InvalidConfig, "data file not found: " + data);
  if (!m0_run.empty() && !std::filesystem::exists(m0_run)) {
    fail(ErrorKind::InvalidConfig, "M0 run not found: " + m0_run);
  }
}

json RunConfig::to_json() const {
  return json{{"model", model},
              {"data", data},
              {"data_seed", data_seed},
              {"T", periods},
              {"strategy", strategy},
              {"psi", psi},
              {"particles", smc.n_particles},
              {"alpha", smc.alpha},
              {"resample_threshold", smc.resample_threshold},
              {"n_mh", smc.n_mh},
              {"n_blocks", smc.n_blocks},
              {"initial_scale", smc.initial_scale},
              {"target_accept", smc.target_accept},
              {"seed", smc.seed},
              {"max_stages", smc.max_stages},
              {"bspf_particles", bspf.n_particles},
              {"n_run", n_run},
              {"out", out},
              {"profile", profile},
              {"m0_run", m0_run},
              {"theta0_mode", theta0_mode},
              {"dt_variant", dt_variant},
              {"dt_t0", dt_t0},
              {"toy_mu", toy_mu},
              {"toy_sigma", toy_sigma}};
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidConfig, "config must be a JSON object");
  const json known = RunConfig{}.to_json();
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) fail(ErrorKind::InvalidConfig, "unknown config key '" + key + "'");
  }
  RunConfig c;
  read(j, "model", c.model);
  read(j, "data", c.data);
  read(j, "data_seed", c.data_seed);
  read(j, "T", c.periods);
  read(j, "strategy", c.strategy);
  if (j.contains("psi") && j["psi"].is_number()) {
    c.psi = {j["psi"].get<double>()};
  } else {
    read(j, "psi", c.psi);
  }
  read(j, "particles", c.smc.n_particles);
  read(j, "alpha", c.smc.alpha);
  read(j, "resample_threshold", c.smc.resample_threshold);
  read(j, "n_mh", c.smc.n_mh);
  read(j, "n_blocks", c.smc.n_blocks);
  read(j, "initial_scale", c.smc.initial_scale);
  read(j, "target_accept", c.smc.target_accept);
  read(j, "seed", c.smc.seed);
  read(j, "max_stages", c.smc.max_stages);
  read(j, "bspf_particles", c.bspf.n_particles);
  read(j, "n_run", c.n_run);
  read(j, "out", c.out);
  read(j, "profile", c.profile);
  read(j, "m0_run", c.m0_run);
  read(j, "theta0_mode", c.theta0_mode);
  read(j, "dt_variant", c.dt_variant);
  read(j, "dt_t0", c.dt_t0);
  read(j, "toy_mu", c.toy_mu);
  read(j, "toy_sigma", c.toy_sigma);
  return c;
}

json profile_defaults(const std::string& profile, const std::string& model) {
  const bool full = profile == "full";
  if (profile != "desk" && !full) fail(ErrorKind::InvalidConfig, "profile must be desk or full");
  if (model == "toy") return {{"particles", 1000}, {"n_run", full ? 100 : 20}};
  return {{"T", full ? 100 : 50}, {"particles", full ? 500 : 200}, {"bspf_particles", 100},
          {"n_run", full ? 200 : 20}};
}

RunConfig resolve_config(const json& file_keys, const json& flag_keys) {
  auto pick = [&](const char* key, const std::string& fallback) {
    if (flag_keys.contains(key)) return flag_keys[key].get<std::string>();
    if (file_keys.contains(key)) return file_keys[key].get<std::string>();
    return fallback;
  };
  std::string profile, model;
  try {
    profile = pick("profile", "desk");
    model = pick("model", "dgp1");
  } catch (const json::exception&) {
    fail(ErrorKind::InvalidConfig, "profile and model must be strings");
  }
  json merged = profile_defaults(profile, model);
  merged["profile"] = profile;
  merged.merge_patch(file_keys);
  merged.merge_patch(flag_keys);
  return RunConfig::from_json(merged);
}

}  // namespace tsmc::cli
