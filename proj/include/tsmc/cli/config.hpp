#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsmc/filters/bspf.hpp"
#include "tsmc/smc/particles.hpp"

namespace tsmc::cli {

/// Everything a command needs. Serialises to a flat JSON object whose keys
/// match the long flag names with dashes replaced by underscores.
struct RunConfig {
  std::string model = "dgp1";  // toy | dgp1 | dgp2 | dgp3 | oracle
  std::string data;            // external data CSV; simulated from the preset when empty
  std::uint64_t data_seed = 1;
  int periods = 50;            // T
  std::string strategy = "lt"; // lt | dt | mt
  std::vector<double> psi = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  SmcConfig smc;
  BspfConfig bspf;
  int n_run = 20;
  std::string out = "out";
  std::string profile = "desk";  // desk | full
  std::string m0_run;
  std::string theta0_mode = "fixed";  // fixed | enlarged
  std::string dt_variant = "prefix";  // prefix | anchored
  int dt_t0 = 0;
  double toy_mu = -3.0;
  double toy_sigma = 0.2;

  /// Throws InvalidConfig.
  void validate() const;
  nlohmann::json to_json() const;
  /// Unknown keys and wrong types raise InvalidConfig.
  static RunConfig from_json(const nlohmann::json& j);
};

/// Scale settings of a profile for a model family.
nlohmann::json profile_defaults(const std::string& profile, const std::string& model);

/// Profile defaults, then the config file, then explicit flags.
RunConfig resolve_config(const nlohmann::json& file_keys, const nlohmann::json& flag_keys);

}  // namespace tsmc::cli
