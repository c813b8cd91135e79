#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "tsmc/bridges/model.hpp"
#include "tsmc/cli/config.hpp"
#include "tsmc/core/error.hpp"
#include "tsmc/models/toy.hpp"

namespace tsmc::cli {

inline constexpr const char* kVersion = "1.0.0";

/// 2 for configuration errors, 4 for I/O errors, 3 for numerical failures.
int exit_code(ErrorKind kind);
nlohmann::json error_json(ErrorKind kind, const std::string& message);

/// Data and model pair behind a configuration.
struct Problem {
  std::string family;  // "toy", "var" or "oracle"
  Mat data;
  ModelPtr m0, m1;
  GaussianToySpec toy;
};
Problem build_problem(const RunConfig& cfg);

/// Each command writes its artifacts under cfg.out and returns an exit code.
int cmd_simulate(const RunConfig& cfg);
int cmd_estimate(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_assess(const RunConfig& cfg);
/// Checks and prints the artifacts of an estimate or sweep directory.
int cmd_report(const RunConfig& cfg);

/// Full command line entry point; errors are reported as JSON on stderr.
int run_cli(int argc, char** argv);

}  // namespace tsmc::cli
