#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsmc/smc/bridge.hpp"
#include "tsmc/smc/particles.hpp"

namespace tsmc::cli {

namespace fs = std::filesystem;

/// Numeric CSV; a first line that does not parse as numbers is a header.
/// Throws IoError.
Mat read_matrix_csv(const fs::path& path);
std::string matrix_csv(const Mat& m, const std::vector<std::string>& header);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);
void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

/// Final swarm: one row per particle, parameter columns then log_weight
/// and, with `with_cache`, the likelihood cache.
std::string particles_csv(const ParticleSystem& ps, const std::vector<ParamInfo>& layout, bool with_cache);
/// Per-stage schedule, ESS, resampling flag, acceptance, scale, increment.
std::string stages_csv(const SmcRunResult& run);

/// Persists a tempered-M0 run so a later model-tempering run can start from
/// it: `dir`/run.json plus `dir`/particles.csv with the cache.
void save_m0_run(const fs::path& dir, const SmcRunResult& run, const std::string& model,
                 const std::vector<ParamInfo>& layout);
/// Throws IoError or MissingCache.
SmcRunResult load_m0_run(const fs::path& dir, const std::string& model);

}  // namespace tsmc::cli
