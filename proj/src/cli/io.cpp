#include "tsmc/cli/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tsmc/core/error.hpp"
#include "tsmc/diagnostics/figures.hpp"

namespace tsmc::cli {

using nlohmann::json;

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) end = line.size();
    std::size_t b = pos, e = end;
    while (b < e && (line[b] == ' ' || line[b] == '\t')) ++b;
    while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t' || line[e - 1] == '\r')) --e;
    double v = 0.0;
    if (line.compare(b, e - b, "nan") == 0) {
      v = std::numeric_limits<double>::quiet_NaN();
    } else if (line.compare(b, e - b, "inf") == 0) {
      v = std::numeric_limits<double>::infinity();
    } else if (line.compare(b, e - b, "-inf") == 0) {
      v = -std::numeric_limits<double>::infinity();
    } else {
      const auto r = std::from_chars(line.data() + b, line.data() + e, v);
      if (r.ec != std::errc() || r.ptr != line.data() + e || b == e) return false;
    }
    out.push_back(v);
    pos = end + 1;
  }
  return true;
}

}  // namespace

Mat read_matrix_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::IoError, "cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::vector<double> vals;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty() || line == "\r") continue;
    if (!parse_row(line, vals)) {
      if (first) {
        first = false;
        continue;
      }
      fail(ErrorKind::IoError, "malformed numeric row in " + path.string());
    }
    first = false;
    if (!rows.empty() && vals.size() != rows.front().size()) fail(ErrorKind::IoError, "ragged rows in " + path.string());
    rows.push_back(vals);
  }
  Mat m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

std::string matrix_csv(const Mat& m, const std::vector<std::string>& header) {
  Table t{header, {}};
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_number(m(i, j)));
    t.add_row(std::move(row));
  }
  return t.to_csv();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + path.parent_path().string());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::IoError, "cannot write " + path.string());
  f << text;
  if (!f) fail(ErrorKind::IoError, "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::IoError, "invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::string particles_csv(const ParticleSystem& ps, const std::vector<ParamInfo>& layout, bool with_cache) {
  std::vector<std::string> header;
  for (const auto& p : layout) header.push_back(p.name);
  header.push_back("log_weight");
  if (with_cache) {
    for (Eigen::Index c = 0; c < ps.cache.cols(); ++c) header.push_back("cache" + std::to_string(c));
  }
  Table t{header, {}};
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < ps.values.cols(); ++j) row.push_back(format_number(ps.values(r, j)));
    row.push_back(format_number(ps.log_weights[r]));
    if (with_cache) {
      for (Eigen::Index c = 0; c < ps.cache.cols(); ++c) row.push_back(format_number(ps.cache(r, c)));
    }
    t.add_row(std::move(row));
  }
  return t.to_csv();
}

std::string stages_csv(const SmcRunResult& run) {
  Table t{{"stage", "phi", "ess", "resampled", "accept_rate", "scale", "log_mdd_increment"}, {}};
  for (int n = 0; n < run.n_stages; ++n) {
    const auto k = static_cast<std::size_t>(n);
    t.add_row({std::to_string(n + 1), format_number(run.schedule[k]), format_number(run.ess_history[k]),
               run.resampled_flags[k] ? "1" : "0", format_number(run.accept_rates[k]), format_number(run.scales[k]),
               format_number(run.log_mdd_increments[k])});
  }
  return t.to_csv();
}

void save_m0_run(const fs::path& dir, const SmcRunResult& run, const std::string& model,
                 const std::vector<ParamInfo>& layout) {
  if (!run.complete) fail(ErrorKind::IncompleteRun, "refusing to store an incomplete M0 run");
  std::vector<int> flags;
  for (bool b : run.resampled_flags) flags.push_back(b ? 1 : 0);
  const json j{{"model", model},
               {"terminal_phi", run.terminal_phi},
               {"n_particles", run.final_particles.size()},
               {"dim", run.final_particles.dim()},
               {"cache_width", run.final_particles.cache.cols()},
               {"n_stages", run.n_stages},
               {"final_phi", run.final_particles.phi},
               {"schedule", run.schedule},
               {"ess", run.ess_history},
               {"resampled", flags},
               {"accept_rates", run.accept_rates},
               {"scales", run.scales},
               {"log_mdd_increments", run.log_mdd_increments},
               {"likelihood_evals", run.likelihood_evals}};
  write_json(dir / "run.json", j);
  write_text(dir / "particles.csv", particles_csv(run.final_particles, layout, true));
}

SmcRunResult load_m0_run(const fs::path& dir, const std::string& model) {
  if (!fs::exists(dir / "run.json") || !fs::exists(dir / "particles.csv")) {
    fail(ErrorKind::MissingCache, "no stored M0 run in " + dir.string());
  }
  const json j = read_json(dir / "run.json");
  SmcRunResult r;
  try {
    if (j.at("model").get<std::string>() != model) {
      fail(ErrorKind::LayoutMismatch, "stored run belongs to model " + j.at("model").get<std::string>());
    }
    r.terminal_phi = j.at("terminal_phi").get<double>();
    r.n_stages = j.at("n_stages").get<int>();
    r.schedule = j.at("schedule").get<std::vector<double>>();
    r.ess_history = j.at("ess").get<std::vector<double>>();
    for (int b : j.at("resampled").get<std::vector<int>>()) r.resampled_flags.push_back(b != 0);
    r.accept_rates = j.at("accept_rates").get<std::vector<double>>();
    r.scales = j.at("scales").get<std::vector<double>>();
    r.log_mdd_increments = j.at("log_mdd_increments").get<std::vector<double>>();
    r.likelihood_evals = j.at("likelihood_evals").get<std::map<std::string, long long>>();
    const auto n = j.at("n_particles").get<Eigen::Index>();
    const auto d = j.at("dim").get<Eigen::Index>();
    const auto w = j.at("cache_width").get<Eigen::Index>();
    const Mat m = read_matrix_csv(dir / "particles.csv");
    if (m.rows() != n || m.cols() != d + 1 + w) fail(ErrorKind::MissingCache, "stored swarm has the wrong shape");
    ParticleSystem& ps = r.final_particles;
    ps.values = m.leftCols(d);
    ps.log_weights = m.col(d);
    ps.cache = m.rightCols(w);
    ps.stage = r.n_stages;
    ps.phi = j.at("final_phi").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorKind::IoError, std::string("malformed run.json: ") + e.what());
  }
  r.complete = true;
  return r;
}

}  // namespace tsmc::cli
