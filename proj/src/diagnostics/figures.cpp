#include "tsmc/diagnostics/figures.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace tsmc {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) fail(ErrorKind::InvalidConfig, "table row width differs from header");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k > 0) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::IoError, "cannot write " + path.string());
  f << table.to_csv();
  if (!f) fail(ErrorKind::IoError, "write failed for " + path.string());
}

namespace {

std::string num(double v) { return format_number(v); }

double band(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  const std::vector<double> w(v.size(), 1.0);
  return weighted_quantile(v, w, q);
}

}  // namespace

Table log_mdd_profile(const SweepReport& rep) {
  Table t{{"psi", "n_ok", "mean_log_mdd", "sd_log_mdd", "band90_lo", "band90_hi", "band95_lo", "band95_hi"}, {}};
  for (const auto& c : rep.cells) {
    const auto v = c.stats.log_mdds();
    t.add_row({num(c.psi), std::to_string(v.size()), num(c.stats.mean_log_mdd), num(c.stats.sd_log_mdd),
               num(band(v, 0.05)), num(band(v, 0.95)), num(band(v, 0.025)), num(band(v, 0.975))});
  }
  return t;
}

Table weight_variance_profile(const SweepReport& rep, int n_particles, double promising_ratio) {
  Table t{{"psi", "mean_variance", "sd_variance", "ratio_to_n_minus_1", "promising"}, {}};
  const double cap = static_cast<double>(n_particles - 1);
  for (const auto& c : rep.cells) {
    const double ratio = c.stats.mean_weight_variance / cap;
    t.add_row({num(c.psi), num(c.stats.mean_weight_variance), num(c.stats.sd_weight_variance), num(ratio),
               ratio < promising_ratio ? "1" : "0"});
  }
  return t;
}

Table runtime_profile(const SweepReport& rep) {
  Table t{{"psi", "mean_stages_m1", "mean_stages_m0", "tau0", "tau1", "mean_wall", "r_predicted", "r_limit",
           "r_measured"},
          {}};
  for (std::size_t k = 0; k < rep.cells.size(); ++k) {
    const auto& s = rep.cells[k].stats;
    t.add_row({num(rep.cells[k].psi), num(s.mean_stages), num(s.mean_stages_m0), num(rep.tau0), num(rep.tau1),
               num(s.mean_wall), num(rep.predicted_reduction(k)), num(rep.reduction_limit(k)),
               num(rep.measured_reduction(k))});
  }
  return t;
}

Table posterior_profile(const SweepReport& rep, const std::vector<ParamInfo>& layout) {
  Table t{{"psi", "param", "mean_post_mean", "sd_post_mean", "mean_q05", "mean_q95", "mean_q025", "mean_q975"}, {}};
  for (const auto& c : rep.cells) {
    if (c.stats.runs.empty()) continue;
    for (std::size_t j = 0; j < c.stats.mean_post_mean.size(); ++j) {
      double q05 = 0, q95 = 0, q025 = 0, q975 = 0;
      for (const auto& r : c.stats.runs) {
        q05 += r.posterior[j].q05;
        q95 += r.posterior[j].q95;
        q025 += r.posterior[j].q025;
        q975 += r.posterior[j].q975;
      }
      const double n = static_cast<double>(c.stats.runs.size());
      t.add_row({num(c.psi), j < layout.size() ? layout[j].name : std::to_string(j), num(c.stats.mean_post_mean[j]),
                 num(c.stats.sd_post_mean[j]), num(q05 / n), num(q95 / n), num(q025 / n), num(q975 / n)});
    }
  }
  return t;
}

Table cell_status(const SweepReport& rep) {
  Table t{{"psi", "n_ok", "n_failed", "status", "failed_runs"}, {}};
  for (const auto& c : rep.cells) {
    std::string status = "ok", failed;
    for (const auto& f : c.stats.failures) {
      if (status == "ok") status = std::string(to_string(f.kind));
      if (!failed.empty()) failed += ' ';
      failed += std::to_string(f.run);
    }
    t.add_row({num(c.psi), std::to_string(c.stats.runs.size()), std::to_string(c.stats.failures.size()), status,
               failed});
  }
  return t;
}

Table toy_grid_panel(const std::vector<ToyGridPoint>& grid) {
  Table t{{"mu", "sigma", "discrepancy", "mean_n_phi", "sd_n_phi", "mean_log_mdd", "sd_log_mdd"}, {}};
  for (const auto& g : grid) {
    t.add_row({num(g.mu), num(g.sigma), num(g.discrepancy), num(g.stats.mean_stages), num(g.stats.sd_stages),
               num(g.stats.mean_log_mdd), num(g.stats.sd_log_mdd)});
  }
  return t;
}

}  // namespace tsmc
