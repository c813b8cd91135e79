#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsmc/diagnostics/multi_run.hpp"

namespace tsmc {

/// Shortest text that round-trips a double at 17 significant digits;
/// "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

/// A figure panel or report as a CSV table.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string to_csv() const;
};

/// Throws IoError.
void write_table(const std::filesystem::path& path, const Table& table);

/// psi, log MDD mean and SD across runs, and 90% / 95% bands of the run
/// estimates.
Table log_mdd_profile(const SweepReport& report);
/// psi, mean and SD of the stage-0 weight variance, its ratio to N - 1 and
/// a flag for ratios below `promising_ratio`.
Table weight_variance_profile(const SweepReport& report, int n_particles, double promising_ratio = 0.5);
/// psi, mean stage counts, taus, predicted, limiting and measured reductions.
Table runtime_profile(const SweepReport& report);
/// psi, parameter, mean and SD across runs of the posterior mean, and the
/// mean 90% / 95% posterior bands.
Table posterior_profile(const SweepReport& report, const std::vector<ParamInfo>& layout);
/// psi, status ("ok" or the error kind), and the failing runs.
Table cell_status(const SweepReport& report);

struct ToyGridPoint {
  double mu = 0.0;
  double sigma = 0.0;
  double discrepancy = 0.0;
  MultiRunStats stats;
};
/// mu, sigma, discrepancy, mean and SD of the stage count and the log MDD.
Table toy_grid_panel(const std::vector<ToyGridPoint>& grid);

}  // namespace tsmc
