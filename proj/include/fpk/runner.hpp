#pragma once

#include <string>

#include "fpk/config.hpp"
#include "fpk/solver.hpp"

namespace fpk {

// Executes the configured mode and writes the artifacts into
// cfg.output_dir. Returns the process exit status: 0 on success, otherwise
// the numeric class of the first fatal error.
int run(const ExperimentConfig& cfg);

// Fixed formatting for every number that lands in an output file; 17
// significant digits round-trip doubles so reruns are bit-identical.
std::string format_double(double v);

// One sweep row; exposed for tests of the writer contract.
struct SweepRow {
  double lambda = 0.0;
  std::optional<double> theta_plus, theta_minus;
  std::optional<double> norm_plus, norm_minus;
  std::optional<double> residual_plus, residual_minus;
  std::string flags;
};

std::string sweep_csv_header();
std::string sweep_csv_line(const SweepRow& row);

}  // namespace fpk
