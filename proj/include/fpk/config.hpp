#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpk/params.hpp"

namespace fpk {

enum class RunMode { thresholds, solve, sweep, oracle };
enum class OutputFormat { csv, json };

const char* run_mode_name(RunMode m);

struct SweepSpec {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int count = 0;
  bool log_spacing = false;
};

// Flat key=value experiment configuration ('#' comments, dotted keys).
// Recognized keys:
//   a, b, p, q, r, s, lambda, f, g,
//   grid.left, grid.right, grid.n_nodes,
//   mode, sweep.lambda_min, sweep.lambda_max, sweep.count, sweep.log_spacing,
//   output.dir, output.format, seed, restarts, c_star, m0, trunc.k
struct ExperimentConfig {
  ProblemParams params;
  double grid_left = -1.0;
  double grid_right = 1.0;
  int grid_n_nodes = 31;
  RunMode mode = RunMode::solve;
  std::optional<SweepSpec> sweep;
  std::string output_dir = ".";
  OutputFormat output_format = OutputFormat::csv;
  std::uint64_t seed = 42;
  int restarts = 16;
  std::optional<double> trunc_k;
  int workers = 1;  // CLI-only override, not a config key
};

// Parses and validates; collects every violation (field-prefixed messages)
// before throwing a single VALIDATION_ERROR.
ExperimentConfig parse_config(const std::string& text);

// Reads the file (IO_ERROR on failure) and parses it.
ExperimentConfig load_config(const std::string& path);

// Validation used by both the loader and tests: returns all violations.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

}  // namespace fpk
