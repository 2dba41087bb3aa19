#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fpk/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nehari-manifold solver for the fractional p-Kirchhoff problem"};

  std::string config_path;
  std::string mode_override, out_override;
  long long seed_override = -1;
  int restarts_override = -1;
  int workers = 1;

  app.add_option("config", config_path, "experiment config file (flat key=value)")->required();
  app.add_option("--mode", mode_override, "override mode: thresholds | solve | sweep | oracle");
  app.add_option("--out", out_override, "override output directory");
  app.add_option("--seed", seed_override, "override RNG seed");
  app.add_option("--restarts", restarts_override, "override restart count");
  app.add_option("--workers", workers, "concurrent sweep workers (default 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    fpk::ExperimentConfig cfg = fpk::load_config(config_path);
    if (!mode_override.empty()) {
      if (mode_override == "thresholds") {
        cfg.mode = fpk::RunMode::thresholds;
      } else if (mode_override == "solve") {
        cfg.mode = fpk::RunMode::solve;
      } else if (mode_override == "sweep") {
        cfg.mode = fpk::RunMode::sweep;
      } else if (mode_override == "oracle") {
        cfg.mode = fpk::RunMode::oracle;
      } else {
        std::cerr << "error: unknown mode '" << mode_override << "'\n";
        return static_cast<int>(fpk::Errc::validation_error);
      }
      // Re-validate the mode/sweep pairing after the override.
      const auto errs = fpk::validate_config(cfg);
      if (!errs.empty()) {
        for (const auto& e : errs) std::cerr << "error: " << e << "\n";
        return static_cast<int>(fpk::Errc::validation_error);
      }
    }
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (restarts_override > 0) cfg.restarts = restarts_override;
    cfg.workers = workers;

    const int status = fpk::run(cfg);
    if (status == 0) {
      std::cout << "mode " << fpk::run_mode_name(cfg.mode) << " finished; artifacts in "
                << cfg.output_dir << "\n";
    }
    return status;
  } catch (const fpk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  }
}
