#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpk/fiber.hpp"
#include "fpk/thresholds.hpp"

namespace fpk {

enum class ProjectBranch { plus, minus, star };

// A point of the Nehari set: u = t * direction with the fiber derivative
// vanishing at t, carrying its classification data.
struct NehariPoint {
  DiscreteFunction u;
  Branch branch = Branch::plus;
  double energy = 0.0;          // value of the active functional (J or J_k)
  double fiber_residual = 0.0;  // |phi'_u(1)| recomputed from the vector
  double second_deriv = 0.0;    // phi''_u(1)
  double weak_residual = 0.0;   // max-norm of the active energy gradient
  double t_scale = 1.0;         // fiber root used by the projection
  FiberScalars scalars;
};

// Scales u onto the requested Nehari branch via its fiber root.
NehariPoint project_to_nehari(const DiscreteFunction& u, ProjectBranch branch,
                              const Problem& problem,
                              std::optional<double> two_root_threshold = std::nullopt);

struct SolveOptions {
  std::uint64_t seed = 42;
  int restarts = 16;
  int max_iter = 10000;
  double grad_tol = 1e-8;
  int rayleigh_restarts = 16;
  std::optional<double> trunc_k;  // override for the r < 2p truncation level
};

struct BranchOutcome {
  std::optional<NehariPoint> point;
  std::string status;  // converged | stagnated | max_iter | no_admissible_start
  int starts_tried = 0;
  int coercivity_violations = 0;
  bool start_perturbed = false;              // user start sat in H0/G0
  std::optional<double> energy_untruncated;  // J_lambda at the same point
};

// Minimizes the active functional over the requested branch: multi-start
// projected gradient descent with fiber re-projection after every step. A
// user-supplied start in a degenerate sign class (H0/G0) is perturbed by
// 1e-8 relative noise and the perturbation recorded.
// Throws NO_ADMISSIBLE_START when no sampled direction admits the branch.
BranchOutcome minimize_branch(Branch branch, const Problem& problem, const Constants& constants,
                              const ThresholdTable& thresholds, const SolveOptions& opts,
                              std::optional<DiscreteFunction> start = std::nullopt);

// Nodal absolute value; the seminorm can only shrink (reverse triangle
// inequality pairwise), so an increase flags a quadrature bug.
DiscreteFunction nonneg_projectize(const DiscreteFunction& u);

struct SolveReport {
  Regime regime = Regime::subcritical_high;
  ThresholdTable thresholds;
  std::optional<NehariPoint> plus_solution;
  std::optional<NehariPoint> minus_solution;
  std::optional<double> theta_plus, theta_minus;
  std::optional<double> distinctness;  // ||u+ - u-||_{X0}
  std::optional<double> e_lambda_plus, e_lambda_minus;

  std::optional<TruncationParams> truncation;
  std::optional<AprioriReport> apriori_plus, apriori_minus;
  std::optional<double> energy_match_plus, energy_match_minus;  // |J_k - J|

  std::optional<double> critical_level;  // section-4 diagnostic threshold
  std::optional<bool> compactness_certified;

  std::vector<std::string> flags;
  std::string status_plus, status_minus;
  std::uint64_t seed = 0;
  int restarts = 0;
  int coercivity_violations = 0;
  bool m0_defaulted = true;
  double wall_seconds = 0.0;
};

// Full regime-dispatched solve as described by the existence theorems:
// both branches below the applicable threshold, single branch otherwise,
// truncated machinery for r < 2p, compactness diagnostic for r = p*.
SolveReport solve(const GridPtr& grid, const ProblemParams& params, const SolveOptions& opts = {});

struct OracleResult {
  std::optional<double> theta_plus;
  std::optional<double> theta_minus;
  long directions_scanned = 0;
};

// Brute-force verification oracle for micro-grids (n_nodes <= 5): dense scan
// of the direction sphere in spherical coordinates at the given per-axis
// resolution (with deterministic local grid refinement), independent
// scan-based fiber projection per direction, global minimum per branch.
OracleResult brute_force_oracle(const Problem& problem, int resolution, int zoom_levels = 8);

// The oracle's reduction over an explicit direction list; exposed so tests
// can check invariance under reordering of the samples.
OracleResult oracle_scan_directions(const Problem& problem,
                                    const std::vector<std::vector<double>>& directions);

}  // namespace fpk
