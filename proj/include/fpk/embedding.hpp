#pragma once

#include <cstdint>
#include <vector>

#include "fpk/grid.hpp"
#include "fpk/quadrature.hpp"
#include "fpk/rng.hpp"
#include "fpk/weight.hpp"

namespace fpk {

struct RayleighOptions {
  int restarts = 16;
  std::uint64_t seed = 42;
  int max_iter = 5000;
  double grad_tol = 1e-9;
};

// Random direction built from the first few sine modes of the interval; the
// low-pass shape keeps Rayleigh starts and solver restarts well inside the
// discretely resolvable part of the space.
DiscreteFunction random_smooth_direction(const GridPtr& grid, Rng& rng, int n_modes = 8);

// Plain i.i.d. normal nodal values (rough directions for property tests).
DiscreteFunction random_rough_direction(const GridPtr& grid, Rng& rng);

// S_r = inf ||u||_{X0} / ||u||_{L^r}: multi-start projected descent on the
// log quotient. Deterministic for a fixed seed. Throws NONCONVERGED when no
// restart reaches stationarity.
double estimate_sobolev_constant(const GridPtr& grid, double r, const RayleighOptions& opts = {});

// Lambda = inf { ||u||^{2p} : int g |u|^{2p} = 1 }, minimized as the scale
// invariant quotient ||u||^{2p} / int g|u|^{2p} over directions with a
// positive constraint integral. Throws INFEASIBLE when no sampled direction
// is admissible.
double estimate_capital_lambda(const GridPtr& grid, const BoundWeight& g, double p,
                               const RayleighOptions& opts = {});

}  // namespace fpk
