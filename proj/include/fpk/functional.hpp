#pragma once

#include <optional>
#include <vector>

#include "fpk/grid.hpp"
#include "fpk/params.hpp"
#include "fpk/quadrature.hpp"
#include "fpk/weight.hpp"

namespace fpk {

// The three scalars through which every fiber quantity depends on u:
//   A = ||u||_{X0}^p,  F = int f |u|^q,  G = int g |u|^r.
struct FiberScalars {
  double A = 0.0;
  double F = 0.0;
  double G = 0.0;
};

// Problem assembled on a concrete grid: parameters, weights evaluated at the
// nodes, and the truncation level when the r < 2p machinery is active.
class Problem {
 public:
  Problem(GridPtr grid, ProblemParams params);

  const GridDomain& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const ProblemParams& params() const { return params_; }
  Regime regime() const { return regime_; }

  const BoundWeight& f() const { return f_; }
  const BoundWeight& g() const { return g_; }

  const std::optional<TruncationParams>& truncation() const { return trunc_; }
  void set_truncation(const TruncationParams& t) { trunc_ = t; }

  FiberScalars scalars(const DiscreteFunction& u) const;

  // J_lambda(u) = (1/p) M_hat(||u||^p) - (lambda/q) int f|u|^q - (1/r) int g|u|^r
  double energy(const DiscreteFunction& u) const;
  double energy_from(const FiberScalars& s) const;

  // J_{lambda,k}: same with the truncated primitive. Requires a truncation.
  double energy_truncated(const DiscreteFunction& u) const;
  double energy_truncated_from(const FiberScalars& s) const;

  // Nodal gradient of J_lambda; entry i is the weak form tested against the
  // i-th nodal basis direction.
  std::vector<double> energy_gradient(const DiscreteFunction& u) const;
  std::vector<double> energy_gradient_truncated(const DiscreteFunction& u) const;

  // Max-norm of the energy gradient; zero characterizes a discrete weak solution.
  double weak_residual(const DiscreteFunction& u) const;
  double weak_residual_truncated(const DiscreteFunction& u) const;

  // Max over entries of the summed |term| magnitudes feeding the gradient;
  // multiplied by the unit roundoff this bounds the achievable residual.
  double gradient_scale(const DiscreteFunction& u) const;

 private:
  std::vector<double> gradient_impl(const DiscreteFunction& u, bool truncated) const;
  const TruncationParams& require_trunc() const;

  GridPtr grid_;
  ProblemParams params_;
  Regime regime_;
  BoundWeight f_, g_;
  std::optional<TruncationParams> trunc_;
};

}  // namespace fpk
