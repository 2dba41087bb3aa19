#pragma once

#include <cmath>
#include <vector>

#include "fpk/grid.hpp"
#include "fpk/weight.hpp"

namespace fpk {

// Signed power |t|^{e-1} t, continuously extended by 0 at t = 0 (valid for e > 0).
inline double signed_pow(double t, double e) {
  if (t == 0.0) return 0.0;
  return t > 0.0 ? std::pow(t, e) : -std::pow(-t, e);
}

// p-th power of the Gagliardo seminorm of u extended by zero outside Omega:
//   ||u||_{X0}^p = int int |u(x)-u(y)|^p |x-y|^{-1-ps} dx dy  over R^2.
// Assembled from exact kernel moments: interior cell pairs plus each cell
// against the zero region (boundary half-cells and the two exterior rays,
// closed form (dist^{-ps})/ps integrated exactly over the cell).
double gagliardo_seminorm_p(const DiscreteFunction& u);

// Nodal gradient of the map u -> gagliardo_seminorm_p(u).
std::vector<double> seminorm_gradient(const DiscreteFunction& u);

// Sum of |term| contributions per gradient entry; sets the floating-point
// noise floor of the assembled gradient.
std::vector<double> seminorm_gradient_abs(const DiscreteFunction& u);

// int_Omega w(x) |u(x)|^exponent dx by the nodal composite rule (end cells
// absorb the boundary half-cells, so weights sum exactly to |Omega|).
double weighted_integral(const DiscreteFunction& u, const BoundWeight& w, double exponent);

// Nodal gradient of u -> weighted_integral(u, w, exponent); requires exponent > 1.
std::vector<double> weighted_integral_gradient(const DiscreteFunction& u, const BoundWeight& w,
                                               double exponent);

// int_Omega |w(x)|^exponent dx (used for Lebesgue norms of weights).
double weight_abs_integral(const GridDomain& grid, const BoundWeight& w, double exponent);

// ||u||_{L^r(Omega)} with the same composite rule.
double lr_norm(const DiscreteFunction& u, double r);

// X0 norm, i.e. gagliardo_seminorm_p(u)^{1/p}.
double x0_norm(const DiscreteFunction& u);

}  // namespace fpk
