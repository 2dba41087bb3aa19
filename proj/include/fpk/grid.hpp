#pragma once

#include <memory>
#include <vector>

#include "fpk/error.hpp"

namespace fpk {

// Uniform 1-D grid on Omega = (left, right) with n_nodes interior nodes and
// homogeneous exterior condition u = 0 on R \ Omega. The fractional order s
// and integrability exponent p are part of the grid because the singular
// kernel |x-y|^{-1-ps} and its exact cell moments depend on both.
//
// Node i sits at left + (i+1)h with h = (right-left)/(n_nodes+1); its cell is
// [x_i - h/2, x_i + h/2]. The half-cells adjacent to the boundary and the two
// exterior rays carry the value 0 and are folded into closed-form kernel
// moments, so no quadrature point is ever placed outside the interior cells.
class GridDomain {
 public:
  GridDomain(double left, double right, int n_nodes, double s, double p);

  double left() const { return left_; }
  double right() const { return right_; }
  int n_nodes() const { return n_; }
  double h() const { return h_; }
  double s() const { return s_; }
  double p() const { return p_; }
  double omega_length() const { return right_ - left_; }

  double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& nodes() const { return nodes_; }

  // Quadrature weight of node i for integrals over Omega. End cells absorb
  // the boundary half-cells so the weights sum exactly to |Omega|.
  double node_width(int i) const { return widths_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& node_widths() const { return widths_; }

  // Exact kernel moment between two interior cells D = |i-j| >= 1 apart:
  //   K(D) = int_{cell_i} int_{cell_j} |x-y|^{-1-ps} dx dy.
  double pair_moment(int d) const { return pair_moments_[static_cast<std::size_t>(d)]; }

  // Exact kernel moment between cell i and the zero region
  // (-inf, left + h/2] u [right - h/2, inf), i.e. exterior rays plus the
  // boundary half-cells where u vanishes.
  double zero_moment(int i) const { return zero_moments_[static_cast<std::size_t>(i)]; }

 private:
  double left_, right_;
  int n_;
  double h_, s_, p_;
  std::vector<double> nodes_;
  std::vector<double> widths_;
  std::vector<double> pair_moments_;  // index 0 unused
  std::vector<double> zero_moments_;
};

using GridPtr = std::shared_ptr<const GridDomain>;

GridPtr build_grid(double left, double right, int n_nodes, double s, double p);

// Nodal values at the interior nodes of a grid, extended by zero outside.
struct DiscreteFunction {
  GridPtr grid;
  std::vector<double> values;

  DiscreteFunction() = default;
  DiscreteFunction(GridPtr g, std::vector<double> v);

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }

  bool is_zero() const;
};

DiscreteFunction zeros_like(const GridPtr& grid);

}  // namespace fpk
