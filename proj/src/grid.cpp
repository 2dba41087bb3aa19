#include "fpk/grid.hpp"

#include <cmath>
#include <sstream>

namespace fpk {

namespace {

// Double primitive of the kernel: d^2/dx dy Phi(x-y) = (x-y)^{-1-sigma} up to
// sign bookkeeping. Cell-cell moments are second differences of Phi.
double kernel_phi(double d, double sigma) {
  return std::pow(d, 1.0 - sigma) / (sigma * (1.0 - sigma));
}

}  // namespace

GridDomain::GridDomain(double left, double right, int n_nodes, double s, double p)
    : left_(left), right_(right), n_(n_nodes), s_(s), p_(p) {
  if (!(left < right)) {
    std::ostringstream os;
    os << "left bound " << left << " must be strictly below right bound " << right;
    fail(Errc::bad_bounds, os.str());
  }
  if (n_nodes < 1) fail(Errc::invalid_argument, "n_nodes must be at least 1");
  if (!(s > 0.0 && s < 1.0)) fail(Errc::invalid_argument, "fractional order s must lie in (0,1)");
  if (!(p >= 2.0)) fail(Errc::invalid_argument, "exponent p must be >= 2");

  const double sigma = p * s;
  if (!(sigma < 1.0 && 2.0 * sigma > 1.0)) {
    std::ostringstream os;
    os << "p*s = " << sigma << " violates the order window p*s < 1 < 2*p*s";
    fail(Errc::order_window, os.str());
  }

  h_ = (right_ - left_) / static_cast<double>(n_ + 1);

  nodes_.resize(static_cast<std::size_t>(n_));
  widths_.resize(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    nodes_[static_cast<std::size_t>(i)] = left_ + static_cast<double>(i + 1) * h_;
    double w = h_;
    if (i == 0) w += 0.5 * h_;
    if (i == n_ - 1) w += 0.5 * h_;
    widths_[static_cast<std::size_t>(i)] = w;
  }

  // K(D) = 2 Phi(Dh) - Phi((D-1)h) - Phi((D+1)h), the exact integral of the
  // kernel over two cells D apart. Finite for adjacent cells (D = 1).
  pair_moments_.assign(static_cast<std::size_t>(n_), 0.0);
  for (int d = 1; d < n_; ++d) {
    const double v = 2.0 * kernel_phi(d * h_, sigma) - kernel_phi((d - 1) * h_, sigma) -
                     kernel_phi((d + 1) * h_, sigma);
    pair_moments_[static_cast<std::size_t>(d)] = v;
  }

  // Moment of cell i against the left zero region (-inf, x_0 - h/2]:
  //   int_{cell_i} int_{-inf}^{c} (x-y)^{-1-sigma} dy dx
  //     = [ ((i+1)h)^{1-sigma} - (ih)^{1-sigma} ] / (sigma (1-sigma)).
  // The right side mirrors with index n-1-i.
  zero_moments_.assign(static_cast<std::size_t>(n_), 0.0);
  auto ray = [&](int i) {
    return (kernel_phi((i + 1) * h_, sigma) - kernel_phi(i * h_, sigma));
  };
  for (int i = 0; i < n_; ++i) {
    zero_moments_[static_cast<std::size_t>(i)] = ray(i) + ray(n_ - 1 - i);
  }
}

GridPtr build_grid(double left, double right, int n_nodes, double s, double p) {
  return std::make_shared<const GridDomain>(left, right, n_nodes, s, p);
}

DiscreteFunction::DiscreteFunction(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (!grid) fail(Errc::invalid_argument, "DiscreteFunction requires a grid");
  if (static_cast<int>(values.size()) != grid->n_nodes())
    fail(Errc::invalid_argument, "nodal vector length does not match grid");
}

bool DiscreteFunction::is_zero() const {
  for (double v : values)
    if (v != 0.0) return false;
  return true;
}

DiscreteFunction zeros_like(const GridPtr& grid) {
  return DiscreteFunction(grid, std::vector<double>(static_cast<std::size_t>(grid->n_nodes()), 0.0));
}

}  // namespace fpk
