#include "fpk/quadrature.hpp"

#include <cmath>

namespace fpk {

double gagliardo_seminorm_p(const DiscreteFunction& u) {
  const GridDomain& g = *u.grid;
  const int n = g.n_nodes();
  const double p = g.p();
  double acc = 0.0;
  // Fixed accumulation order (i ascending, j ascending) keeps results
  // bit-reproducible across runs.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = u[i] - u[j];
      if (d != 0.0) acc += g.pair_moment(j - i) * std::pow(std::fabs(d), p);
    }
  }
  for (int i = 0; i < n; ++i) {
    const double v = u[i];
    if (v != 0.0) acc += g.zero_moment(i) * std::pow(std::fabs(v), p);
  }
  return 2.0 * acc;
}

std::vector<double> seminorm_gradient(const DiscreteFunction& u) {
  const GridDomain& g = *u.grid;
  const int n = g.n_nodes();
  const double p = g.p();
  std::vector<double> grad(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double t = 2.0 * p * g.pair_moment(j - i) * signed_pow(u[i] - u[j], p - 1.0);
      grad[static_cast<std::size_t>(i)] += t;
      grad[static_cast<std::size_t>(j)] -= t;
    }
    grad[static_cast<std::size_t>(i)] += 2.0 * p * g.zero_moment(i) * signed_pow(u[i], p - 1.0);
  }
  return grad;
}

std::vector<double> seminorm_gradient_abs(const DiscreteFunction& u) {
  const GridDomain& g = *u.grid;
  const int n = g.n_nodes();
  const double p = g.p();
  std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double t =
          2.0 * p * g.pair_moment(j - i) * std::pow(std::fabs(u[i] - u[j]), p - 1.0);
      acc[static_cast<std::size_t>(i)] += t;
      acc[static_cast<std::size_t>(j)] += t;
    }
    acc[static_cast<std::size_t>(i)] +=
        2.0 * p * g.zero_moment(i) * std::pow(std::fabs(u[i]), p - 1.0);
  }
  return acc;
}

double weighted_integral(const DiscreteFunction& u, const BoundWeight& w, double exponent) {
  const GridDomain& g = *u.grid;
  const int n = g.n_nodes();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = std::fabs(u[i]);
    if (a != 0.0) acc += w[i] * std::pow(a, exponent) * g.node_width(i);
  }
  return acc;
}

std::vector<double> weighted_integral_gradient(const DiscreteFunction& u, const BoundWeight& w,
                                               double exponent) {
  const GridDomain& g = *u.grid;
  const int n = g.n_nodes();
  std::vector<double> grad(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    grad[static_cast<std::size_t>(i)] =
        exponent * w[i] * signed_pow(u[i], exponent - 1.0) * g.node_width(i);
  }
  return grad;
}

double weight_abs_integral(const GridDomain& grid, const BoundWeight& w, double exponent) {
  double acc = 0.0;
  for (int i = 0; i < grid.n_nodes(); ++i) {
    const double a = std::fabs(w[i]);
    if (a != 0.0) acc += std::pow(a, exponent) * grid.node_width(i);
  }
  return acc;
}

double lr_norm(const DiscreteFunction& u, double r) {
  const GridDomain& g = *u.grid;
  double acc = 0.0;
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double a = std::fabs(u[i]);
    if (a != 0.0) acc += std::pow(a, r) * g.node_width(i);
  }
  return std::pow(acc, 1.0 / r);
}

double x0_norm(const DiscreteFunction& u) {
  return std::pow(gagliardo_seminorm_p(u), 1.0 / u.grid->p());
}

}  // namespace fpk
