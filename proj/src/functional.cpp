#include "fpk/functional.hpp"

#include <cmath>

namespace fpk {

Problem::Problem(GridPtr grid, ProblemParams params)
    : grid_(std::move(grid)), params_(std::move(params)) {
  params_.validate();
  if (std::fabs(grid_->s() - params_.s) > 1e-14 || std::fabs(grid_->p() - params_.p) > 1e-14)
    fail(Errc::invalid_argument, "grid (s,p) disagrees with problem parameters");
  regime_ = params_.regime();
  f_ = params_.f.on(*grid_);
  g_ = params_.g.on(*grid_);
}

FiberScalars Problem::scalars(const DiscreteFunction& u) const {
  FiberScalars s;
  s.A = gagliardo_seminorm_p(u);
  s.F = weighted_integral(u, f_, params_.q);
  s.G = weighted_integral(u, g_, params_.r);
  return s;
}

double Problem::energy_from(const FiberScalars& s) const {
  return kirchhoff_M_hat(s.A, params_) / params_.p - params_.lambda / params_.q * s.F -
         s.G / params_.r;
}

double Problem::energy(const DiscreteFunction& u) const { return energy_from(scalars(u)); }

double Problem::energy_truncated_from(const FiberScalars& s) const {
  const TruncationParams& t = require_trunc();
  return truncated_M_hat(s.A, t, params_) / params_.p - params_.lambda / params_.q * s.F -
         s.G / params_.r;
}

double Problem::energy_truncated(const DiscreteFunction& u) const {
  return energy_truncated_from(scalars(u));
}

std::vector<double> Problem::gradient_impl(const DiscreteFunction& u, bool truncated) const {
  const double A = gagliardo_seminorm_p(u);
  const double m = truncated ? truncated_M(A, require_trunc(), params_) : kirchhoff_M(A, params_);

  std::vector<double> grad = seminorm_gradient(u);
  const std::vector<double> fq = weighted_integral_gradient(u, f_, params_.q);
  const std::vector<double> gr = weighted_integral_gradient(u, g_, params_.r);
  const double lam_over_q = params_.lambda / params_.q;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    grad[i] = m / params_.p * grad[i] - lam_over_q * fq[i] - gr[i] / params_.r;
  }
  return grad;
}

std::vector<double> Problem::energy_gradient(const DiscreteFunction& u) const {
  return gradient_impl(u, false);
}

std::vector<double> Problem::energy_gradient_truncated(const DiscreteFunction& u) const {
  return gradient_impl(u, true);
}

namespace {
double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}
}  // namespace

double Problem::weak_residual(const DiscreteFunction& u) const {
  return max_abs(energy_gradient(u));
}

double Problem::weak_residual_truncated(const DiscreteFunction& u) const {
  return max_abs(energy_gradient_truncated(u));
}

double Problem::gradient_scale(const DiscreteFunction& u) const {
  const double A = gagliardo_seminorm_p(u);
  const double m = trunc_ ? truncated_M(A, *trunc_, params_) : kirchhoff_M(A, params_);
  std::vector<double> acc = seminorm_gradient_abs(u);
  double best = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const double au = std::fabs(u[i]);
    double t = m / params_.p * acc[static_cast<std::size_t>(i)];
    if (au > 0.0) {
      t += params_.lambda * std::fabs(f_[i]) * std::pow(au, params_.q - 1.0) *
           grid_->node_width(i);
      t += std::fabs(g_[i]) * std::pow(au, params_.r - 1.0) * grid_->node_width(i);
    }
    best = std::max(best, t);
  }
  return best;
}

const TruncationParams& Problem::require_trunc() const {
  if (!trunc_) fail(Errc::wrong_regime, "no truncation configured for this problem");
  return *trunc_;
}

}  // namespace fpk
