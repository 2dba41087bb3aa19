#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpk/functional.hpp"

namespace fpk {

enum class Branch { plus, minus };
enum class HClass { plus, minus, zero };
enum class GClass { plus, minus, zero };

const char* branch_name(Branch b);
const char* h_class_name(HClass c);
const char* g_class_name(GClass c);

// Fiber-map data of one direction u, reduced to the scalars (A, F, G). All
// maps support the truncated Kirchhoff coefficient when a level k is set.
//
//   psi(t)  = M_k(t^p A) t^{p-q} A - t^{r-q} G
//   phi(t)  = (1/p) M_hat_k(t^p A) - (lambda/q) t^q F - (1/r) t^r G
//   nehari_at(t) = phi'_{tu}(1) = M_k(t^p A) t^p A - lambda t^q F - t^r G
//   second_deriv_at(t) = phi''_{tu}(1)
struct FiberModel {
  double a, b, p, q, r, lambda;
  std::optional<double> k;  // truncation level (r < 2p machinery)
  FiberScalars s;

  static FiberModel of(const Problem& problem, const FiberScalars& s);

  double M(double t) const { return (k && t > *k) ? a + b * *k : a + b * t; }
  double M_slope(double t) const { return (k && t > *k) ? 0.0 : b; }
  double M_hat(double t) const {
    if (k && t > *k) return a * *k + 0.5 * b * *k * *k + (a + b * *k) * (t - *k);
    return a * t + 0.5 * b * t * t;
  }

  double psi(double t) const;
  double psi_prime(double t) const;
  double phi(double t) const;
  double nehari_at(double t) const;
  double second_deriv_at(double t) const;

  // |term| sums used to scale residual tolerances.
  double psi_scale(double t) const;
  double nehari_scale(double t) const;
  double second_deriv_scale(double t) const;
};

// The Nehari residual phi'_u(1) of a direction with scalars s.
double fiber_first_derivative(const FiberModel& m);
// phi''_u(1); its sign decides N+/N-/N0 membership for points of N.
double fiber_second_derivative(const FiberModel& m);

// E_lambda(u) = [(r-p) a A + (r-2p) b A^2]/(r-q) - lambda F, the certificate
// that forces N0 empty for small lambda (it vanishes identically on N0).
double E_lambda(const FiberModel& m);

struct TMaxResult {
  double t_max;
  double psi_value;      // psi(t_max)
  double psi_prime_res;  // |psi'(t_max)|
};

// Unique maximizer of psi over (0, inf) for directions that have one
// (G > 0 and r > 2p; G > b A^2 when r = 2p; truncated model for r < 2p).
// Throws Errc::wrong_class when psi is nondecreasing instead.
TMaxResult find_t_max(const FiberModel& m);

struct FiberRoot {
  double t;
  Branch branch;
  double residual;  // |psi(t) - lambda F|
};

struct FiberReport {
  HClass h_class = HClass::zero;
  GClass g_class = GClass::zero;
  std::optional<double> t_max;
  std::optional<double> psi_at_tmax;
  double lambda_line = 0.0;  // lambda * int f |u|^q
  std::vector<FiberRoot> roots;
};

// Sign classes of u under f (exponent q) and g (exponent r). The zero class
// is assigned when |integral| < 1e-12 * (L1 mass of the integrand).
FiberReport classify(const DiscreteFunction& u, const Problem& problem);

// Classes plus the regime-dispatched solve of psi_u(t) = lambda int f|u|^q.
// Throws NO_ROOT / THRESHOLD_EXCEEDED (naming lambda2 when it is supplied)
// when the lambda line misses the admissible range of psi.
FiberReport find_fiber_roots(const DiscreteFunction& u, const Problem& problem,
                             std::optional<double> two_root_threshold = std::nullopt);

// Same, operating on precomputed scalars and classes.
FiberReport find_fiber_roots_scalars(const FiberModel& m, HClass h, GClass g,
                                     std::optional<double> two_root_threshold = std::nullopt);

// T0 = (1/||u||) [a(p-q) S_r^r / ((r-q)||g||_inf)]^{1/(r-p)}, the paper's
// lower bound for t_max (r > 2p).
double t_max_lower_bound(double u_norm, const ProblemParams& params, double S_r, double g_inf);

}  // namespace fpk
