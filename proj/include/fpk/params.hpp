#pragma once

#include <optional>
#include <string>

#include "fpk/error.hpp"
#include "fpk/weight.hpp"

namespace fpk {

// Exponent regime of the problem, decided by r against 2p and the critical
// exponent p* = p/(1-ps) (dimension fixed at n = 1).
enum class Regime { subcritical_high, r_eq_2p, r_lt_2p, critical };

const char* regime_name(Regime r);

// All scalars of the problem plus the two weights (unbound; they are
// evaluated on a grid when the problem is assembled).
struct ProblemParams {
  double a = 1.0;
  double b = 1.0;
  double p = 2.0;
  double q = 1.5;
  double r = 5.0;
  double s = 0.4;
  double lambda = 0.1;
  WeightSpec f;
  WeightSpec g;
  double c_star = 1.0;              // regularity constant, configured
  std::optional<double> m0;         // lower bound of M; defaults to a

  double p_star() const { return p / (1.0 - p * s); }
  double m0_or_default() const { return m0 ? *m0 : a; }
  bool m0_defaulted() const { return !m0.has_value(); }

  Regime regime() const;

  // Throws Errc::invalid_argument on the first violated constraint. The CLI
  // config loader reports all violations at once instead.
  void validate() const;
};

Regime classify_regime(double p, double r, double p_star);

// Kirchhoff coefficient M(t) = a + bt and its primitive.
double kirchhoff_M(double t, const ProblemParams& params);
double kirchhoff_M_hat(double t, const ProblemParams& params);

// Truncation level for the r < 2p analysis; k must lie strictly inside
// I = (a(r-p)/(rb), a(r-p)/(pb)).
struct TruncationParams {
  double k;
};

double truncation_interval_lo(const ProblemParams& params);
double truncation_interval_hi(const ProblemParams& params);

// Validates the regime and the interval; k defaults to the midpoint of I.
TruncationParams make_truncation(const ProblemParams& params,
                                 std::optional<double> k = std::nullopt);

// M_k(t): M(t) for t <= k, frozen at M(k) beyond.
double truncated_M(double t, const TruncationParams& trunc, const ProblemParams& params);

// Primitive of M_k: M_hat(t) below k, M_hat(k) + M(k)(t-k) beyond.
double truncated_M_hat(double t, const TruncationParams& trunc, const ProblemParams& params);

}  // namespace fpk
