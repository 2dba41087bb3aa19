#include "fpk/params.hpp"

#include <cmath>
#include <sstream>

namespace fpk {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::subcritical_high: return "SUBCRITICAL_HIGH";
    case Regime::r_eq_2p: return "R_EQ_2P";
    case Regime::r_lt_2p: return "R_LT_2P";
    case Regime::critical: return "CRITICAL";
  }
  return "?";
}

Regime classify_regime(double p, double r, double p_star) {
  const double tol = 1e-12 * r;
  if (std::fabs(r - p_star) <= tol) return Regime::critical;
  if (std::fabs(r - 2.0 * p) <= tol) return Regime::r_eq_2p;
  if (r < 2.0 * p) return Regime::r_lt_2p;
  return Regime::subcritical_high;
}

Regime ProblemParams::regime() const { return classify_regime(p, r, p_star()); }

void ProblemParams::validate() const {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(Errc::invalid_argument, msg);
  };
  check(a > 0.0, "requires a > 0");
  check(b > 0.0, "requires b > 0");
  check(p >= 2.0, "requires p >= 2");
  check(s > 0.0 && s < 1.0, "requires s in (0,1)");
  if (!(p * s < 1.0 && 2.0 * p * s > 1.0)) {
    std::ostringstream os;
    os << "p*s = " << p * s << " violates the order window p*s < 1 < 2*p*s";
    fail(Errc::order_window, os.str());
  }
  check(q > 1.0, "requires q > 1");
  check(q < p, "requires q < p");
  check(r > p, "requires r > p");
  check(r <= p_star() * (1.0 + 1e-12), "requires r <= p* = p/(1-ps)");
  check(lambda > 0.0, "requires lambda > 0");
  check(c_star > 0.0, "requires c_star > 0");
  if (m0) check(*m0 > 0.0, "requires m0 > 0");
}

double kirchhoff_M(double t, const ProblemParams& params) { return params.a + params.b * t; }

double kirchhoff_M_hat(double t, const ProblemParams& params) {
  return params.a * t + 0.5 * params.b * t * t;
}

double truncation_interval_lo(const ProblemParams& params) {
  return params.a * (params.r - params.p) / (params.r * params.b);
}

double truncation_interval_hi(const ProblemParams& params) {
  return params.a * (params.r - params.p) / (params.p * params.b);
}

TruncationParams make_truncation(const ProblemParams& params, std::optional<double> k) {
  if (params.regime() != Regime::r_lt_2p)
    fail(Errc::wrong_regime, "truncation applies only in the r < 2p regime");
  const double lo = truncation_interval_lo(params);
  const double hi = truncation_interval_hi(params);
  const double kk = k ? *k : 0.5 * (lo + hi);
  if (!(kk > lo && kk < hi)) {
    std::ostringstream os;
    os << "k = " << kk << " must lie strictly inside I = (" << lo << ", " << hi << ")";
    fail(Errc::invalid_argument, os.str());
  }
  return TruncationParams{kk};
}

double truncated_M(double t, const TruncationParams& trunc, const ProblemParams& params) {
  if (params.regime() != Regime::r_lt_2p)
    fail(Errc::wrong_regime, "truncated_M applies only in the r < 2p regime");
  return t <= trunc.k ? kirchhoff_M(t, params) : kirchhoff_M(trunc.k, params);
}

double truncated_M_hat(double t, const TruncationParams& trunc, const ProblemParams& params) {
  if (params.regime() != Regime::r_lt_2p)
    fail(Errc::wrong_regime, "truncated_M_hat applies only in the r < 2p regime");
  if (t <= trunc.k) return kirchhoff_M_hat(t, params);
  return kirchhoff_M_hat(trunc.k, params) + kirchhoff_M(trunc.k, params) * (t - trunc.k);
}

}  // namespace fpk
