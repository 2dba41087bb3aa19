#include "fpk/thresholds.hpp"

#include <algorithm>
#include <cmath>

namespace fpk {

Constants compute_constants(const Problem& problem, const RayleighOptions& opts) {
  const ProblemParams& pp = problem.params();
  Constants c;
  c.S_r = estimate_sobolev_constant(problem.grid_ptr(), pp.r, opts);
  const double holder_exp = pp.r / (pp.r - pp.q);
  c.f_holder =
      std::pow(weight_abs_integral(problem.grid(), problem.f(), holder_exp), 1.0 / holder_exp);
  c.g_inf = problem.g().sup_abs;
  c.omega_len = problem.grid().omega_length();
  c.growth_c0 = problem.f().sup_abs;
  c.growth_c1 = problem.g().sup_abs;
  if (problem.regime() == Regime::r_eq_2p) {
    c.capital_lambda = estimate_capital_lambda(problem.grid_ptr(), problem.g(), pp.p, opts);
  }
  return c;
}

double lambda1_formula(const ProblemParams& pp, const Constants& c) {
  const double a = pp.a, p = pp.p, q = pp.q, r = pp.r;
  return (r - p) * std::pow(a / (r - q), (r - q) / (r - p)) *
         std::pow((p - q) * std::pow(c.S_r, r) / c.g_inf, (p - q) / (r - p)) *
         std::pow(c.S_r, q) / c.f_holder;
}

double lambda2_formula(const ProblemParams& pp, const Constants& c) {
  const double a = pp.a, p = pp.p, q = pp.q, r = pp.r;
  return (r - p) * std::pow(c.S_r, q) / c.f_holder *
         std::pow(a / (r - q), (r - q) / (r - p)) *
         std::pow((p - q) * std::pow(c.S_r, r) / c.g_inf, (p - q) / (r - p));
}

double lambda_sup0_formula(const ProblemParams& pp, const Constants& c, double capital_lambda) {
  const double a = pp.a, b = pp.b, p = pp.p, q = pp.q, r = pp.r;
  const double l_pow = std::pow(c.f_holder, r / (r - q));
  return p * a * std::pow(c.S_r, q) / ((2.0 * p - q) * l_pow) *
         std::pow(a * capital_lambda * (p - q) / ((1.0 - b * capital_lambda) * (2.0 * p - q)),
                  (p - q) / p);
}

double lambda_sup1_formula(const ProblemParams& pp, const Constants& c, double k) {
  const double a = pp.a, b = pp.b, p = pp.p, q = pp.q, r = pp.r;
  const double mk = a + b * k;
  const double c1 = (p - q) * std::min(a, mk);
  const double c2 = std::min((r - p) * a - (2.0 * p - r) * b * k, (r - p) * mk);
  const double l_pow = std::pow(c.f_holder, r / (r - q));
  return std::pow(c1 * std::pow(c.S_r, r) / ((r - q) * c.g_inf), (p - q) / (r - p)) *
         (c2 * std::pow(c.S_r, q) / ((r - q) * l_pow));
}

double a_hat_formula(const ProblemParams& pp, int samples) {
  const double lo = truncation_interval_lo(pp);
  const double hi = truncation_interval_hi(pp);
  const double e1 = (pp.q - pp.r + 2.0) / (pp.r - 1.0);
  const double e2 = 2.0 / (pp.r - 1.0);
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double k = lo + (i + 0.5) * (hi - lo) / samples;
    const double mk = kirchhoff_M(k, pp);
    best = std::max(best, std::max(std::pow(mk, e1), std::pow(mk, e2)));
  }
  return best;
}

double lambda0_of(double lambda1, double lambda2) { return std::min(lambda1, lambda2); }

ThresholdTable compute_thresholds(const Problem& problem, const Constants& c,
                                  std::optional<double> trunc_k) {
  const ProblemParams& pp = problem.params();
  ThresholdTable t;
  t.regime = problem.regime();
  t.S_r = c.S_r;
  t.f_holder = c.f_holder;
  t.g_inf = c.g_inf;
  t.omega_len = c.omega_len;
  t.l_q_coeff = c.growth_c0 * std::pow(pp.c_star, pp.q + 1.0) * c.omega_len;
  t.l_r_coeff = c.growth_c1 * std::pow(pp.c_star, pp.r + 1.0) * c.omega_len;

  switch (t.regime) {
    case Regime::subcritical_high:
    case Regime::critical: {
      t.lambda1 = lambda1_formula(pp, c);
      t.lambda2 = lambda2_formula(pp, c);
      t.lambda0 = lambda0_of(*t.lambda1, *t.lambda2);
      t.t0_scale = std::pow(pp.a * (pp.p - pp.q) * std::pow(c.S_r, pp.r) /
                                ((pp.r - pp.q) * c.g_inf),
                            1.0 / (pp.r - pp.p));
      break;
    }
    case Regime::r_eq_2p: {
      if (!c.capital_lambda)
        fail(Errc::regime_mismatch, "r = 2p thresholds require the Lambda constant");
      t.capital_lambda = c.capital_lambda;
      if (pp.b < 1.0 / *c.capital_lambda) {
        t.lambda_sup0 = lambda_sup0_formula(pp, c, *c.capital_lambda);
      } else {
        t.notes += "b >= 1/Lambda: N+ = N, no lambda^0; ";
      }
      break;
    }
    case Regime::r_lt_2p: {
      const TruncationParams tr = make_truncation(pp, trunc_k);
      t.trunc_lo = truncation_interval_lo(pp);
      t.trunc_hi = truncation_interval_hi(pp);
      t.trunc_k = tr.k;
      t.a_hat = a_hat_formula(pp);
      t.lambda_sup1 = lambda_sup1_formula(pp, c, tr.k);
      // Largest theta keeping b < a(r-p)/(r A_hat L(theta)); theta caps the
      // two-solution threshold lambda_hat0 = min(theta, lambda^1).
      const double budget = pp.a * (pp.r - pp.p) / (pp.r * *t.a_hat * pp.b);
      const double theta_max = (budget - t.l_r_coeff) / t.l_q_coeff;
      if (theta_max > 0.0) {
        t.theta_cap = theta_max;
        t.lambda_hat0 = std::min(theta_max, *t.lambda_sup1);
      } else {
        t.notes += "b too large for the truncated two-solution condition; ";
      }
      break;
    }
  }

  t.notes +=
      "l = ||f||_{L^{r/(r-q)}}; lambda^0 and lambda^1 use l^{r/(r-q)} as displayed, "
      "the coercivity bound uses l^{(r-q)/r} as displayed (exponents differ between "
      "the two displays and are kept as printed)";

  // Every stored threshold must be strictly positive.
  for (const std::optional<double>* v :
       {&t.lambda1, &t.lambda2, &t.lambda0, &t.capital_lambda, &t.lambda_sup0, &t.lambda_sup1,
        &t.lambda_hat0, &t.a_hat}) {
    if (v->has_value() && !(**v > 0.0))
      fail(Errc::invalid_argument, "non-positive threshold computed");
  }
  return t;
}

AprioriReport apriori_bound_check(const DiscreteFunction& u, const Problem& problem,
                                  const ThresholdTable& table) {
  const ProblemParams& pp = problem.params();
  if (problem.regime() != Regime::r_lt_2p)
    fail(Errc::wrong_regime, "the a-priori bound check applies in the r < 2p regime");

  AprioriReport rep;
  rep.lhs = gagliardo_seminorm_p(u);
  const double m = kirchhoff_M(rep.lhs, pp);
  const double e1 = (pp.q - pp.r + 2.0) / (pp.r - 1.0);
  const double e2 = 2.0 / (pp.r - 1.0);
  rep.power_used = std::max(std::pow(m, e1), std::pow(m, e2));
  rep.rhs = rep.power_used * table.L_of(pp.lambda);
  rep.holds = rep.lhs < rep.rhs;
  rep.within_k = table.trunc_k ? rep.lhs <= *table.trunc_k : false;
  return rep;
}

double critical_threshold(const ProblemParams& pp, double S, double f_holder) {
  if (pp.regime() != Regime::critical)
    fail(Errc::wrong_regime, "the compactness diagnostic applies at r = p* only");
  const double p = pp.p, q = pp.q, a = pp.a;
  const double ps = p * pp.s;
  const double pstar = pp.p_star();
  const double m0 = pp.m0_or_default();
  const double rr = p / q;  // the overloaded r of the paper's constant C
  const double C =
      (1.0 / std::pow(rr, 1.0 / (rr - 1.0)) - 1.0 / std::pow(rr, rr / (rr - 1.0))) *
      std::pow((2.0 * p - q) * std::pow(f_holder, (p - q) / p) * std::pow(S, 1.0 / rr),
               rr / (rr - 1.0)) /
      (2.0 * p * q * std::pow(a, 1.0 / (rr - 1.0)));
  const double level = (pstar - 2.0 * p) / (2.0 * p * pstar) * std::pow(m0 * C, 1.0 / ps) /
                       std::pow(S, (1.0 - ps) / ps);
  return level - C * std::pow(pp.lambda, p / (p - q));
}

}  // namespace fpk
