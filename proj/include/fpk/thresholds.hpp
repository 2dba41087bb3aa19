#pragma once

#include <optional>
#include <string>

#include "fpk/embedding.hpp"
#include "fpk/functional.hpp"

namespace fpk {

// Grid-estimated norms and embedding constants shared by the threshold
// formulas. l denotes ||f||_{L^{r/(r-q)}(Omega)}; the displayed formulas are
// evaluated with the exponent each one prints (see ThresholdTable::notes).
struct Constants {
  double S_r = 0.0;       // Rayleigh estimate of the X0 -> L^r embedding constant
  double f_holder = 0.0;  // l = ||f||_{L^{r/(r-q)}}
  double g_inf = 0.0;     // ||g||_inf over the nodes
  double omega_len = 0.0;
  double growth_c0 = 0.0;  // C0 = sup|f| (growth envelope of Lemma-type bounds)
  double growth_c1 = 0.0;  // C1 = sup|g|
  std::optional<double> capital_lambda;  // needed only when r = 2p
};

Constants compute_constants(const Problem& problem, const RayleighOptions& opts = {});

// Every explicit lambda threshold and auxiliary constant, populated per
// regime; entries that do not apply stay empty.
struct ThresholdTable {
  Regime regime = Regime::subcritical_high;
  double S_r = 0.0;
  double f_holder = 0.0;
  double g_inf = 0.0;
  double omega_len = 0.0;

  std::optional<double> lambda1;         // N0-emptiness boundary (r > 2p)
  std::optional<double> lambda2;         // two-root threshold (r > 2p)
  std::optional<double> lambda0;         // min(lambda1, lambda2)
  std::optional<double> capital_lambda;  // r = 2p minimization constant
  std::optional<double> lambda_sup0;     // r = 2p, b < 1/Lambda
  std::optional<double> lambda_sup1;     // r < 2p truncated threshold
  std::optional<double> lambda_hat0;     // min(theta, lambda_sup1)
  std::optional<double> theta_cap;       // largest theta compatible with the b-condition
  std::optional<double> a_hat;           // max over I of the two M(k) powers
  std::optional<double> trunc_lo, trunc_hi, trunc_k;

  // L(lambda) = lambda * l_q_coeff + l_r_coeff with the configured C*, C0, C1.
  double l_q_coeff = 0.0;
  double l_r_coeff = 0.0;
  double L_of(double lambda) const { return lambda * l_q_coeff + l_r_coeff; }

  std::optional<double> t0_scale;  // T0 * ||u||, the direction-free factor

  std::string notes;
};

// Closed-form threshold formulas, transcribed once here and once (by hand,
// independently) in the acceptance suite.
double lambda1_formula(const ProblemParams& pp, const Constants& c);
double lambda2_formula(const ProblemParams& pp, const Constants& c);
double lambda_sup0_formula(const ProblemParams& pp, const Constants& c, double capital_lambda);
double lambda_sup1_formula(const ProblemParams& pp, const Constants& c, double k);
double a_hat_formula(const ProblemParams& pp, int samples = 64);

// min(lambda1, lambda2); separated out so the reduction is testable with
// overridden constants.
double lambda0_of(double lambda1, double lambda2);

ThresholdTable compute_thresholds(const Problem& problem, const Constants& c,
                                  std::optional<double> trunc_k = std::nullopt);

struct AprioriReport {
  bool holds = false;
  double lhs = 0.0;  // ||u||^p
  double rhs = 0.0;  // max{M^{(q-r+2)/(r-1)}, M^{2/(r-1)}} * L(lambda)
  double power_used = 0.0;
  bool within_k = false;  // ||u||^p <= k
};

// Checkable form of the a-priori bound for the r < 2p regime.
AprioriReport apriori_bound_check(const DiscreteFunction& u, const Problem& problem,
                                  const ThresholdTable& table);

// Compactness diagnostic level of the critical regime:
//   ((p*-2p)/(2p p*)) (m0 C)^{1/(ps)} / S^{(1-ps)/(ps)} - C lambda^{p/(p-q)}
// with C the explicit p,q-dependent constant (r = p/q inside C) and S the
// critical embedding constant.
double critical_threshold(const ProblemParams& pp, double S, double f_holder);

}  // namespace fpk
