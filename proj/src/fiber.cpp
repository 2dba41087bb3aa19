#include "fpk/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fpk {

const char* branch_name(Branch b) { return b == Branch::plus ? "PLUS" : "MINUS"; }
const char* h_class_name(HClass c) {
  switch (c) {
    case HClass::plus: return "H+";
    case HClass::minus: return "H-";
    case HClass::zero: return "H0";
  }
  return "?";
}
const char* g_class_name(GClass c) {
  switch (c) {
    case GClass::plus: return "G+";
    case GClass::minus: return "G-";
    case GClass::zero: return "G0";
  }
  return "?";
}

FiberModel FiberModel::of(const Problem& problem, const FiberScalars& s) {
  const ProblemParams& pp = problem.params();
  FiberModel m{pp.a, pp.b, pp.p, pp.q, pp.r, pp.lambda, std::nullopt, s};
  if (problem.truncation()) m.k = problem.truncation()->k;
  return m;
}

double FiberModel::psi(double t) const {
  const double At = std::pow(t, p) * s.A;
  return M(At) * std::pow(t, p - q) * s.A - std::pow(t, r - q) * s.G;
}

double FiberModel::psi_prime(double t) const {
  const double At = std::pow(t, p) * s.A;
  if (k && At > *k) {
    return M(At) * (p - q) * std::pow(t, p - q - 1.0) * s.A -
           (r - q) * std::pow(t, r - q - 1.0) * s.G;
  }
  return a * (p - q) * std::pow(t, p - q - 1.0) * s.A +
         b * (2.0 * p - q) * std::pow(t, 2.0 * p - q - 1.0) * s.A * s.A -
         (r - q) * std::pow(t, r - q - 1.0) * s.G;
}

double FiberModel::phi(double t) const {
  return M_hat(std::pow(t, p) * s.A) / p - lambda / q * std::pow(t, q) * s.F -
         std::pow(t, r) * s.G / r;
}

double FiberModel::nehari_at(double t) const {
  const double At = std::pow(t, p) * s.A;
  return M(At) * At - lambda * std::pow(t, q) * s.F - std::pow(t, r) * s.G;
}

double FiberModel::second_deriv_at(double t) const {
  const double At = std::pow(t, p) * s.A;
  return (p - 1.0) * M(At) * At + M_slope(At) * p * At * At -
         lambda * (q - 1.0) * std::pow(t, q) * s.F - (r - 1.0) * std::pow(t, r) * s.G;
}

double FiberModel::psi_scale(double t) const {
  const double At = std::pow(t, p) * s.A;
  return std::fabs(M(At) * std::pow(t, p - q) * s.A) + std::fabs(std::pow(t, r - q) * s.G);
}

double FiberModel::nehari_scale(double t) const {
  const double At = std::pow(t, p) * s.A;
  return std::fabs(M(At) * At) + std::fabs(lambda * std::pow(t, q) * s.F) +
         std::fabs(std::pow(t, r) * s.G);
}

double FiberModel::second_deriv_scale(double t) const {
  const double At = std::pow(t, p) * s.A;
  return std::fabs((p - 1.0) * M(At) * At) + std::fabs(M_slope(At) * p * At * At) +
         std::fabs(lambda * (q - 1.0) * std::pow(t, q) * s.F) +
         std::fabs((r - 1.0) * std::pow(t, r) * s.G);
}

double fiber_first_derivative(const FiberModel& m) { return m.nehari_at(1.0); }

double fiber_second_derivative(const FiberModel& m) { return m.second_deriv_at(1.0); }

double E_lambda(const FiberModel& m) {
  return ((m.r - m.p) * m.a * m.s.A + (m.r - 2.0 * m.p) * m.b * m.s.A * m.s.A) / (m.r - m.q) -
         m.lambda * m.s.F;
}

namespace {

constexpr int kRootIter = 200;

// Bisection for f on a sign-changing bracket [lo, hi], then a safeguarded
// Newton polish with derivative df. Converges to 1e-12 relative width.
template <class F, class DF>
double bisect_newton(F f, DF df, double lo, double hi, double flo) {
  double a = lo, b = hi;
  double fa = flo;
  for (int it = 0; it < kRootIter && (b - a) > 1e-12 * b; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  double t = 0.5 * (a + b);
  for (int it = 0; it < 3; ++it) {
    const double d = df(t);
    if (d == 0.0) break;
    const double step = f(t) / d;
    const double cand = t - step;
    if (cand > a && cand < b) t = cand;
  }
  return t;
}

// Unique root of psi' for the unimodal untruncated case (G > 0, r > 2p),
// via the equivalent chi(t) = a(p-q)A + b(2p-q) t^p A^2 - (r-q) t^{r-p} G,
// which rises from a positive value and eventually falls to -inf.
double t_max_subcritical_high(const FiberModel& m) {
  const double A = m.s.A, G = m.s.G;
  auto chi = [&](double t) {
    return m.a * (m.p - m.q) * A + m.b * (2.0 * m.p - m.q) * std::pow(t, m.p) * A * A -
           (m.r - m.q) * std::pow(t, m.r - m.p) * G;
  };
  auto dchi = [&](double t) {
    return m.p * m.b * (2.0 * m.p - m.q) * std::pow(t, m.p - 1.0) * A * A -
           (m.r - m.p) * (m.r - m.q) * std::pow(t, m.r - m.p - 1.0) * G;
  };
  double hi = 1.0;
  int guard = 0;
  while (chi(hi) > 0.0 && guard++ < 600) hi *= 2.0;
  if (guard >= 600) fail(Errc::nonconverged, "t_max bracketing failed (upper)");
  double lo = hi * 0.5;
  guard = 0;
  while (chi(lo) <= 0.0 && guard++ < 600) lo *= 0.5;
  if (guard >= 600) fail(Errc::nonconverged, "t_max bracketing failed (lower)");
  return bisect_newton(chi, dchi, lo, hi, chi(lo));
}

// Golden-section maximization of psi on [lo, hi].
double golden_max(const FiberModel& m, double lo, double hi) {
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = m.psi(x1), f2 = m.psi(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * b; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = m.psi(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = m.psi(x1);
    }
  }
  return 0.5 * (a + b);
}

// Global maximizer of the (possibly kinked) truncated psi by a dense log
// scan bracketing plus golden-section refinement.
double t_max_truncated(const FiberModel& m) {
  const double A = m.s.A, G = m.s.G;
  const double mk = m.a + m.b * *m.k;
  // Reference scales: the post-truncation stationary point and the kink.
  const double t_post = std::pow(mk * (m.p - m.q) * A / ((m.r - m.q) * G), 1.0 / (m.r - m.p));
  const double t_kink = std::pow(*m.k / A, 1.0 / m.p);
  const double t_ref = std::max(t_post, t_kink);
  const int n_scan = 600;
  const double lo = t_ref * 1e-6, hi = t_ref * 1e6;
  const double step = std::log(hi / lo) / n_scan;
  double best_t = lo, best = m.psi(lo);
  for (int i = 1; i <= n_scan; ++i) {
    const double t = lo * std::exp(i * step);
    const double v = m.psi(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  return golden_max(m, best_t * std::exp(-step), best_t * std::exp(step));
}

}  // namespace

TMaxResult find_t_max(const FiberModel& m) {
  const double A = m.s.A, G = m.s.G;
  if (A <= 0.0) fail(Errc::zero_function, "t_max of the zero function");

  double t = 0.0;
  if (m.k) {
    if (G <= 0.0) fail(Errc::wrong_class, "psi has no interior maximum (G <= 0)");
    t = t_max_truncated(m);
  } else if (std::fabs(m.r - 2.0 * m.p) <= 1e-12 * m.r) {
    const double excess = G - m.b * A * A;
    if (excess <= 0.0)
      fail(Errc::wrong_class, "psi is nondecreasing (b||u||^2p >= int g|u|^2p)");
    t = std::pow(m.a * (m.p - m.q) * A / ((2.0 * m.p - m.q) * excess), 1.0 / m.p);
  } else if (m.r > 2.0 * m.p) {
    if (G <= 0.0) fail(Errc::wrong_class, "requires u in G+ (int g|u|^r > 0)");
    t = t_max_subcritical_high(m);
  } else {
    fail(Errc::wrong_regime, "untruncated psi is unbounded above for r < 2p");
  }

  TMaxResult res{t, m.psi(t), std::fabs(m.psi_prime(t))};
  if (!m.k && res.psi_prime_res > 1e-10 * (m.psi_scale(t) / t)) {
    std::ostringstream os;
    os << "psi'(t_max) residual " << res.psi_prime_res << " too large at t = " << t;
    fail(Errc::nonconverged, os.str());
  }
  return res;
}

double t_max_lower_bound(double u_norm, const ProblemParams& params, double S_r, double g_inf) {
  const double base = params.a * (params.p - params.q) * std::pow(S_r, params.r) /
                      ((params.r - params.q) * g_inf);
  return std::pow(base, 1.0 / (params.r - params.p)) / u_norm;
}

namespace {

// Root of psi(t) = line on a bracket where psi - line changes sign.
FiberRoot solve_root(const FiberModel& m, double line, double lo, double hi) {
  auto f = [&](double t) { return m.psi(t) - line; };
  auto df = [&](double t) { return m.psi_prime(t); };
  const double t = bisect_newton(f, df, lo, hi, f(lo));
  const double sp = m.psi_prime(t);
  return FiberRoot{t, sp > 0.0 ? Branch::plus : Branch::minus, std::fabs(f(t))};
}

// Expand geometrically from `from` towards 0 until pred holds.
template <class P>
double expand_down(P pred, double from) {
  double t = from;
  for (int i = 0; i < 2000; ++i) {
    t *= 0.5;
    if (pred(t)) return t;
  }
  fail(Errc::nonconverged, "downward bracket expansion failed");
}

template <class P>
double expand_up(P pred, double from) {
  double t = from;
  for (int i = 0; i < 2000; ++i) {
    t *= 2.0;
    if (pred(t)) return t;
  }
  fail(Errc::nonconverged, "upward bracket expansion failed");
}

// Monotone-increasing psi (G- / G0 / r=2p with nonnegative excess): a single
// crossing when the line is positive.
void roots_monotone(const FiberModel& m, double line, FiberReport& rep) {
  if (!(line > 0.0)) {
    fail(Errc::no_root,
         "psi is increasing and nonnegative; the lambda line is never crossed");
  }
  const double lo = expand_down([&](double t) { return m.psi(t) < line; }, 1.0);
  const double hi = expand_up([&](double t) { return m.psi(t) > line; }, lo);
  rep.roots.push_back(solve_root(m, line, lo, hi));
}

// Unimodal psi with maximum at t_max: zero, one or two crossings depending
// on the line level.
void roots_unimodal(const FiberModel& m, double line, double t_max, double psi_max,
                    std::optional<double> threshold, FiberReport& rep) {
  if (line >= psi_max) {
    std::ostringstream os;
    if (threshold && m.lambda >= *threshold) {
      os << "lambda = " << m.lambda << " is not below the two-root threshold " << *threshold
         << " and the lambda line clears psi(t_max) = " << psi_max;
      fail(Errc::threshold_exceeded, os.str());
    }
    os << "lambda line " << line << " >= psi(t_max) = " << psi_max << ": no fiber root";
    fail(Errc::no_root, os.str());
  }
  if (line > 0.0) {
    // Ascending branch crossing (N+).
    const double lo = expand_down([&](double t) { return m.psi(t) < line; }, t_max);
    rep.roots.push_back(solve_root(m, line, lo, t_max));
  }
  // Descending branch crossing (N-); exists for any line < psi_max since
  // psi -> -inf past t_max.
  const double hi = expand_up([&](double t) { return m.psi(t) < line; }, t_max);
  rep.roots.push_back(solve_root(m, line, t_max, hi));
}

// Truncated psi may dip between its local maxima; enumerate every crossing
// on a dense log scan around the global maximum.
void roots_scan(const FiberModel& m, double line, double t_max, FiberReport& rep) {
  const int n_scan = 1200;
  double lo = t_max * 1e-7;
  if (line > 0.0) {
    // The ascending crossing sits near (line / aA)^{1/(p-q)}; keep it inside
    // the scanned range even for very small lambda lines.
    const double t_plus_est = std::pow(line / (m.a * m.s.A), 1.0 / (m.p - m.q));
    lo = std::min(lo, 1e-2 * t_plus_est);
  }
  const double hi = t_max * 1e7;
  const double step = std::log(hi / lo) / n_scan;
  double prev_t = lo;
  double prev = m.psi(prev_t) - line;
  for (int i = 1; i <= n_scan; ++i) {
    const double t = lo * std::exp(i * step);
    const double cur = m.psi(t) - line;
    if ((cur > 0.0) != (prev > 0.0)) rep.roots.push_back(solve_root(m, line, prev_t, t));
    prev_t = t;
    prev = cur;
  }
  if (rep.roots.empty()) {
    fail(Errc::no_root, "lambda line misses the truncated fiber map on the scanned range");
  }
}

}  // namespace

FiberReport classify(const DiscreteFunction& u, const Problem& problem) {
  if (u.is_zero()) fail(Errc::zero_function, "sign classes of the zero function");
  const ProblemParams& pp = problem.params();

  FiberReport rep;
  const double F = weighted_integral(u, problem.f(), pp.q);
  const double G = weighted_integral(u, problem.g(), pp.r);

  // L1 masses of the integrands set the scale of the zero class band.
  double mass_f = 0.0, mass_g = 0.0;
  const GridDomain& grid = problem.grid();
  for (int i = 0; i < grid.n_nodes(); ++i) {
    const double au = std::fabs(u[i]);
    if (au == 0.0) continue;
    mass_f += std::fabs(problem.f()[i]) * std::pow(au, pp.q) * grid.node_width(i);
    mass_g += std::fabs(problem.g()[i]) * std::pow(au, pp.r) * grid.node_width(i);
  }
  const double tol_f = 1e-12 * mass_f;
  const double tol_g = 1e-12 * mass_g;

  rep.h_class = std::fabs(F) <= tol_f ? HClass::zero : (F > 0.0 ? HClass::plus : HClass::minus);
  rep.g_class = std::fabs(G) <= tol_g ? GClass::zero : (G > 0.0 ? GClass::plus : GClass::minus);
  rep.lambda_line = pp.lambda * F;
  return rep;
}

FiberReport find_fiber_roots_scalars(const FiberModel& m, HClass h, GClass g,
                                     std::optional<double> two_root_threshold) {
  FiberReport rep;
  rep.h_class = h;
  rep.g_class = g;
  rep.lambda_line = m.lambda * m.s.F;
  const double line = rep.lambda_line;

  const bool truncated = m.k.has_value();
  const bool r_eq_2p = std::fabs(m.r - 2.0 * m.p) <= 1e-12 * m.r;

  if (g == GClass::minus || g == GClass::zero) {
    // psi is strictly increasing: one PLUS root for H+, none otherwise.
    roots_monotone(m, line, rep);
    return rep;
  }

  if (r_eq_2p && !truncated) {
    const double excess = m.s.G - m.b * m.s.A * m.s.A;
    if (excess <= 0.0) {
      // b >= int g|u|^2p / ||u||^2p along this direction: psi increases.
      roots_monotone(m, line, rep);
      return rep;
    }
  }

  if (!truncated && m.r < 2.0 * m.p && !r_eq_2p)
    fail(Errc::wrong_regime, "r < 2p requires the truncated fiber model");

  const TMaxResult tm = find_t_max(m);
  rep.t_max = tm.t_max;
  rep.psi_at_tmax = tm.psi_value;

  if (truncated) {
    roots_scan(m, line, tm.t_max, rep);
  } else {
    roots_unimodal(m, line, tm.t_max, tm.psi_value, two_root_threshold, rep);
  }
  return rep;
}

FiberReport find_fiber_roots(const DiscreteFunction& u, const Problem& problem,
                             std::optional<double> two_root_threshold) {
  FiberReport classes = classify(u, problem);
  const FiberModel m = FiberModel::of(problem, problem.scalars(u));
  return find_fiber_roots_scalars(m, classes.h_class, classes.g_class, two_root_threshold);
}

}  // namespace fpk
