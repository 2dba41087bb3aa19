#include "fpk/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "fpk/rng.hpp"

namespace fpk {

namespace {

double scalar_energy(const FiberModel& m, double t) { return m.phi(t); }

const FiberRoot* select_root(const std::vector<FiberRoot>& roots, const FiberModel& m,
                             Branch want) {
  const FiberRoot* best = nullptr;
  double best_energy = std::numeric_limits<double>::infinity();
  for (const FiberRoot& r : roots) {
    if (r.branch != want) continue;
    const double e = scalar_energy(m, r.t);
    if (!best || e < best_energy || (e == best_energy && r.t < best->t)) {
      best = &r;
      best_energy = e;
    }
  }
  return best;
}

bool truncation_active(const Problem& problem) { return problem.truncation().has_value(); }

double active_energy(const Problem& problem, const DiscreteFunction& u) {
  return truncation_active(problem) ? problem.energy_truncated(u) : problem.energy(u);
}

std::vector<double> active_gradient(const Problem& problem, const DiscreteFunction& u) {
  return truncation_active(problem) ? problem.energy_gradient_truncated(u)
                                    : problem.energy_gradient(u);
}

NehariPoint make_point(const DiscreteFunction& dir, double t, Branch branch,
                       const Problem& problem) {
  std::vector<double> vals(dir.values.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = t * dir.values[i];
  DiscreteFunction w(dir.grid, std::move(vals));

  NehariPoint pt;
  pt.scalars = problem.scalars(w);
  const FiberModel m = FiberModel::of(problem, pt.scalars);
  pt.u = std::move(w);
  pt.branch = branch;
  pt.t_scale = t;
  pt.energy = truncation_active(problem) ? problem.energy_truncated_from(pt.scalars)
                                         : problem.energy_from(pt.scalars);
  pt.fiber_residual = std::fabs(m.nehari_at(1.0));
  pt.second_deriv = m.second_deriv_at(1.0);
  pt.weak_residual = truncation_active(problem) ? problem.weak_residual_truncated(pt.u)
                                                : problem.weak_residual(pt.u);

  const double res_scale = m.nehari_scale(1.0);
  if (pt.fiber_residual > 1e-9 * std::max(res_scale, 1e-300)) {
    std::ostringstream os;
    os << "fiber residual " << pt.fiber_residual << " exceeds tolerance at t = " << t;
    fail(Errc::nonconverged, os.str());
  }
  const bool sign_ok = (branch == Branch::plus) ? pt.second_deriv > 0.0 : pt.second_deriv < 0.0;
  if (!sign_ok) fail(Errc::nonconverged, "projected point fails the branch sign convention");
  return pt;
}

}  // namespace

NehariPoint project_to_nehari(const DiscreteFunction& u, ProjectBranch branch,
                              const Problem& problem, std::optional<double> two_root_threshold) {
  const FiberReport classes = classify(u, problem);
  const FiberModel m = FiberModel::of(problem, problem.scalars(u));
  const FiberReport rep =
      find_fiber_roots_scalars(m, classes.h_class, classes.g_class, two_root_threshold);

  if (branch == ProjectBranch::star) {
    if (rep.roots.size() != 1)
      fail(Errc::not_admissible, "STAR projection expects a single-root fiber class");
    const FiberRoot& r = rep.roots.front();
    return make_point(u, r.t, r.branch, problem);
  }

  const Branch want = branch == ProjectBranch::plus ? Branch::plus : Branch::minus;
  const FiberRoot* r = select_root(rep.roots, m, want);
  if (!r) {
    std::ostringstream os;
    os << "no " << branch_name(want) << " fiber root for class " << h_class_name(rep.h_class)
       << " cap " << g_class_name(rep.g_class);
    fail(Errc::not_admissible, os.str());
  }
  return make_point(u, r->t, want, problem);
}

DiscreteFunction nonneg_projectize(const DiscreteFunction& u) {
  const double before = gagliardo_seminorm_p(u);
  DiscreteFunction v = u;
  for (double& x : v.values) x = std::fabs(x);
  const double after = gagliardo_seminorm_p(v);
  if (after > before * (1.0 + 1e-12) + 1e-300) {
    std::ostringstream os;
    os << "seminorm grew under |.| projection: " << before << " -> " << after;
    fail(Errc::energy_increased, os.str());
  }
  return v;
}

namespace {

// Lemma-style coercivity witness along solver trajectories (r > 2p): the
// energy on the Nehari set dominates
//   (1/p - 1/r) a A + (1/2p - 1/r) b A^2 - lambda (1/q - 1/r) l^{(r-q)/r} S_r^{-q} A^{q/p}.
bool coercivity_witness_ok(const Problem& problem, const Constants& c, const NehariPoint& pt) {
  const ProblemParams& pp = problem.params();
  if (truncation_active(problem)) return true;
  if (pp.r <= 2.0 * pp.p * (1.0 + 1e-12)) return true;
  const double A = pt.scalars.A;
  const double bound = (1.0 / pp.p - 1.0 / pp.r) * pp.a * A +
                       (1.0 / (2.0 * pp.p) - 1.0 / pp.r) * pp.b * A * A -
                       pp.lambda * (1.0 / pp.q - 1.0 / pp.r) *
                           std::pow(c.f_holder, (pp.r - pp.q) / pp.r) *
                           std::pow(c.S_r, -pp.q) * std::pow(A, pp.q / pp.p);
  return pt.energy >= bound - 1e-9 * (1.0 + std::fabs(bound));
}

std::optional<double> branch_two_root_threshold(const Problem& problem,
                                                const ThresholdTable& th) {
  switch (problem.regime()) {
    case Regime::subcritical_high:
    case Regime::critical: return th.lambda2;
    case Regime::r_eq_2p: return th.lambda_sup0;
    case Regime::r_lt_2p: return th.lambda_sup1;
  }
  return std::nullopt;
}

struct DescentResult {
  NehariPoint point;
  std::string status;
  int coercivity_violations = 0;
};

// Dense symmetric solve (Gaussian elimination with partial pivoting); the
// direction spaces here have at most a few dozen coordinates.
bool solve_dense(std::vector<double> A, std::vector<double> b, int n, std::vector<double>& x) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int row = col + 1; row < n; ++row)
      if (std::fabs(A[static_cast<std::size_t>(row * n + col)]) >
          std::fabs(A[static_cast<std::size_t>(piv * n + col)]))
        piv = row;
    if (A[static_cast<std::size_t>(piv * n + col)] == 0.0) return false;
    if (piv != col) {
      for (int k = 0; k < n; ++k)
        std::swap(A[static_cast<std::size_t>(piv * n + k)],
                  A[static_cast<std::size_t>(col * n + k)]);
      std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
    }
    const double d = A[static_cast<std::size_t>(col * n + col)];
    for (int row = col + 1; row < n; ++row) {
      const double f = A[static_cast<std::size_t>(row * n + col)] / d;
      if (f == 0.0) continue;
      for (int k = col; k < n; ++k)
        A[static_cast<std::size_t>(row * n + k)] -= f * A[static_cast<std::size_t>(col * n + k)];
      b[static_cast<std::size_t>(row)] -= f * b[static_cast<std::size_t>(col)];
    }
  }
  x.assign(static_cast<std::size_t>(n), 0.0);
  for (int row = n - 1; row >= 0; --row) {
    double acc = b[static_cast<std::size_t>(row)];
    for (int k = row + 1; k < n; ++k)
      acc -= A[static_cast<std::size_t>(row * n + k)] * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(row)] = acc / A[static_cast<std::size_t>(row * n + row)];
  }
  return true;
}

void normalize_sup(DiscreteFunction& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::fabs(v));
  if (m > 0.0)
    for (double& v : u.values) v /= m;
}

DiscreteFunction direction_of(const NehariPoint& pt) {
  DiscreteFunction dir = pt.u;
  normalize_sup(dir);
  return dir;
}

// Direction-space gradient of dir -> J(t(dir) dir): by the envelope theorem
// (the fiber derivative vanishes at the projection) it equals t * grad J at
// the projected point, with t measured against the normalized direction.
std::vector<double> dir_gradient(const Problem& problem, const NehariPoint& pt,
                                 const DiscreteFunction& d) {
  double su = 0.0, sd = 0.0;
  for (double v : pt.u.values) su = std::max(su, std::fabs(v));
  for (double v : d.values) sd = std::max(sd, std::fabs(v));
  const double t = su / sd;
  std::vector<double> g = active_gradient(problem, pt.u);
  for (double& x : g) x *= t;
  return g;
}

// Effective residual target: the requested tolerance, or the roundoff floor
// of the assembled gradient when the energy scale sits above it.
double tol_eff(const Problem& problem, const NehariPoint& pt, double grad_tol) {
  return std::max(grad_tol, 1e-13 * problem.gradient_scale(pt.u));
}

// Barzilai-Borwein secant descent on the direction sphere. The projection is
// scale invariant, so iterates stay sup-normalized and step control lives on
// the sphere; BB steps absorb most of the anisotropy of the projected
// landscape.
DescentResult bb_descend(NehariPoint start, Branch branch, const Problem& problem,
                         const Constants& constants, std::optional<double> two_root_threshold,
                         const SolveOptions& opts, int iter_cap) {
  DescentResult res{std::move(start), "max_iter", 0};
  NehariPoint& cur = res.point;
  if (!coercivity_witness_ok(problem, constants, cur)) ++res.coercivity_violations;

  const ProjectBranch want = branch == Branch::plus ? ProjectBranch::plus : ProjectBranch::minus;
  DiscreteFunction dir = direction_of(cur);

  std::vector<double> g = dir_gradient(problem, cur, dir);
  std::vector<double> dir_prev, g_prev;
  double beta = 0.0;

  for (int it = 0; it < iter_cap; ++it) {
    double gmax = 0.0, gn2 = 0.0;
    for (double x : g) {
      gmax = std::max(gmax, std::fabs(x));
      gn2 += x * x;
    }
    if (cur.weak_residual < tol_eff(problem, cur, opts.grad_tol)) {
      res.status = "converged";
      break;
    }

    if (!dir_prev.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double du = dir.values[i] - dir_prev[i];
        const double dg = g[i] - g_prev[i];
        ss += du * du;
        sy += du * dg;
      }
      if (sy > 0.0) beta = std::min(std::max(ss / sy, 1e-14), 1e10);
    }
    if (beta <= 0.0) beta = 0.1 / (gmax + 1e-30);

    bool accepted = false;
    double step = beta;
    for (int bt = 0; bt < 70; ++bt) {
      DiscreteFunction cand = dir;
      for (int i = 0; i < cand.size(); ++i) cand[i] -= step * g[static_cast<std::size_t>(i)];
      if (cand.is_zero()) {
        step *= 0.25;
        continue;
      }
      normalize_sup(cand);
      try {
        NehariPoint next = project_to_nehari(cand, want, problem, two_root_threshold);
        if (next.energy <= cur.energy - 1e-4 * step * gn2) {
          if (!coercivity_witness_ok(problem, constants, next)) ++res.coercivity_violations;
          dir_prev = dir.values;
          g_prev = g;
          dir = std::move(cand);
          cur = std::move(next);
          g = dir_gradient(problem, cur, dir);
          accepted = true;
          break;
        }
      } catch (const Error&) {
        // candidate direction left the admissible class; shrink the step
      }
      step *= 0.25;
    }
    if (!accepted) {
      res.status = cur.weak_residual < tol_eff(problem, cur, opts.grad_tol) ? "converged"
                                                                            : "stagnated";
      break;
    }
  }
  return res;
}

// Damped-Newton polish on the direction coordinates: finite-difference
// Hessian of the projected objective, Levenberg-Marquardt damping, steps
// accepted on weak-residual decrease. This pushes the critical point to the
// gradient's floating-point floor, which descent alone cannot reach on the
// badly scaled MINUS landscape.
void newton_polish(DescentResult& res, Branch branch, const Problem& problem,
                   std::optional<double> two_root_threshold, const SolveOptions& opts) {
  NehariPoint& cur = res.point;
  const ProjectBranch want = branch == Branch::plus ? ProjectBranch::plus : ProjectBranch::minus;
  DiscreteFunction dir = direction_of(cur);
  const int n = dir.size();
  double mu = 1e-4;

  for (int it = 0; it < 60; ++it) {
    if (cur.weak_residual < opts.grad_tol) break;
    const std::vector<double> g = dir_gradient(problem, cur, dir);

    std::vector<double> H(static_cast<std::size_t>(n * n), 0.0);
    const double eps_fd = 1e-6;
    bool fd_ok = true;
    for (int j = 0; j < n && fd_ok; ++j) {
      DiscreteFunction dp = dir, dm = dir;
      dp[j] += eps_fd;
      dm[j] -= eps_fd;
      try {
        NehariPoint pp = project_to_nehari(dp, want, problem, two_root_threshold);
        NehariPoint pm = project_to_nehari(dm, want, problem, two_root_threshold);
        const std::vector<double> gp = dir_gradient(problem, pp, dp);
        const std::vector<double> gm = dir_gradient(problem, pm, dm);
        for (int i = 0; i < n; ++i)
          H[static_cast<std::size_t>(i * n + j)] =
              (gp[static_cast<std::size_t>(i)] - gm[static_cast<std::size_t>(i)]) /
              (2.0 * eps_fd);
      } catch (const Error&) {
        fd_ok = false;
      }
    }
    if (!fd_ok) break;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double v = 0.5 * (H[static_cast<std::size_t>(i * n + j)] +
                                H[static_cast<std::size_t>(j * n + i)]);
        H[static_cast<std::size_t>(i * n + j)] = v;
        H[static_cast<std::size_t>(j * n + i)] = v;
      }
    double hscale = 0.0;
    for (int i = 0; i < n; ++i)
      hscale = std::max(hscale, std::fabs(H[static_cast<std::size_t>(i * n + i)]));
    if (hscale <= 0.0) break;

    bool accepted = false;
    for (int attempt = 0; attempt < 10; ++attempt) {
      std::vector<double> damped = H;
      for (int i = 0; i < n; ++i) damped[static_cast<std::size_t>(i * n + i)] += mu * hscale;
      std::vector<double> delta;
      if (solve_dense(damped, g, n, delta)) {
        DiscreteFunction cand = dir;
        for (int i = 0; i < n; ++i) cand[i] -= delta[static_cast<std::size_t>(i)];
        if (!cand.is_zero()) {
          normalize_sup(cand);
          try {
            NehariPoint next = project_to_nehari(cand, want, problem, two_root_threshold);
            if (next.weak_residual < cur.weak_residual &&
                next.energy <= cur.energy + 1e-10 * (1.0 + std::fabs(cur.energy))) {
              dir = std::move(cand);
              cur = std::move(next);
              mu = std::max(mu * 0.3, 1e-12);
              accepted = true;
              break;
            }
          } catch (const Error&) {
            // inadmissible Newton step; raise the damping
          }
        }
      }
      mu *= 8.0;
    }
    if (!accepted) break;
  }

  if (cur.weak_residual < tol_eff(problem, cur, opts.grad_tol)) res.status = "converged";
}

bool point_beats(const NehariPoint& a, const NehariPoint& b) {
  // Lowest energy wins; ties broken by weak residual, then by seed order
  // (the caller keeps the earlier point on a full tie).
  if (a.energy != b.energy) return a.energy < b.energy;
  return a.weak_residual < b.weak_residual;
}

}  // namespace

BranchOutcome minimize_branch(Branch branch, const Problem& problem, const Constants& constants,
                              const ThresholdTable& thresholds, const SolveOptions& opts,
                              std::optional<DiscreteFunction> user_start) {
  BranchOutcome outcome;
  const std::optional<double> threshold = branch_two_root_threshold(problem, thresholds);
  const ProjectBranch want = branch == Branch::plus ? ProjectBranch::plus : ProjectBranch::minus;

  if (user_start) {
    FiberReport cls = classify(*user_start, problem);
    if (cls.h_class == HClass::zero || cls.g_class == GClass::zero) {
      Rng rng(opts.seed);
      for (double& v : user_start->values) v += 1e-8 * (1.0 + std::fabs(v)) * rng.normal();
      outcome.start_perturbed = true;
    }
  }

  int successes = 0;
  std::optional<DescentResult> best;
  for (int k = 0; k < opts.restarts; ++k) {
    Rng rng(opts.seed + static_cast<std::uint64_t>(k));
    std::optional<NehariPoint> start;
    if (k == 0 && user_start) {
      try {
        start = project_to_nehari(*user_start, want, problem, threshold);
        ++outcome.starts_tried;
      } catch (const Error&) {
        // fall through to random sampling
      }
    }
    // Keep the admissible sample with the lowest projected energy; starting
    // inside a good basin matters more than extra descent iterations.
    for (int attempt = 0; attempt < 60; ++attempt) {
      DiscreteFunction dir = random_smooth_direction(problem.grid_ptr(), rng);
      ++outcome.starts_tried;
      try {
        const FiberReport cls = classify(dir, problem);
        if (cls.h_class == HClass::zero || cls.g_class == GClass::zero) continue;
        NehariPoint cand = project_to_nehari(dir, want, problem, threshold);
        if (!start || cand.energy < start->energy) start = std::move(cand);
      } catch (const Error&) {
        // direction inadmissible for this branch; draw another one
      }
    }
    if (!start) continue;

    DescentResult run = bb_descend(std::move(*start), branch, problem, constants, threshold,
                                   opts, std::min(opts.max_iter, 600));
    outcome.coercivity_violations += run.coercivity_violations;
    ++successes;
    if (!best || point_beats(run.point, best->point)) best = std::move(run);
  }

  if (successes == 0)
    fail(Errc::no_admissible_start, "no sampled direction admits the requested branch");

  // Finish only the winning basin: a longer BB run plus the Newton polish.
  if (best) {
    if (best->status != "converged") {
      DescentResult more = bb_descend(best->point, branch, problem, constants, threshold, opts,
                                      opts.max_iter);
      outcome.coercivity_violations += more.coercivity_violations;
      *best = std::move(more);
    }
    if (best->status != "converged")
      newton_polish(*best, branch, problem, threshold, opts);
    outcome.point = std::move(best->point);
    outcome.status = best->status;
  }

  if (truncation_active(problem) && outcome.point)
    outcome.energy_untruncated = problem.energy(outcome.point->u);
  return outcome;
}

namespace {

void postprocess_solution(BranchOutcome& out, Branch branch, const Problem& problem,
                          const ThresholdTable& thresholds, std::vector<std::string>& flags) {
  if (!out.point) return;
  try {
    DiscreteFunction abs_u = nonneg_projectize(out.point->u);
    const ProjectBranch want =
        branch == Branch::plus ? ProjectBranch::plus : ProjectBranch::minus;
    NehariPoint re =
        project_to_nehari(abs_u, want, problem, branch_two_root_threshold(problem, thresholds));
    out.point = std::move(re);
    if (truncation_active(problem)) out.energy_untruncated = problem.energy(out.point->u);
  } catch (const Error& e) {
    flags.push_back(std::string("nonneg reprojection failed (") + e.what() + ")");
  }
}

}  // namespace

SolveReport solve(const GridPtr& grid, const ProblemParams& params, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();

  Problem problem(grid, params);
  SolveReport report;
  report.regime = problem.regime();
  report.seed = opts.seed;
  report.restarts = opts.restarts;
  report.m0_defaulted = params.m0_defaulted();
  if (report.m0_defaulted && report.regime == Regime::critical)
    report.flags.push_back("m0 defaulted to a (the paper leaves m0 unspecified)");

  if (report.regime == Regime::r_lt_2p) {
    const TruncationParams tr = make_truncation(params, opts.trunc_k);
    problem.set_truncation(tr);
    report.truncation = tr;
  }

  RayleighOptions ropts;
  ropts.seed = opts.seed;
  ropts.restarts = opts.rayleigh_restarts;
  const Constants constants = compute_constants(problem, ropts);
  report.thresholds = compute_thresholds(problem, constants, opts.trunc_k);

  bool run_plus = true, run_minus = true;
  switch (report.regime) {
    case Regime::subcritical_high: {
      if (report.thresholds.lambda0 && params.lambda >= *report.thresholds.lambda0) {
        std::ostringstream os;
        os << "THRESHOLD_EXCEEDED: lambda = " << params.lambda << " >= lambda0 = "
           << *report.thresholds.lambda0 << " (manifold property not guaranteed)";
        report.flags.push_back(os.str());
      }
      break;
    }
    case Regime::r_eq_2p: {
      const double cl = *report.thresholds.capital_lambda;
      if (params.b >= 1.0 / cl) {
        run_minus = false;
        report.flags.push_back("b >= 1/Lambda: N+ = N, only the PLUS branch exists");
      } else if (!report.thresholds.lambda_sup0 ||
                 params.lambda >= *report.thresholds.lambda_sup0) {
        run_minus = false;
        report.flags.push_back("THRESHOLD_EXCEEDED: lambda >= lambda^0, MINUS branch skipped");
      }
      break;
    }
    case Regime::r_lt_2p: {
      if (report.thresholds.lambda_hat0 && params.lambda >= *report.thresholds.lambda_hat0)
        report.flags.push_back("THRESHOLD_EXCEEDED: lambda >= lambda_hat0");
      if (!report.thresholds.lambda_hat0)
        report.flags.push_back("no lambda_hat0: the b-condition of the truncated theorem fails");
      if (report.thresholds.lambda_sup1 && params.lambda >= *report.thresholds.lambda_sup1) {
        run_minus = false;
        report.flags.push_back(
            "THRESHOLD_EXCEEDED: lambda >= lambda^1 (N0 may be nonempty), MINUS branch skipped");
      }
      break;
    }
    case Regime::critical: {
      run_minus = false;
      if (report.thresholds.lambda0 && params.lambda >= *report.thresholds.lambda0)
        report.flags.push_back("THRESHOLD_EXCEEDED: lambda >= lambda0");
      break;
    }
  }

  auto run_branch = [&](Branch b, std::string& status) -> std::optional<BranchOutcome> {
    try {
      BranchOutcome out = minimize_branch(b, problem, constants, report.thresholds, opts);
      status = out.status;
      postprocess_solution(out, b, problem, report.thresholds, report.flags);
      report.coercivity_violations += out.coercivity_violations;
      return out;
    } catch (const Error& e) {
      status = errc_name(e.code());
      report.flags.push_back(std::string(branch_name(b)) + " branch failed: " + e.what());
      return std::nullopt;
    }
  };

  std::optional<BranchOutcome> plus, minus;
  if (run_plus) plus = run_branch(Branch::plus, report.status_plus);
  if (run_minus) minus = run_branch(Branch::minus, report.status_minus);

  if (plus && plus->point) {
    report.plus_solution = plus->point;
    report.theta_plus = plus->point->energy;
    report.e_lambda_plus = E_lambda(FiberModel::of(problem, plus->point->scalars));
  }
  if (minus && minus->point) {
    report.minus_solution = minus->point;
    report.theta_minus = minus->point->energy;
    report.e_lambda_minus = E_lambda(FiberModel::of(problem, minus->point->scalars));
  }

  if (report.plus_solution && report.minus_solution) {
    DiscreteFunction diff = report.plus_solution->u;
    for (int i = 0; i < diff.size(); ++i) diff[i] -= report.minus_solution->u[i];
    report.distinctness = x0_norm(diff);
  }

  if (report.regime == Regime::r_lt_2p) {
    if (report.plus_solution) {
      report.apriori_plus = apriori_bound_check(report.plus_solution->u, problem,
                                                report.thresholds);
      report.energy_match_plus =
          std::fabs(problem.energy_truncated(report.plus_solution->u) -
                    problem.energy(report.plus_solution->u));
    }
    if (report.minus_solution) {
      report.apriori_minus = apriori_bound_check(report.minus_solution->u, problem,
                                                 report.thresholds);
      report.energy_match_minus =
          std::fabs(problem.energy_truncated(report.minus_solution->u) -
                    problem.energy(report.minus_solution->u));
    }
  }

  if (report.regime == Regime::critical) {
    report.critical_level = critical_threshold(params, constants.S_r, constants.f_holder);
    if (report.theta_plus) {
      report.compactness_certified = *report.theta_plus < *report.critical_level;
      if (!*report.compactness_certified)
        report.flags.push_back(
            "achieved energy is not below the compactness level: convergence NOT certified");
    }
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

// ---------------------------------------------------------------------------
// Brute-force direction-scan oracle
// ---------------------------------------------------------------------------

namespace {

// Independent fiber root enumeration: dense log scan plus plain bisection
// (no Newton polish, no unimodality assumptions).
std::vector<FiberRoot> scan_fiber_roots(const FiberModel& m, double line) {
  std::vector<FiberRoot> roots;
  const int n_scan = 700;
  const double lo = 1e-8, hi = 1e8;
  const double step = std::log(hi / lo) / n_scan;
  double prev_t = lo;
  double prev = m.psi(prev_t) - line;
  for (int i = 1; i <= n_scan; ++i) {
    const double t = lo * std::exp(i * step);
    const double cur = m.psi(t) - line;
    if ((cur > 0.0) != (prev > 0.0)) {
      double a = prev_t, b = t, fa = prev;
      for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = m.psi(mid) - line;
        if ((fm > 0.0) == (fa > 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      const double root = 0.5 * (a + b);
      roots.push_back(FiberRoot{root, m.psi_prime(root) > 0.0 ? Branch::plus : Branch::minus,
                                std::fabs(m.psi(root) - line)});
    }
    prev_t = t;
    prev = cur;
  }
  return roots;
}

struct BranchScan {
  double best = std::numeric_limits<double>::infinity();
  bool found = false;

  void consider(double e) {
    if (e < best) best = e;
    found = true;
  }
};

void scan_direction(const Problem& problem, const std::vector<double>& dir, BranchScan& plus,
                    BranchScan& minus) {
  DiscreteFunction u(problem.grid_ptr(), dir);
  if (u.is_zero()) return;
  const FiberScalars s = problem.scalars(u);
  const FiberModel m = FiberModel::of(problem, s);
  const double line = m.lambda * s.F;
  for (const FiberRoot& r : scan_fiber_roots(m, line)) {
    const double e = m.phi(r.t);
    if (r.branch == Branch::plus) {
      plus.consider(e);
    } else {
      minus.consider(e);
    }
  }
}

std::vector<double> sphere_point(const std::vector<double>& angles, int n) {
  std::vector<double> u(static_cast<std::size_t>(n));
  double sinprod = 1.0;
  for (int i = 0; i < n - 1; ++i) {
    u[static_cast<std::size_t>(i)] = sinprod * std::cos(angles[static_cast<std::size_t>(i)]);
    sinprod *= std::sin(angles[static_cast<std::size_t>(i)]);
  }
  u[static_cast<std::size_t>(n - 1)] = sinprod;
  return u;
}

void for_each_angle_box(const std::vector<double>& center, const std::vector<double>& width,
                        int per_axis, const std::function<void(const std::vector<double>&)>& fn) {
  const int dims = static_cast<int>(center.size());
  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  std::vector<double> ang(static_cast<std::size_t>(dims));
  while (true) {
    for (int d = 0; d < dims; ++d) {
      const double frac = per_axis == 1 ? 0.5 : static_cast<double>(idx[d]) / (per_axis - 1);
      ang[static_cast<std::size_t>(d)] =
          center[static_cast<std::size_t>(d)] + (frac - 0.5) * width[static_cast<std::size_t>(d)];
    }
    fn(ang);
    int d = 0;
    while (d < dims && ++idx[static_cast<std::size_t>(d)] >= per_axis) {
      idx[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d >= dims) break;
  }
}

}  // namespace

OracleResult oracle_scan_directions(const Problem& problem,
                                    const std::vector<std::vector<double>>& directions) {
  BranchScan plus, minus;
  OracleResult res;
  for (const std::vector<double>& d : directions) {
    scan_direction(problem, d, plus, minus);
    ++res.directions_scanned;
  }
  if (plus.found) res.theta_plus = plus.best;
  if (minus.found) res.theta_minus = minus.best;
  return res;
}

OracleResult brute_force_oracle(const Problem& problem, int resolution, int zoom_levels) {
  const int n = problem.grid().n_nodes();
  OracleResult res;

  if (n == 1) {
    BranchScan plus, minus;
    scan_direction(problem, {1.0}, plus, minus);
    scan_direction(problem, {-1.0}, plus, minus);
    res.directions_scanned = 2;
    if (plus.found) res.theta_plus = plus.best;
    if (minus.found) res.theta_minus = minus.best;
    return res;
  }

  const int dims = n - 1;
  constexpr double pi = 3.14159265358979323846;

  struct Tracked {
    BranchScan scan;
    std::vector<double> best_angles;
  };
  Tracked plus, minus;

  auto visit = [&](const std::vector<double>& ang) {
    const std::vector<double> dir = sphere_point(ang, n);
    DiscreteFunction u(problem.grid_ptr(), dir);
    if (u.is_zero()) return;
    const FiberScalars s = problem.scalars(u);
    const FiberModel m = FiberModel::of(problem, s);
    const double line = m.lambda * s.F;
    for (const FiberRoot& r : scan_fiber_roots(m, line)) {
      const double e = m.phi(r.t);
      Tracked& tr = r.branch == Branch::plus ? plus : minus;
      if (!tr.scan.found || e < tr.scan.best) tr.best_angles = ang;
      tr.scan.consider(e);
    }
    ++res.directions_scanned;
  };

  // Base grid: midpoints of a uniform angle lattice, polar angles over
  // [0, pi], the last azimuthal angle over [0, 2 pi).
  {
    std::vector<double> center(static_cast<std::size_t>(dims));
    std::vector<double> width(static_cast<std::size_t>(dims));
    for (int d = 0; d < dims; ++d) {
      width[static_cast<std::size_t>(d)] = (d == dims - 1 ? 2.0 * pi : pi);
      center[static_cast<std::size_t>(d)] = 0.5 * width[static_cast<std::size_t>(d)];
    }
    // Offset the lattice so no angle sits exactly on a coordinate plane.
    const int per_axis = resolution;
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    std::vector<double> ang(static_cast<std::size_t>(dims));
    while (true) {
      for (int d = 0; d < dims; ++d)
        ang[static_cast<std::size_t>(d)] = (idx[static_cast<std::size_t>(d)] + 0.5) *
                                           width[static_cast<std::size_t>(d)] / per_axis;
      visit(ang);
      int d = 0;
      while (d < dims && ++idx[static_cast<std::size_t>(d)] >= per_axis) {
        idx[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d >= dims) break;
    }
  }

  // Deterministic local refinement around the running best of each branch.
  auto refine = [&](Tracked& tr) {
    if (!tr.scan.found) return;
    std::vector<double> width(static_cast<std::size_t>(dims));
    for (int d = 0; d < dims; ++d)
      width[static_cast<std::size_t>(d)] = (d == dims - 1 ? 2.0 * pi : pi) / resolution;
    for (int level = 0; level < zoom_levels; ++level) {
      const std::vector<double> center = tr.best_angles;
      for_each_angle_box(center, width, 5, visit);
      for (double& w : width) w *= 0.35;
    }
  };
  refine(plus);
  refine(minus);

  if (plus.scan.found) res.theta_plus = plus.scan.best;
  if (minus.scan.found) res.theta_minus = minus.scan.best;
  return res;
}

}  // namespace fpk
