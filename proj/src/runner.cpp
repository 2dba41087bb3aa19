#include "fpk/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>
#include <vector>

#include <json.hpp>

namespace fpk {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : "nan";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out << content;
  if (!out) fail(Errc::io_error, "write failed for " + path.string());
}

std::string sanitize_flag(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

ordered_json config_echo(const ExperimentConfig& cfg) {
  ordered_json j;
  j["a"] = cfg.params.a;
  j["b"] = cfg.params.b;
  j["p"] = cfg.params.p;
  j["q"] = cfg.params.q;
  j["r"] = cfg.params.r;
  j["s"] = cfg.params.s;
  j["lambda"] = cfg.params.lambda;
  j["f"] = cfg.params.f.expression();
  j["g"] = cfg.params.g.expression();
  j["c_star"] = cfg.params.c_star;
  j["m0"] = cfg.params.m0_or_default();
  j["m0_defaulted"] = cfg.params.m0_defaulted();
  j["grid.left"] = cfg.grid_left;
  j["grid.right"] = cfg.grid_right;
  j["grid.n_nodes"] = cfg.grid_n_nodes;
  j["mode"] = run_mode_name(cfg.mode);
  j["output.dir"] = cfg.output_dir;
  j["output.format"] = cfg.output_format == OutputFormat::csv ? "csv" : "json";
  j["seed"] = cfg.seed;
  j["restarts"] = cfg.restarts;
  j["workers"] = cfg.workers;
  if (cfg.trunc_k) j["trunc.k"] = *cfg.trunc_k;
  if (cfg.sweep) {
    j["sweep.lambda_min"] = cfg.sweep->lambda_min;
    j["sweep.lambda_max"] = cfg.sweep->lambda_max;
    j["sweep.count"] = cfg.sweep->count;
    j["sweep.log_spacing"] = cfg.sweep->log_spacing;
  }
  return j;
}

void add_thresholds(ordered_json& j, const ThresholdTable& t) {
  j["regime"] = regime_name(t.regime);
  j["S_r"] = t.S_r;
  j["f_holder_norm"] = t.f_holder;
  j["g_inf"] = t.g_inf;
  j["omega_length"] = t.omega_len;
  auto put = [&j](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("lambda1", t.lambda1);
  put("lambda2", t.lambda2);
  put("lambda0", t.lambda0);
  put("capital_lambda", t.capital_lambda);
  put("lambda_sup0", t.lambda_sup0);
  put("lambda_sup1", t.lambda_sup1);
  put("lambda_hat0", t.lambda_hat0);
  put("theta_cap", t.theta_cap);
  put("a_hat", t.a_hat);
  put("trunc_interval_lo", t.trunc_lo);
  put("trunc_interval_hi", t.trunc_hi);
  put("trunc_k", t.trunc_k);
  put("t0_scale", t.t0_scale);
  j["L_coeff_lambda"] = t.l_q_coeff;
  j["L_coeff_const"] = t.l_r_coeff;
  j["notes"] = t.notes;
}

std::string thresholds_csv(const ThresholdTable& t) {
  std::string s = "key,value\n";
  auto row = [&s](const std::string& k, const std::string& v) { s += k + "," + v + "\n"; };
  row("regime", regime_name(t.regime));
  row("S_r", format_double(t.S_r));
  row("f_holder_norm", format_double(t.f_holder));
  row("g_inf", format_double(t.g_inf));
  row("omega_length", format_double(t.omega_len));
  auto opt_row = [&](const std::string& k, const std::optional<double>& v) {
    if (v) row(k, format_double(*v));
  };
  opt_row("lambda1", t.lambda1);
  opt_row("lambda2", t.lambda2);
  opt_row("lambda0", t.lambda0);
  opt_row("capital_lambda", t.capital_lambda);
  opt_row("lambda_sup0", t.lambda_sup0);
  opt_row("lambda_sup1", t.lambda_sup1);
  opt_row("lambda_hat0", t.lambda_hat0);
  opt_row("theta_cap", t.theta_cap);
  opt_row("a_hat", t.a_hat);
  opt_row("trunc_interval_lo", t.trunc_lo);
  opt_row("trunc_interval_hi", t.trunc_hi);
  opt_row("trunc_k", t.trunc_k);
  opt_row("t0_scale", t.t0_scale);
  row("L_coeff_lambda", format_double(t.l_q_coeff));
  row("L_coeff_const", format_double(t.l_r_coeff));
  row("notes", sanitize_flag(t.notes));
  return s;
}

// Consistency gates applied to every solution row as it is written.
void revalidate_point(const NehariPoint& pt) {
  if (pt.u.is_zero()) fail(Errc::validation_error, "emitted solution is identically zero");
  const bool sign_ok = pt.branch == Branch::plus ? pt.second_deriv > 0.0 : pt.second_deriv < 0.0;
  if (!sign_ok)
    fail(Errc::validation_error, "emitted solution violates the branch sign convention");
  const FiberScalars& s = pt.scalars;
  const double scale = std::fabs(s.A) + std::fabs(s.F) + std::fabs(s.G) + 1e-300;
  if (!(pt.fiber_residual <= 1e-6 * scale))
    fail(Errc::validation_error, "emitted solution violates the Nehari identity");
}

std::string profile_csv(const NehariPoint& pt) {
  const GridDomain& g = *pt.u.grid;
  std::string s = "x,u\n";
  s += format_double(g.left()) + ",0\n";
  for (int i = 0; i < g.n_nodes(); ++i)
    s += format_double(g.node(i)) + "," + format_double(pt.u[i]) + "\n";
  s += format_double(g.right()) + ",0\n";
  return s;
}

void add_solution(ordered_json& j, const std::string& tag, const NehariPoint& pt) {
  j[tag + ".energy"] = format_double(pt.energy);
  j[tag + ".norm_x0"] = format_double(std::pow(pt.scalars.A, 1.0 / pt.u.grid->p()));
  j[tag + ".seminorm_p"] = format_double(pt.scalars.A);
  j[tag + ".fiber_residual"] = format_double(pt.fiber_residual);
  j[tag + ".second_deriv"] = format_double(pt.second_deriv);
  j[tag + ".weak_residual"] = format_double(pt.weak_residual);
  j[tag + ".t_scale"] = format_double(pt.t_scale);
}

ordered_json solve_report_json(const SolveReport& rep) {
  ordered_json j;
  j["regime"] = regime_name(rep.regime);
  if (rep.plus_solution) add_solution(j, "plus", *rep.plus_solution);
  if (rep.minus_solution) add_solution(j, "minus", *rep.minus_solution);
  j["theta_plus"] = opt_str(rep.theta_plus);
  j["theta_minus"] = opt_str(rep.theta_minus);
  j["distinctness"] = opt_str(rep.distinctness);
  j["E_lambda_plus"] = opt_str(rep.e_lambda_plus);
  j["E_lambda_minus"] = opt_str(rep.e_lambda_minus);
  j["status_plus"] = rep.status_plus;
  j["status_minus"] = rep.status_minus;
  if (rep.truncation) {
    j["trunc_k"] = format_double(rep.truncation->k);
    if (rep.apriori_plus) {
      j["apriori_plus.holds"] = rep.apriori_plus->holds;
      j["apriori_plus.within_k"] = rep.apriori_plus->within_k;
      j["apriori_plus.lhs"] = format_double(rep.apriori_plus->lhs);
      j["apriori_plus.rhs"] = format_double(rep.apriori_plus->rhs);
    }
    if (rep.apriori_minus) {
      j["apriori_minus.holds"] = rep.apriori_minus->holds;
      j["apriori_minus.within_k"] = rep.apriori_minus->within_k;
      j["apriori_minus.lhs"] = format_double(rep.apriori_minus->lhs);
      j["apriori_minus.rhs"] = format_double(rep.apriori_minus->rhs);
    }
    j["energy_match_plus"] = opt_str(rep.energy_match_plus);
    j["energy_match_minus"] = opt_str(rep.energy_match_minus);
  }
  if (rep.critical_level) {
    j["critical_level"] = format_double(*rep.critical_level);
    if (rep.compactness_certified) j["compactness_certified"] = *rep.compactness_certified;
  }
  j["coercivity_violations"] = rep.coercivity_violations;
  j["seed"] = rep.seed;
  j["restarts"] = rep.restarts;
  ordered_json flags = ordered_json::array();
  for (const std::string& f : rep.flags) flags.push_back(f);
  j["flags"] = flags;
  return j;
}

std::string solve_report_csv(const SolveReport& rep) {
  const ordered_json j = solve_report_json(rep);
  std::string s = "key,value\n";
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string v;
    if (it.value().is_string()) {
      v = sanitize_flag(it.value().get<std::string>());
    } else if (it.value().is_array()) {
      for (const auto& x : it.value()) {
        if (!v.empty()) v += "; ";
        v += sanitize_flag(x.get<std::string>());
      }
    } else {
      v = it.value().dump();
    }
    s += it.key() + "," + v + "\n";
  }
  return s;
}

void write_manifest(const ExperimentConfig& cfg, const SolveReport* rep,
                    const ThresholdTable* thresholds, double wall_seconds,
                    const std::filesystem::path& dir) {
  ordered_json j = config_echo(cfg);
  if (thresholds) add_thresholds(j, *thresholds);
  if (rep) {
    ordered_json flags = ordered_json::array();
    for (const std::string& f : rep->flags) flags.push_back(f);
    j["flags"] = flags;
    j["status_plus"] = rep->status_plus;
    j["status_minus"] = rep->status_minus;
  }
  j["wall_seconds"] = wall_seconds;
  write_file(dir / "run.json", j.dump(2) + "\n");
}

GridPtr make_grid(const ExperimentConfig& cfg) {
  return build_grid(cfg.grid_left, cfg.grid_right, cfg.grid_n_nodes, cfg.params.s, cfg.params.p);
}

SolveOptions make_options(const ExperimentConfig& cfg) {
  SolveOptions o;
  o.seed = cfg.seed;
  o.restarts = cfg.restarts;
  o.trunc_k = cfg.trunc_k;
  return o;
}

int run_thresholds(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  Problem problem(make_grid(cfg), cfg.params);
  if (problem.regime() == Regime::r_lt_2p)
    problem.set_truncation(make_truncation(cfg.params, cfg.trunc_k));
  RayleighOptions ropts;
  ropts.seed = cfg.seed;
  const Constants constants = compute_constants(problem, ropts);
  const ThresholdTable table = compute_thresholds(problem, constants, cfg.trunc_k);

  // lambda0 = min(lambda1, lambda2) re-checked at write time.
  if (table.lambda0 &&
      *table.lambda0 != lambda0_of(*table.lambda1, *table.lambda2))
    fail(Errc::validation_error, "lambda0 inconsistency detected at write time");

  if (cfg.output_format == OutputFormat::json) {
    ordered_json j;
    add_thresholds(j, table);
    write_file(dir / "thresholds.json", j.dump(2) + "\n");
  } else {
    write_file(dir / "thresholds.csv", thresholds_csv(table));
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, nullptr, &table, wall, dir);
  return 0;
}

int run_solve(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const SolveReport rep = solve(make_grid(cfg), cfg.params, make_options(cfg));
  if (rep.plus_solution) {
    revalidate_point(*rep.plus_solution);
    write_file(dir / "solution_plus.csv", profile_csv(*rep.plus_solution));
  }
  if (rep.minus_solution) {
    revalidate_point(*rep.minus_solution);
    write_file(dir / "solution_minus.csv", profile_csv(*rep.minus_solution));
  }
  if (cfg.output_format == OutputFormat::json) {
    write_file(dir / "solve_report.json", solve_report_json(rep).dump(2) + "\n");
  } else {
    write_file(dir / "solve_report.csv", solve_report_csv(rep));
  }
  write_manifest(cfg, &rep, &rep.thresholds, rep.wall_seconds, dir);
  return 0;
}

int run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const SweepSpec& sw = *cfg.sweep;
  std::vector<double> lambdas(static_cast<std::size_t>(sw.count));
  for (int i = 0; i < sw.count; ++i) {
    if (sw.count == 1) {
      lambdas[static_cast<std::size_t>(i)] = sw.lambda_min;
    } else if (sw.log_spacing) {
      lambdas[static_cast<std::size_t>(i)] =
          sw.lambda_min * std::pow(sw.lambda_max / sw.lambda_min,
                                   static_cast<double>(i) / (sw.count - 1));
    } else {
      lambdas[static_cast<std::size_t>(i)] =
          sw.lambda_min + (sw.lambda_max - sw.lambda_min) * static_cast<double>(i) /
                              (sw.count - 1);
    }
  }

  std::vector<SolveReport> reports(lambdas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= lambdas.size()) break;
      ExperimentConfig point = cfg;
      point.params.lambda = lambdas[i];
      reports[i] = solve(make_grid(point), point.params, make_options(point));
    }
  };
  const int n_workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(lambdas.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Single collector writes rows in lambda order.
  std::string csv = sweep_csv_header() + "\n";
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const SolveReport& rep = reports[i];
    SweepRow row;
    row.lambda = lambdas[i];
    const double p = cfg.params.p;
    if (rep.plus_solution) {
      revalidate_point(*rep.plus_solution);
      row.theta_plus = rep.theta_plus;
      row.norm_plus = std::pow(rep.plus_solution->scalars.A, 1.0 / p);
      row.residual_plus = rep.plus_solution->weak_residual;
    }
    if (rep.minus_solution) {
      revalidate_point(*rep.minus_solution);
      row.theta_minus = rep.theta_minus;
      row.norm_minus = std::pow(rep.minus_solution->scalars.A, 1.0 / p);
      row.residual_minus = rep.minus_solution->weak_residual;
    }
    std::string flags;
    for (const std::string& f : rep.flags) {
      if (!flags.empty()) flags += "; ";
      flags += sanitize_flag(f);
    }
    row.flags = flags.empty() ? "ok" : flags;
    csv += sweep_csv_line(row) + "\n";
  }
  write_file(dir / "sweep.csv", csv);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, nullptr, reports.empty() ? nullptr : &reports.front().thresholds, wall,
                 dir);
  return 0;
}

int run_oracle(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const SolveReport rep = solve(make_grid(cfg), cfg.params, make_options(cfg));

  Problem problem(make_grid(cfg), cfg.params);
  if (problem.regime() == Regime::r_lt_2p)
    problem.set_truncation(make_truncation(cfg.params, cfg.trunc_k));
  const int resolution = cfg.grid_n_nodes <= 4 ? 32 : 14;
  const OracleResult oracle = brute_force_oracle(problem, resolution);

  auto delta = [](const std::optional<double>& a,
                  const std::optional<double>& b) -> std::optional<double> {
    if (a && b) return std::fabs(*a - *b);
    return std::nullopt;
  };

  std::string csv =
      "lambda,theta_plus_solver,theta_plus_oracle,delta_plus,theta_minus_solver,"
      "theta_minus_oracle,delta_minus,directions_scanned\n";
  csv += format_double(cfg.params.lambda) + "," + opt_str(rep.theta_plus) + "," +
         opt_str(oracle.theta_plus) + "," + opt_str(delta(rep.theta_plus, oracle.theta_plus)) +
         "," + opt_str(rep.theta_minus) + "," + opt_str(oracle.theta_minus) + "," +
         opt_str(delta(rep.theta_minus, oracle.theta_minus)) + "," +
         std::to_string(oracle.directions_scanned) + "\n";
  write_file(dir / "oracle.csv", csv);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, &rep, &rep.thresholds, wall, dir);
  return 0;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sweep_csv_header() {
  return "lambda,theta_plus,theta_minus,norm_plus,norm_minus,residual_plus,residual_minus,flags";
}

std::string sweep_csv_line(const SweepRow& row) {
  return format_double(row.lambda) + "," + opt_str(row.theta_plus) + "," +
         opt_str(row.theta_minus) + "," + opt_str(row.norm_plus) + "," +
         opt_str(row.norm_minus) + "," + opt_str(row.residual_plus) + "," +
         opt_str(row.residual_minus) + "," + row.flags;
}

int run(const ExperimentConfig& cfg) {
  try {
    std::filesystem::path dir(cfg.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(Errc::io_error, "cannot create output directory " + dir.string());

    switch (cfg.mode) {
      case RunMode::thresholds: return run_thresholds(cfg, dir);
      case RunMode::solve: return run_solve(cfg, dir);
      case RunMode::sweep: return run_sweep(cfg, dir);
      case RunMode::oracle: return run_oracle(cfg, dir);
    }
    return static_cast<int>(Errc::invalid_argument);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(Errc::invalid_argument);
  }
}

}  // namespace fpk
