#include "fpk/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fpk/error.hpp"

namespace fpk {

const char* run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::thresholds: return "thresholds";
    case RunMode::solve: return "solve";
    case RunMode::sweep: return "sweep";
    case RunMode::oracle: return "oracle";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct KV {
  std::string key, value;
  int line;
};

std::vector<KV> tokenize(const std::string& text, std::vector<std::string>& errors) {
  std::vector<KV> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key=value");
      continue;
    }
    out.push_back(KV{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
  }
  return out;
}

bool parse_double(const std::string& v, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(v, &used);
    return used == v.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_int(const std::string& v, long long& out) {
  try {
    std::size_t used = 0;
    out = std::stoll(v, &used);
    return used == v.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1") {
    out = true;
    return true;
  }
  if (v == "false" || v == "0") {
    out = false;
    return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> errors;
  auto need = [&errors](bool ok, const std::string& field, const std::string& msg) {
    if (!ok) errors.push_back(field + ": " + msg);
  };

  const ProblemParams& pp = cfg.params;
  need(pp.a > 0.0, "a", "requires a > 0");
  need(pp.b > 0.0, "b", "requires b > 0");
  need(pp.p >= 2.0, "p", "requires p >= 2");
  need(pp.s > 0.0 && pp.s < 1.0, "s", "requires s in (0,1)");
  if (pp.s > 0.0 && pp.s < 1.0 && pp.p >= 2.0) {
    need(pp.p * pp.s < 1.0 && 2.0 * pp.p * pp.s > 1.0, "s",
         "requires the order window p*s < 1 < 2*p*s");
  }
  need(pp.q > 1.0, "q", "requires q > 1");
  need(pp.q < pp.p, "q", "requires q < p");
  need(pp.r > pp.p, "r", "requires r > p");
  if (pp.s > 0.0 && pp.s < 1.0 && pp.p * pp.s < 1.0) {
    need(pp.r <= pp.p_star() * (1.0 + 1e-12), "r", "requires r <= p* = p/(1-ps)");
  }
  need(pp.lambda > 0.0, "lambda", "requires lambda > 0");
  need(pp.c_star > 0.0, "c_star", "requires c_star > 0");
  if (pp.m0) need(*pp.m0 > 0.0, "m0", "requires m0 > 0");
  need(pp.f.parsed(), "f", "weight expression must parse");
  need(pp.g.parsed(), "g", "weight expression must parse");

  need(cfg.grid_left < cfg.grid_right, "grid.left", "requires grid.left < grid.right");
  need(cfg.grid_n_nodes >= 1, "grid.n_nodes", "requires n_nodes >= 1");
  need(cfg.restarts >= 1, "restarts", "requires restarts >= 1");
  need(cfg.workers >= 1, "workers", "requires workers >= 1");

  if (cfg.mode == RunMode::sweep) {
    if (!cfg.sweep) {
      errors.push_back("sweep: mode = sweep requires the sweep.* keys");
    } else {
      const SweepSpec& sw = *cfg.sweep;
      need(sw.count >= 1, "sweep.count", "requires count >= 1");
      need(sw.lambda_min > 0.0, "sweep.lambda_min", "requires lambda_min > 0");
      need(sw.lambda_max >= sw.lambda_min, "sweep.lambda_max",
           "requires lambda_max >= lambda_min");
    }
  } else if (cfg.sweep) {
    errors.push_back("sweep: sweep.* keys are only valid with mode = sweep");
  }

  if (cfg.mode == RunMode::oracle) {
    need(cfg.grid_n_nodes <= 5, "grid.n_nodes", "oracle mode requires n_nodes <= 5");
  }

  if (cfg.trunc_k) {
    if (pp.regime() != Regime::r_lt_2p) {
      errors.push_back("trunc.k: only meaningful in the r < 2p regime");
    } else {
      const double lo = truncation_interval_lo(pp);
      const double hi = truncation_interval_hi(pp);
      need(*cfg.trunc_k > lo && *cfg.trunc_k < hi, "trunc.k",
           "must lie strictly inside I = (a(r-p)/(rb), a(r-p)/(pb))");
    }
  }
  return errors;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  cfg.params.f = parse_weight("1");
  cfg.params.g = parse_weight("1");

  std::vector<std::string> errors;
  SweepSpec sweep;
  bool any_sweep_key = false;

  for (const KV& kv : tokenize(text, errors)) {
    auto bad = [&](const std::string& msg) {
      errors.push_back(kv.key + ": " + msg + " (line " + std::to_string(kv.line) + ")");
    };
    auto as_double = [&](double& dst) {
      double v;
      if (parse_double(kv.value, v)) {
        dst = v;
      } else {
        bad("expected a finite number, got \"" + kv.value + "\"");
      }
    };
    auto as_int = [&](int& dst) {
      long long v;
      if (parse_int(kv.value, v)) {
        dst = static_cast<int>(v);
      } else {
        bad("expected an integer, got \"" + kv.value + "\"");
      }
    };
    auto as_weight = [&](WeightSpec& dst) {
      try {
        dst = parse_weight(kv.value);
      } catch (const Error& e) {
        bad(e.what());
      }
    };

    if (kv.key == "a") {
      as_double(cfg.params.a);
    } else if (kv.key == "b") {
      as_double(cfg.params.b);
    } else if (kv.key == "p") {
      as_double(cfg.params.p);
    } else if (kv.key == "q") {
      as_double(cfg.params.q);
    } else if (kv.key == "r") {
      as_double(cfg.params.r);
    } else if (kv.key == "s") {
      as_double(cfg.params.s);
    } else if (kv.key == "lambda") {
      as_double(cfg.params.lambda);
    } else if (kv.key == "f") {
      as_weight(cfg.params.f);
    } else if (kv.key == "g") {
      as_weight(cfg.params.g);
    } else if (kv.key == "c_star") {
      as_double(cfg.params.c_star);
    } else if (kv.key == "m0") {
      double v = 0.0;
      as_double(v);
      cfg.params.m0 = v;
    } else if (kv.key == "grid.left") {
      as_double(cfg.grid_left);
    } else if (kv.key == "grid.right") {
      as_double(cfg.grid_right);
    } else if (kv.key == "grid.n_nodes") {
      as_int(cfg.grid_n_nodes);
    } else if (kv.key == "mode") {
      if (kv.value == "thresholds") {
        cfg.mode = RunMode::thresholds;
      } else if (kv.value == "solve") {
        cfg.mode = RunMode::solve;
      } else if (kv.value == "sweep") {
        cfg.mode = RunMode::sweep;
      } else if (kv.value == "oracle") {
        cfg.mode = RunMode::oracle;
      } else {
        bad("mode must be one of thresholds | solve | sweep | oracle");
      }
    } else if (kv.key == "sweep.lambda_min") {
      as_double(sweep.lambda_min);
      any_sweep_key = true;
    } else if (kv.key == "sweep.lambda_max") {
      as_double(sweep.lambda_max);
      any_sweep_key = true;
    } else if (kv.key == "sweep.count") {
      as_int(sweep.count);
      any_sweep_key = true;
    } else if (kv.key == "sweep.log_spacing") {
      bool v = false;
      if (parse_bool(kv.value, v)) {
        sweep.log_spacing = v;
      } else {
        bad("expected true/false");
      }
      any_sweep_key = true;
    } else if (kv.key == "output.dir") {
      cfg.output_dir = kv.value;
    } else if (kv.key == "output.format") {
      if (kv.value == "csv") {
        cfg.output_format = OutputFormat::csv;
      } else if (kv.value == "json") {
        cfg.output_format = OutputFormat::json;
      } else {
        bad("output.format must be csv or json");
      }
    } else if (kv.key == "seed") {
      long long v = 0;
      if (parse_int(kv.value, v) && v >= 0) {
        cfg.seed = static_cast<std::uint64_t>(v);
      } else {
        bad("expected a nonnegative integer");
      }
    } else if (kv.key == "restarts") {
      as_int(cfg.restarts);
    } else if (kv.key == "trunc.k") {
      double v = 0.0;
      as_double(v);
      cfg.trunc_k = v;
    } else {
      bad("unknown key");
    }
  }

  if (any_sweep_key) cfg.sweep = sweep;

  std::vector<std::string> more = validate_config(cfg);
  errors.insert(errors.end(), more.begin(), more.end());
  if (!errors.empty()) {
    std::ostringstream os;
    for (std::size_t i = 0; i < errors.size(); ++i) {
      if (i) os << "; ";
      os << errors[i];
    }
    fail(Errc::validation_error, os.str());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace fpk
