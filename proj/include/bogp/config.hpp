#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bogp/bo_loop.hpp"
#include "bogp/common.hpp"
#include "bogp/trace_io.hpp"

namespace bogp {

enum class ObjectiveKind { benchmark, rkhs, gp, file };

inline std::string to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::benchmark: return "benchmark";
    case ObjectiveKind::rkhs: return "rkhs";
    case ObjectiveKind::gp: return "gp";
    case ObjectiveKind::file: return "file";
  }
  return "?";
}

inline ObjectiveKind objective_kind_from_string(const std::string& s) {
  if (s == "benchmark") return ObjectiveKind::benchmark;
  if (s == "rkhs") return ObjectiveKind::rkhs;
  if (s == "gp") return ObjectiveKind::gp;
  if (s == "file") return ObjectiveKind::file;
  throw ConfigError("objective.kind: unknown value '" + s + "'");
}

struct ObjectiveConfig {
  ObjectiveKind kind = ObjectiveKind::benchmark;
  std::string name = "quadratic_bowl";
  int centers = 12;
  long axis_points = 33;
  std::uint64_t seed = 1;
  bool per_seed = true;  // derive a fresh synthetic instance per run seed
  std::string path;
};

// A fully resolved base run plus the sweep axes.
struct ExperimentPlan {
  RunConfig base;
  ObjectiveConfig objective;
  std::vector<AcqKind> algorithms;    // empty -> { base.acq.kind }
  std::vector<std::uint64_t> seeds;   // empty -> { base.seed }
  std::vector<int> horizons;          // empty -> { base.T }
  std::vector<double> deltas;         // empty -> { base.problem.delta }
  bool lengthscale_given = false;
  bool lipschitz_given = false;

  std::vector<AcqKind> cell_algorithms() const {
    return algorithms.empty() ? std::vector<AcqKind>{base.acq.kind} : algorithms;
  }
  std::vector<std::uint64_t> cell_seeds() const {
    return seeds.empty() ? std::vector<std::uint64_t>{base.seed} : seeds;
  }
  std::vector<int> cell_horizons() const {
    return horizons.empty() ? std::vector<int>{base.T} : horizons;
  }
  std::vector<double> cell_deltas() const {
    return deltas.empty() ? std::vector<double>{base.problem.delta} : deltas;
  }
  std::size_t cell_count() const {
    return cell_algorithms().size() * cell_seeds().size() * cell_horizons().size() *
           cell_deltas().size();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
  return out;
}

// Typed access over the raw key/value map; every read marks the key as known.
class ConfigReader {
public:
  explicit ConfigReader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  std::string required(const std::string& key) {
    seen_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
  }

  double num(const std::string& key, double fallback) {
    seen_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return parse_num(key, it->second);
  }

  long integer(const std::string& key, long fallback) {
    seen_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return parse_int(key, it->second);
  }

  bool flag(const std::string& key, bool fallback) {
    seen_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + it->second + "'");
  }

  // "1..8" or "1,4,9"
  std::vector<std::uint64_t> seed_list(const std::string& key) {
    seen_.insert(key);
    auto it = kv_.find(key);
    std::vector<std::uint64_t> out;
    if (it == kv_.end()) return out;
    const auto range = it->second.find("..");
    if (range != std::string::npos) {
      const long lo = parse_int(key, trim(it->second.substr(0, range)));
      const long hi = parse_int(key, trim(it->second.substr(range + 2)));
      if (hi < lo) throw ConfigError("key '" + key + "': empty range");
      for (long s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
      return out;
    }
    for (const auto& tok : split(it->second, ','))
      out.push_back(static_cast<std::uint64_t>(parse_int(key, tok)));
    return out;
  }

  std::vector<std::string> str_list(const std::string& key) {
    seen_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return {};
    return split(it->second, ',');
  }

  std::vector<double> num_list(const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : str_list(key)) out.push_back(parse_num(key, tok));
    return out;
  }

  std::vector<int> int_list(const std::string& key) {
    std::vector<int> out;
    for (const auto& tok : str_list(key))
      out.push_back(static_cast<int>(parse_int(key, tok)));
    return out;
  }

  // Unknown keys are hard errors: a typo must not silently fall back.
  void reject_unknown() const {
    for (const auto& [key, value] : kv_) {
      (void)value;
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
  }

private:
  double parse_num(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return x;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
  }

  long parse_int(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const long x = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return x;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
  }

  std::map<std::string, std::string> kv_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) +
                                       ": empty key");
    if (kv.count(key)) throw ConfigError("duplicate config key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

inline ExperimentPlan plan_from_reader(detail::ConfigReader& cfg) {
  ExperimentPlan plan;
  RunConfig& rc = plan.base;

  rc.problem.domain.d = static_cast<int>(cfg.integer("domain.d", 0));
  if (rc.problem.domain.d < 1) throw ConfigError("domain.d: required, must be >= 1");
  rc.problem.domain.r = cfg.num("domain.r", 0.0);
  if (!(rc.problem.domain.r > 0.0)) throw ConfigError("domain.r: required, must be > 0");

  plan.lipschitz_given = cfg.has("lipschitz");
  rc.problem.domain.lipschitz = cfg.num("lipschitz", 1.0);

  rc.kernel.family = kernel_family_from_string(cfg.str("kernel.family", "se"));
  plan.lengthscale_given = cfg.has("kernel.lengthscale");
  rc.kernel.lengthscale =
      cfg.num("kernel.lengthscale", 0.2 * rc.problem.domain.r);
  rc.kernel.validate();

  rc.problem.B = cfg.num("schedule.B", 2.0);
  rc.problem.delta = cfg.num("schedule.delta", 0.1);
  rc.sigma = cfg.num("schedule.sigma", 0.1);
  rc.problem.sigma_eps = cfg.num("schedule.sigma_eps", rc.sigma);
  const std::string vlt = cfg.str("schedule.vei_log_term", "as_printed");
  if (vlt == "as_printed") rc.vei_log_term = VeiLogTerm::as_printed;
  else if (vlt == "per_dimension") rc.vei_log_term = VeiLogTerm::per_dimension;
  else throw ConfigError("schedule.vei_log_term: unknown value '" + vlt + "'");

  const std::string sv = cfg.str("schedule.variant", "compact");
  if (sv == "pointwise") rc.ei_variant = EiVariant::pointwise;
  else if (sv == "discrete") rc.ei_variant = EiVariant::discrete;
  else if (sv == "time_only") rc.ei_variant = EiVariant::time_only;
  else if (sv == "compact") rc.ei_variant = EiVariant::compact;
  else throw ConfigError("schedule.variant: unknown value '" + sv + "'");

  rc.acq.kind = acq_kind_from_string(cfg.required("acq.kind"));
  rc.acq.alpha = cfg.num("acq.alpha", 1.0);
  const std::string tm = cfg.str("acq.theta_mode", "schedule_min");
  if (tm == "fixed") rc.acq.theta_mode = ThetaMode::fixed;
  else if (tm == "schedule_min") rc.acq.theta_mode = ThetaMode::schedule_min;
  else throw ConfigError("acq.theta_mode: unknown value '" + tm + "'");
  if (rc.acq.kind == AcqKind::vei && rc.acq.theta_mode == ThetaMode::fixed &&
      !cfg.has("acq.theta"))
    throw ConfigError("acq.theta: required when acq.kind = vei and acq.theta_mode = fixed");
  rc.acq.theta = cfg.num("acq.theta", 0.0);

  rc.T = static_cast<int>(cfg.integer("run.T", 0));
  if (rc.T < 1) throw ConfigError("run.T: required, must be >= 1");
  rc.T0 = static_cast<int>(cfg.integer("run.T0", 1));
  if (!cfg.has("run.seed")) throw ConfigError("missing required key 'run.seed'");
  rc.seed = static_cast<std::uint64_t>(cfg.integer("run.seed", 1));
  if (rc.T0 < 1 || rc.T < rc.T0) throw ConfigError("run.T0: need T >= T0 >= 1");

  rc.grid_cap = cfg.integer("grid.cap", 200000);
  rc.ts_joint_cap = cfg.integer("ts.joint_cap", 2048);
  rc.restarts = static_cast<int>(cfg.integer("opt.restarts", 32));
  rc.local_steps = static_cast<int>(cfg.integer("opt.local_steps", 40));

  if (cfg.has("regret.definition")) {
    rc.regret = regret_def_from_string(cfg.str("regret.definition", ""));
    rc.regret_explicit = true;
  } else {
    cfg.str("regret.definition", "");
  }

  StoppingRule& sr = rc.stopping_rule;
  sr.kind = stopping_kind_from_string(cfg.str("stopping.rule", "horizon"));
  sr.tol = cfg.num("stopping.tol", 0.0);
  sr.patience = static_cast<int>(cfg.integer("stopping.patience", 5));

  ObjectiveConfig& oc = plan.objective;
  oc.kind = objective_kind_from_string(cfg.str("objective.kind", "benchmark"));
  oc.name = cfg.str("objective.name", "quadratic_bowl");
  oc.centers = static_cast<int>(cfg.integer("objective.centers", 12));
  oc.axis_points = cfg.integer("objective.axis_points", 33);
  oc.seed = static_cast<std::uint64_t>(cfg.integer("objective.seed", 1));
  oc.per_seed = cfg.flag("objective.per_seed", true);
  oc.path = cfg.str("objective.path", "");
  if (oc.kind == ObjectiveKind::file && oc.path.empty())
    throw ConfigError("objective.path: required when objective.kind = file");
  rc.objective_id = oc.kind == ObjectiveKind::benchmark ? oc.name : to_string(oc.kind);

  for (const auto& a : cfg.str_list("sweep.algorithms"))
    plan.algorithms.push_back(acq_kind_from_string(a));
  plan.seeds = cfg.seed_list("sweep.seeds");
  plan.horizons = cfg.int_list("sweep.T");
  plan.deltas = cfg.num_list("sweep.delta");

  cfg.reject_unknown();
  return plan;
}

inline ExperimentPlan parse_config(std::istream& in) {
  detail::ConfigReader cfg(parse_key_values(in));
  return plan_from_reader(cfg);
}

inline ExperimentPlan parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

inline ExperimentPlan parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

// Canonical emission; parse(emit(plan)) reproduces the plan.
inline std::string to_config_string(const ExperimentPlan& plan) {
  const RunConfig& rc = plan.base;
  std::string out;
  auto put = [&out](const std::string& k, const std::string& v) {
    out += k + " = " + v + "\n";
  };
  put("domain.d", std::to_string(rc.problem.domain.d));
  put("domain.r", format_double(rc.problem.domain.r));
  put("lipschitz", format_double(rc.problem.domain.lipschitz));
  put("kernel.family", to_string(rc.kernel.family));
  put("kernel.lengthscale", format_double(rc.kernel.lengthscale));
  put("schedule.B", format_double(rc.problem.B));
  put("schedule.delta", format_double(rc.problem.delta));
  put("schedule.sigma", format_double(rc.sigma));
  put("schedule.sigma_eps", format_double(rc.problem.sigma_eps));
  put("schedule.vei_log_term",
      rc.vei_log_term == VeiLogTerm::as_printed ? "as_printed" : "per_dimension");
  put("schedule.variant", rc.ei_variant == EiVariant::pointwise   ? "pointwise"
                          : rc.ei_variant == EiVariant::discrete  ? "discrete"
                          : rc.ei_variant == EiVariant::time_only ? "time_only"
                                                                  : "compact");
  put("acq.kind", to_string(rc.acq.kind));
  put("acq.alpha", format_double(rc.acq.alpha));
  put("acq.theta", format_double(rc.acq.theta));
  put("acq.theta_mode",
      rc.acq.theta_mode == ThetaMode::fixed ? "fixed" : "schedule_min");
  put("run.T", std::to_string(rc.T));
  put("run.T0", std::to_string(rc.T0));
  put("run.seed", std::to_string(rc.seed));
  put("grid.cap", std::to_string(rc.grid_cap));
  put("ts.joint_cap", std::to_string(rc.ts_joint_cap));
  put("opt.restarts", std::to_string(rc.restarts));
  put("opt.local_steps", std::to_string(rc.local_steps));
  if (rc.regret_explicit) put("regret.definition", to_string(rc.regret));
  put("stopping.rule", rc.stopping_rule.kind == StoppingKind::horizon ? "horizon"
                       : rc.stopping_rule.kind == StoppingKind::stall ? "stall"
                                                                      : "acq_below");
  put("stopping.tol", format_double(rc.stopping_rule.tol));
  put("stopping.patience", std::to_string(rc.stopping_rule.patience));
  put("objective.kind", to_string(plan.objective.kind));
  put("objective.name", plan.objective.name);
  put("objective.centers", std::to_string(plan.objective.centers));
  put("objective.axis_points", std::to_string(plan.objective.axis_points));
  put("objective.seed", std::to_string(plan.objective.seed));
  put("objective.per_seed", plan.objective.per_seed ? "true" : "false");
  if (!plan.objective.path.empty()) put("objective.path", plan.objective.path);
  if (!plan.algorithms.empty()) {
    std::string v;
    for (std::size_t i = 0; i < plan.algorithms.size(); ++i)
      v += (i ? "," : "") + to_string(plan.algorithms[i]);
    put("sweep.algorithms", v);
  }
  if (!plan.seeds.empty()) {
    std::string v;
    for (std::size_t i = 0; i < plan.seeds.size(); ++i)
      v += (i ? "," : "") + std::to_string(plan.seeds[i]);
    put("sweep.seeds", v);
  }
  if (!plan.horizons.empty()) {
    std::string v;
    for (std::size_t i = 0; i < plan.horizons.size(); ++i)
      v += (i ? "," : "") + std::to_string(plan.horizons[i]);
    put("sweep.T", v);
  }
  if (!plan.deltas.empty()) {
    std::string v;
    for (std::size_t i = 0; i < plan.deltas.size(); ++i)
      v += (i ? "," : "") + format_double(plan.deltas[i]);
    put("sweep.delta", v);
  }
  return out;
}

inline bool plan_equal(const ExperimentPlan& a, const ExperimentPlan& b) {
  const RunConfig& x = a.base;
  const RunConfig& y = b.base;
  return x.problem.domain.d == y.problem.domain.d &&
         x.problem.domain.r == y.problem.domain.r &&
         x.problem.domain.lipschitz == y.problem.domain.lipschitz &&
         x.kernel.family == y.kernel.family &&
         x.kernel.lengthscale == y.kernel.lengthscale &&
         x.problem.B == y.problem.B && x.problem.delta == y.problem.delta &&
         x.sigma == y.sigma && x.problem.sigma_eps == y.problem.sigma_eps &&
         x.vei_log_term == y.vei_log_term && x.ei_variant == y.ei_variant &&
         x.acq.kind == y.acq.kind &&
         x.acq.alpha == y.acq.alpha && x.acq.theta == y.acq.theta &&
         x.acq.theta_mode == y.acq.theta_mode && x.T == y.T && x.T0 == y.T0 &&
         x.seed == y.seed && x.grid_cap == y.grid_cap &&
         x.ts_joint_cap == y.ts_joint_cap && x.restarts == y.restarts &&
         x.local_steps == y.local_steps &&
         x.regret_explicit == y.regret_explicit &&
         (!x.regret_explicit || x.regret == y.regret) &&
         x.stopping_rule.kind == y.stopping_rule.kind &&
         x.stopping_rule.tol == y.stopping_rule.tol &&
         x.stopping_rule.patience == y.stopping_rule.patience &&
         a.objective.kind == b.objective.kind && a.objective.name == b.objective.name &&
         a.objective.centers == b.objective.centers &&
         a.objective.axis_points == b.objective.axis_points &&
         a.objective.seed == b.objective.seed &&
         a.objective.per_seed == b.objective.per_seed &&
         a.objective.path == b.objective.path && a.algorithms == b.algorithms &&
         a.seeds == b.seeds && a.horizons == b.horizons && a.deltas == b.deltas;
}

}  // namespace bogp
