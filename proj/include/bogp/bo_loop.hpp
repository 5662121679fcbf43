#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "bogp/acquisition.hpp"
#include "bogp/common.hpp"
#include "bogp/domain.hpp"
#include "bogp/gp.hpp"
#include "bogp/kernels.hpp"
#include "bogp/objectives.hpp"
#include "bogp/rng.hpp"
#include "bogp/schedules.hpp"
#include "bogp/serialize.hpp"

namespace bogp {

enum class RegretDef { standard_max, asymptotic, improvement };

inline std::string to_string(RegretDef d) {
  switch (d) {
    case RegretDef::standard_max: return "standard";
    case RegretDef::asymptotic: return "asymptotic";
    case RegretDef::improvement: return "improvement";
  }
  return "?";
}

inline RegretDef regret_def_from_string(const std::string& s) {
  if (s == "standard") return RegretDef::standard_max;
  if (s == "asymptotic") return RegretDef::asymptotic;
  if (s == "improvement") return RegretDef::improvement;
  throw ConfigError("regret.definition: unknown value '" + s + "'");
}

// Native regret orientation of each engine: the confidence-bound engines are
// analyzed through f(x_t) - f*, the improvement engines through the
// incumbent.
inline RegretDef default_regret(AcqKind kind) {
  switch (kind) {
    case AcqKind::ucb:
    case AcqKind::ts: return RegretDef::standard_max;
    case AcqKind::ei:
    case AcqKind::vei: return RegretDef::improvement;
  }
  return RegretDef::standard_max;
}

enum class StoppingKind { horizon, stall, acq_below };

struct StoppingRule {
  StoppingKind kind = StoppingKind::horizon;
  double tol = 0.0;
  int patience = 5;  // stall window
};

inline StoppingKind stopping_kind_from_string(const std::string& s) {
  if (s == "horizon") return StoppingKind::horizon;
  if (s == "stall") return StoppingKind::stall;
  if (s == "acq_below") return StoppingKind::acq_below;
  throw ConfigError("stopping.rule: unknown value '" + s + "'");
}

struct ProblemSpec {
  BoxDomain domain;
  double B = 1.0;
  double sigma_eps = 0.1;
  double delta = 0.1;

  void validate() const {
    domain.validate();
    if (!(B >= 1.0)) throw ConfigError("schedule.B must be >= 1");
    if (!(sigma_eps >= 0.0)) throw ConfigError("schedule.sigma_eps must be >= 0");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("schedule.delta must be in (0,1)");
  }
};

struct RunConfig {
  ProblemSpec problem;
  KernelSpec kernel;
  AcquisitionSpec acq;
  double sigma = 0.1;  // surrogate noise level
  int T = 10;
  int T0 = 1;
  std::uint64_t seed = 1;
  std::string objective_id = "quadratic_bowl";
  StoppingRule stopping_rule;
  RegretDef regret = RegretDef::standard_max;
  bool regret_explicit = false;  // when false, default_regret(acq.kind) applies
  int restarts = 32;
  int local_steps = 40;
  long grid_cap = 200000;
  Index ts_joint_cap = 2048;
  VeiLogTerm vei_log_term = VeiLogTerm::as_printed;
  EiVariant ei_variant = EiVariant::compact;  // telemetry schedule for EI runs

  RegretDef active_regret() const {
    return regret_explicit ? regret : default_regret(acq.kind);
  }

  ScheduleParams schedule_params() const {
    ScheduleParams p;
    p.B = problem.B;
    p.delta = problem.delta;
    p.sigma = sigma;
    p.sigma_eps = problem.sigma_eps;
    p.d = problem.domain.d;
    p.r = problem.domain.r;
    p.lipschitz = problem.domain.lipschitz;
    return p;
  }

  void validate() const {
    problem.validate();
    kernel.validate();
    acq.validate();
    if (!(sigma > 0.0)) throw ConfigError("schedule.sigma must be positive");
    if (T0 < 1 || T < T0) throw std::invalid_argument("run: need T >= T0 >= 1");
  }
};

// One sample, as appended to the trace.  All objective-facing quantities are
// recorded in the minimization orientation regardless of engine.
struct TraceRecord {
  int t = 0;
  Vector x;
  double y = 0.0;
  double y_plus = 0.0;
  double mu_prev = 0.0;
  double sigma_prev = 0.0;
  double schedule_sqrt = 0.0;  // beta^{1/2} or nu^{1/2}; NaN for init records
  double acq_value = 0.0;      // acquisition at the selected point; NaN for init
  double r_std = 0.0;
  double r_asymp = 0.0;
  double r_impr = 0.0;
  double r_inst = 0.0;
  double cum_regret = 0.0;
  double info_gain_cum = 0.0;
  long grid_size = 0;
  std::string flags;
};

struct Trace {
  std::vector<TraceRecord> records;
  AcqKind kind = AcqKind::ucb;
  RegretDef regret = RegretDef::standard_max;
  int T0 = 1;
  bool negated_surrogate = false;
  double f_star = std::numeric_limits<double>::quiet_NaN();

  double final_y_plus() const {
    return records.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : records.back().y_plus;
  }
  double cumulative(RegretDef def) const {
    double acc = 0.0;
    for (const auto& rec : records)
      acc += def == RegretDef::standard_max ? rec.r_std
             : def == RegretDef::asymptotic ? rec.r_asymp
                                            : rec.r_impr;
    return acc;
  }
};

// Evaluates a stopping rule against the trace accumulated so far.
inline bool stopping(const StoppingRule& rule, const Trace& trace) {
  switch (rule.kind) {
    case StoppingKind::horizon:
      return false;
    case StoppingKind::stall: {
      if (rule.patience < 1) throw ConfigError("stopping.patience must be >= 1");
      const auto& recs = trace.records;
      const int n = static_cast<int>(recs.size());
      if (n < trace.T0 + rule.patience) return false;
      for (int i = n - rule.patience; i < n; ++i) {
        const double before = recs[i - 1].y_plus;
        if (before - recs[i].y_plus > rule.tol) return false;
      }
      return true;
    }
    case StoppingKind::acq_below: {
      if (trace.kind != AcqKind::ei && trace.kind != AcqKind::vei)
        throw ConfigError("stopping.rule acq_below applies to ei/vei only");
      const auto& recs = trace.records;
      if (static_cast<int>(recs.size()) <= trace.T0) return false;
      return recs.back().acq_value < rule.tol;
    }
  }
  throw ConfigError("stopping.rule: unknown rule");
}

namespace detail {
constexpr std::uint64_t kInitTag = 0x01;
constexpr std::uint64_t kNoiseTag = 0x02;
constexpr std::uint64_t kAcqTag = 0x03;
constexpr std::uint64_t kTsTag = 0x04;

inline void dump_state_on_abort(const GpState& state, int t) {
  std::fprintf(stderr,
               "[bo] aborting run at t=%d: surrogate factorization failed; "
               "state dump follows\n%s\n",
               t, state.to_json().dump().c_str());
}
}  // namespace detail

// Runs one engine to its horizon (or stopping rule).  Deterministic in
// config.seed: initialization, observation noise, acquisition restarts and
// posterior sampling all draw from streams derived from it.
inline Trace run(const RunConfig& config, const Objective& objective) {
  config.validate();
  if (!objective.f) throw std::invalid_argument("run: objective has no evaluator");
  const BoxDomain& box = config.problem.domain;
  const ScheduleParams params = config.schedule_params();
  const bool negate = config.acq.kind == AcqKind::ucb || config.acq.kind == AcqKind::ts;

  Trace trace;
  trace.kind = config.acq.kind;
  trace.regret = config.active_regret();
  trace.T0 = config.T0;
  trace.negated_surrogate = negate;
  trace.f_star = objective.f_star;

  GpState state(config.kernel, config.sigma);
  Incumbent incumbent;
  Rng init_rng(mix_seed(config.seed, detail::kInitTag));
  Rng noise_rng(mix_seed(config.seed, detail::kNoiseTag));
  double cum = 0.0;
  double info = 0.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (int t = 1; t <= config.T; ++t) {
    TraceRecord rec;
    rec.t = t;
    rec.schedule_sqrt = nan;
    rec.acq_value = nan;

    if (t <= config.T0) {
      rec.x = init_rng.uniform_vector(box.d, 0.0, box.r);
      rec.flags = "init";
    } else {
      if (stopping(config.stopping_rule, trace)) break;
      switch (config.acq.kind) {
        case AcqKind::ucb: {
          const double bs = config.acq.schedule ? config.acq.schedule(t)
                                                : beta_ucb(params, t);
          auto res = maximize_acquisition(
              [&](const Vector& x) { return ucb_value(state, x, bs); }, box,
              config.restarts, config.local_steps,
              mix_seed(config.seed, detail::kAcqTag + 16 * std::uint64_t(t)));
          rec.x = res.x;
          rec.acq_value = res.value;
          rec.schedule_sqrt = bs;
          break;
        }
        case AcqKind::ei: {
          const double a = config.acq.alpha;
          auto res = maximize_acquisition(
              [&](const Vector& x) { return ei_value(state, x, incumbent, a); },
              box, config.restarts, config.local_steps,
              mix_seed(config.seed, detail::kAcqTag + 16 * std::uint64_t(t)));
          rec.x = res.x;
          rec.acq_value = res.value;
          rec.schedule_sqrt = ei_schedule(params, t, config.ei_variant);
          break;
        }
        case AcqKind::vei: {
          const double a = config.acq.alpha;
          const VeiSchedule vs = vei_schedule(params, t, config.vei_log_term);
          const double theta = config.acq.theta_mode == ThetaMode::fixed
                                   ? config.acq.theta
                                   : vs.theta_min;
          auto res = maximize_acquisition(
              [&](const Vector& x) {
                return vei_value(state, x, incumbent, a, theta);
              },
              box, config.restarts, config.local_steps,
              mix_seed(config.seed, detail::kAcqTag + 16 * std::uint64_t(t)));
          rec.x = res.x;
          rec.acq_value = res.value;
          rec.schedule_sqrt = vs.beta_sqrt;
          break;
        }
        case AcqKind::ts: {
          const double ns = config.acq.schedule ? config.acq.schedule(t)
                                                : nu_ts(params, t);
          Discretization disc(box, t, config.grid_cap);
          TsSelection sel =
              ts_select(state, disc, ns * ns,
                        mix_seed(config.seed, detail::kTsTag + 16 * std::uint64_t(t)),
                        config.ts_joint_cap);
          rec.x = sel.x;
          rec.acq_value = sel.sampled_value;
          rec.schedule_sqrt = ns;
          rec.grid_size = disc.size();
          if (disc.capped()) rec.flags = "grid_cap";
          if (sel.chunked) rec.flags += (rec.flags.empty() ? "ts_chunked" : ";ts_chunked");
          break;
        }
      }
    }

    const Posterior prev = state.posterior(rec.x);
    rec.mu_prev = negate ? -prev.mean : prev.mean;
    rec.sigma_prev = prev.stddev;

    const double f_true = objective.f(rec.x);
    if (!std::isfinite(f_true)) {
      std::string where;
      for (Index j = 0; j < rec.x.size(); ++j)
        where += (j ? ";" : "") + std::to_string(rec.x[j]);
      throw NumericError("objective returned non-finite value at [" + where + "]");
    }
    rec.y = f_true + config.problem.sigma_eps * noise_rng.normal();

    const double y_plus_before = incumbent.y_plus;
    incumbent.observe(rec.x, rec.y);
    rec.y_plus = incumbent.y_plus;

    const double fs = objective.f_star;
    rec.r_std = f_true - fs;
    rec.r_asymp = rec.y_plus - fs;
    rec.r_impr = std::isfinite(y_plus_before)
                     ? std::max(y_plus_before - fs, 0.0) -
                           std::max(y_plus_before - f_true, 0.0)
                     : 0.0;
    rec.r_inst = trace.regret == RegretDef::standard_max ? rec.r_std
                 : trace.regret == RegretDef::asymptotic ? rec.r_asymp
                                                         : rec.r_impr;
    cum += rec.r_inst;
    rec.cum_regret = cum;

    info += 0.5 * std::log1p(rec.sigma_prev * rec.sigma_prev /
                             (config.sigma * config.sigma));
    rec.info_gain_cum = info;

    try {
      state = state.update(rec.x, negate ? -rec.y : rec.y);
    } catch (const SingularModelError&) {
      detail::dump_state_on_abort(state, t);
      throw;
    }
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace bogp
