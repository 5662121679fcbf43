#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "bogp/common.hpp"
#include "bogp/normal.hpp"

namespace bogp {

// Constants fixed by the convergence analysis.
constexpr double kEiGapFactor = 1.328;          // c3 in the improvement-vs-EI bound
constexpr double kVeiLogScale = 1.09;           // c_alpha in the VEI schedule
constexpr double kVeiLogCoeff = 0.427;          // c_beta in the VEI schedule
constexpr double kVeiDeltaMax = 0.698;          // admissible confidence range for VEI regret
constexpr double kTsUnsaturatedProb = 0.051888437177574337;  // 1/(4 e sqrt(pi))

// C_gamma = 8 / log(1 + sigma^-2): prefactor turning information gain into a
// variance-sum bound.
inline double info_gain_prefactor(double sigma) {
  if (!(sigma > 0.0)) throw UnsupportedError("info_gain_prefactor requires sigma > 0");
  return 8.0 / std::log1p(1.0 / (sigma * sigma));
}

// Everything the closed-form schedules depend on.  pi_t is any summable
// weight sequence with sum of 1/pi_t equal to 1; the default is pi^2 t^2 / 6.
struct ScheduleParams {
  double B = 1.0;          // RKHS norm bound, >= 1
  double delta = 0.1;      // confidence, in (0,1)
  double sigma = 0.1;      // surrogate noise level, > 0
  double sigma_eps = 0.1;  // true observation noise, >= 0
  int d = 1;
  double r = 1.0;
  double lipschitz = 1.0;
  std::function<double(int)> pi_t;

  double c_sigma() const { return sigma_eps / sigma; }

  double pi(int t) const {
    if (pi_t) return pi_t(t);
    return M_PI * M_PI * double(t) * double(t) / 6.0;
  }

  // log(1 + r t^2 L): per-axis log-cardinality of the analysis lattice.
  double log_axis(int t) const {
    return std::log1p(r * double(t) * double(t) * lipschitz);
  }

  void validate() const {
    if (!(B >= 1.0)) throw ConfigError("schedule.B must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("schedule.delta must be in (0,1)");
    if (!(sigma > 0.0)) throw ConfigError("schedule.sigma must be positive");
    if (!(sigma_eps >= 0.0)) throw ConfigError("schedule.sigma_eps must be >= 0");
    if (d < 1 || !(r > 0.0) || !(lipschitz > 0.0))
      throw ConfigError("schedule domain parameters invalid");
  }
};

// --- prediction-error schedules (all return beta_t^{1/2}) ------------------

// Single (x, t): B + c_sigma sqrt(2 log(1/delta)).
inline double beta_pointwise(const ScheduleParams& p) {
  p.validate();
  return p.B + p.c_sigma() * std::sqrt(2.0 * std::log(1.0 / p.delta));
}

// Union bound over a finite set of given cardinality and all t.
inline double beta_discrete(const ScheduleParams& p, int t, double cardinality) {
  p.validate();
  if (t < 1) throw std::invalid_argument("beta_discrete: t must be >= 1");
  if (!(cardinality >= 1.0)) throw std::invalid_argument("beta_discrete: cardinality");
  return p.B + p.c_sigma() * std::sqrt(2.0 * std::log(cardinality * p.pi(t) / p.delta));
}

// Union bound over t only (the selected iterates).
inline double beta_time_only(const ScheduleParams& p, int t) {
  p.validate();
  if (t < 1) throw std::invalid_argument("beta_time_only: t must be >= 1");
  return p.B + p.c_sigma() * std::sqrt(2.0 * std::log(p.pi(t) / p.delta));
}

// Compact box through the refining lattice of cardinality (1 + r t^2 L)^d.
inline double beta_compact(const ScheduleParams& p, int t) {
  p.validate();
  if (t < 1) throw std::invalid_argument("beta_compact: t must be >= 1");
  return p.B + p.c_sigma() * std::sqrt(2.0 * std::log(p.pi(t) / p.delta) +
                                       2.0 * p.d * p.log_axis(t));
}

// Schedule the UCB regret bound runs on: both union bounds with delta/2 each.
inline double beta_ucb(const ScheduleParams& p, int t) {
  p.validate();
  if (t < 1) throw std::invalid_argument("beta_ucb: t must be >= 1");
  return p.B + p.c_sigma() * std::sqrt(2.0 * std::log(2.0 * p.pi(t) / p.delta) +
                                       2.0 * p.d * p.log_axis(t));
}

// --- Thompson sampling ------------------------------------------------------

// nu_t^{1/2} = B + sqrt(2 log(pi^2 t^2 / (3 delta)) + 2 d log(1 + r L t^2)).
// The delta/2 split is already folded into the pi^2 t^2 / 3 term.
inline double nu_ts(const ScheduleParams& p, int t) {
  p.validate();
  if (t < 1) throw std::invalid_argument("nu_ts: t must be >= 1");
  const double a = M_PI * M_PI * double(t) * double(t) / 3.0;
  return p.B + std::sqrt(2.0 * std::log(a / p.delta) + 2.0 * p.d * p.log_axis(t));
}

struct TsSpread {
  double c_t;
  double zeta_sqrt;  // nu_t^{1/2} (1 + c_t)
};

// c_t = sqrt(2 d log((1 + r L t^2) t^2)) concentrates the sampled path on the
// lattice; zeta^{1/2} scales the saturated-set margin.
inline TsSpread zeta_ts(const ScheduleParams& p, int t) {
  p.validate();
  if (t < 1) throw std::invalid_argument("zeta_ts: t must be >= 1");
  const double c =
      std::sqrt(2.0 * p.d * (p.log_axis(t) + 2.0 * std::log(double(t))));
  return {c, nu_ts(p, t) * (1.0 + c)};
}

// --- expected improvement ---------------------------------------------------

enum class EiVariant { pointwise, discrete, time_only, compact };

// Improvement-vs-EI gap schedules, each of shape c3 (B + c_sigma sqrt(...)).
inline double ei_schedule(const ScheduleParams& p, int t, EiVariant variant) {
  p.validate();
  if (t < 1) throw std::invalid_argument("ei_schedule: t must be >= 1");
  double arg = 0.0;
  switch (variant) {
    case EiVariant::pointwise:
      arg = 2.0 * std::log(1.0 / p.delta);
      break;
    case EiVariant::discrete:
      arg = 2.0 * std::log(p.pi(t) / p.delta) + 2.0 * p.d * p.log_axis(t);
      break;
    case EiVariant::time_only:
      arg = 2.0 * std::log(p.pi(t) / p.delta);
      break;
    case EiVariant::compact:
      arg = 2.0 * std::log(2.0 * p.pi(t) / p.delta) + 2.0 * p.d * p.log_axis(t);
      break;
    default:
      throw ConfigError("ei_schedule: unknown variant");
  }
  return kEiGapFactor * (p.B + p.c_sigma() * std::sqrt(arg));
}

// --- variance expected improvement ------------------------------------------

// The lattice log term is printed with multiplicity 1; the analogous UCB
// schedules carry a factor d.  Both readings are offered.
enum class VeiLogTerm { as_printed, per_dimension };

struct VeiSchedule {
  double beta_sqrt;
  double theta_min;  // smallest admissible exploration weight, = beta_sqrt
};

inline VeiSchedule vei_schedule(const ScheduleParams& p, int t,
                                VeiLogTerm log_term = VeiLogTerm::as_printed) {
  p.validate();
  if (t < 1) throw std::invalid_argument("vei_schedule: t must be >= 1");
  if (!(p.delta < kVeiDeltaMax))
    throw std::out_of_range("schedule.delta: VEI regret schedule requires delta in (0,0.698)");
  const double mult = (log_term == VeiLogTerm::per_dimension) ? double(p.d) : 1.0;
  const double beta =
      std::max(1.0, std::log(2.0 * p.pi(t) * kVeiLogScale / p.delta) / kVeiLogCoeff) +
      mult * p.log_axis(t) / kVeiLogCoeff;
  const double root = std::sqrt(beta);
  return {root, root};
}

// Fixed schedule for the plain convergence statement: beta = max{1, log(2 c_alpha / delta) / c_beta}.
inline double vei_fixed_beta(const ScheduleParams& p) {
  p.validate();
  return std::max(1.0, std::log(2.0 * kVeiLogScale / p.delta) / kVeiLogCoeff);
}

// --- convergence-constants checker -------------------------------------------

struct ConvergenceConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double w = 0.0;
  double alpha = 1.0;
  double beta_sqrt = 0.0;

  double c3() const { return c2 - beta_sqrt; }

  void validate() const {
    if (!(c1 > 0.0 && c2 > 0.0)) throw ConfigError("constants c1, c2 must be positive");
    if (!(w > 0.0)) throw ConfigError("constant w must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0,1]");
    if (!(c2 > beta_sqrt)) throw ConfigError("c2 must exceed beta_sqrt");
  }
};

struct ConstantsReport {
  bool a_ok = false;        // (c3/w)^alpha tau(-w) > w tau(0), as stated
  bool a_proof_ok = false;  // (c3/w)^alpha tau(-w) > tau(0), as used
  bool b_ok = false;        // c2 > beta^{1/2} + w
  bool c_ok = false;        // c1 Phi(-w) > 1
  bool d_ok = false;        // tau(c3 x - w) - x tau(0) > 0 on (0, w/c3)
  double a_margin = 0.0;
  double a_proof_margin = 0.0;
  double b_margin = 0.0;
  double c_margin = 0.0;
  double d_margin = 0.0;

  bool all_ok(bool proof_version_a = true) const {
    return (proof_version_a ? a_proof_ok : a_ok) && b_ok && c_ok && d_ok;
  }
};

// Numeric evaluation of the four sufficient conditions; condition (d) is
// sampled densely and at both endpoint limits.  Report-only, never throws on
// a failing condition.
inline ConstantsReport check_ei_constants(const ConvergenceConstants& c, int samples) {
  c.validate();
  if (samples < 100) throw std::invalid_argument("check_ei_constants: samples must be >= 100");
  const double c3 = c.c3();
  ConstantsReport rep;

  const double lhs_a = std::pow(c3 / c.w, c.alpha) * tau(-c.w);
  rep.a_margin = lhs_a - c.w * tau(0.0);
  rep.a_proof_margin = lhs_a - tau(0.0);
  rep.a_ok = rep.a_margin > 0.0;
  rep.a_proof_ok = rep.a_proof_margin > 0.0;

  rep.b_margin = c.c2 - (c.beta_sqrt + c.w);
  rep.b_ok = rep.b_margin > 0.0;

  rep.c_margin = c.c1 * normal_cdf(-c.w) - 1.0;
  rep.c_ok = rep.c_margin > 0.0;

  const double hi = c.w / c3;
  double worst = tau(-c.w);                 // x -> 0 limit
  worst = std::min(worst, tau(0.0) * (1.0 - hi));  // x -> w/c3 limit
  for (int i = 1; i <= samples; ++i) {
    const double x = hi * double(i) / double(samples + 1);
    worst = std::min(worst, tau(c3 * x - c.w) - x * tau(0.0));
  }
  rep.d_margin = worst;
  rep.d_ok = worst > 0.0;
  return rep;
}

}  // namespace bogp
