#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bogp/bo_loop.hpp"
#include "bogp/common.hpp"
#include "bogp/gp.hpp"
#include "bogp/objectives.hpp"
#include "bogp/schedules.hpp"

namespace bogp {

// I_t(x) = max(y+ - f(x), 0).
inline double improvement(double y_plus, double f_x) {
  return std::max(y_plus - f_x, 0.0);
}

struct InfoGainSeries {
  double total = 0.0;
  std::vector<double> per_term;
};

// Information gain accrued by a run: 1/2 sum log(1 + sigma^-2 sigma_{t-1}^2(x_t)).
inline InfoGainSeries info_gain(const Trace& trace, double sigma) {
  if (!(sigma > 0.0)) throw UnsupportedError("info_gain requires sigma > 0");
  InfoGainSeries out;
  out.per_term.reserve(trace.records.size());
  for (const auto& rec : trace.records) {
    const double term =
        0.5 * std::log1p(rec.sigma_prev * rec.sigma_prev / (sigma * sigma));
    out.per_term.push_back(term);
    out.total += term;
  }
  return out;
}

struct GammaSeries {
  double total = 0.0;
  std::vector<double> per_term;
  long grid_size = 0;
};

// Greedy maximization of the per-step posterior variance over a fixed
// lattice: the standard (1 - 1/e) surrogate for the maximum information
// gain.  An estimate, not the exact maximum.
inline GammaSeries gamma_greedy(const KernelSpec& kernel, const BoxDomain& domain,
                                double sigma, int T, long grid_size) {
  kernel.validate();
  domain.validate();
  if (!(sigma > 0.0)) throw UnsupportedError("gamma_greedy requires sigma > 0");
  if (T < 1) throw std::invalid_argument("gamma_greedy: T must be >= 1");
  if (grid_size < T) throw std::invalid_argument("gamma_greedy: grid must be >= T");

  // regular lattice of about grid_size points
  long axis = std::max<long>(
      2, static_cast<long>(std::floor(std::pow(double(grid_size), 1.0 / domain.d))));
  long m = 1;
  for (int j = 0; j < domain.d; ++j) m *= axis;
  Matrix P(domain.d, m);
  for (long i = 0; i < m; ++i) {
    long rem = i;
    for (int j = domain.d - 1; j >= 0; --j) {
      P(j, i) = domain.r * double(rem % axis) / double(axis - 1);
      rem /= axis;
    }
  }

  // incremental conditioning: V accumulates the whitened cross-covariances,
  // var holds the current posterior variance of every lattice point
  const double s2 = sigma * sigma;
  Vector var = Vector::Ones(m);
  Matrix V(T, m);
  Matrix L = Matrix::Zero(T, T);
  std::vector<long> picked;
  GammaSeries out;
  out.grid_size = m;
  out.per_term.reserve(T);

  for (int t = 0; t < T; ++t) {
    long best = 0;
    for (long i = 1; i < m; ++i)
      if (var[i] > var[best]) best = i;
    const double v = std::max(var[best], 0.0);
    out.per_term.push_back(0.5 * std::log1p(v / s2));
    out.total += out.per_term.back();

    // border the factor of K(picked) + sigma^2 I with the new point
    Vector k(t);
    for (int j = 0; j < t; ++j)
      k[j] = evaluate(kernel, P.col(picked[j]), P.col(best));
    Vector c(t);
    if (t > 0)
      c = L.topLeftCorner(t, t).triangularView<Eigen::Lower>().solve(k);
    const double p2 = 1.0 + s2 - (t > 0 ? c.squaredNorm() : 0.0);
    const double piv = std::sqrt(std::max(p2, 1e-12));
    if (t > 0) L.row(t).head(t) = c.transpose();
    L(t, t) = piv;

    // new whitened row over the lattice, then the rank-1 variance downdate
    Vector row(m);
    for (long i = 0; i < m; ++i)
      row[i] = evaluate(kernel, P.col(best), P.col(i));
    if (t > 0) row -= V.topRows(t).transpose() * c;
    row /= piv;
    var -= row.cwiseProduct(row);
    V.row(t) = row.transpose();
    picked.push_back(best);
  }
  return out;
}

// --- regret bound evaluators --------------------------------------------------

struct UcbBoundReport {
  double lhs = 0.0;            // cumulative standard regret
  double rhs = 0.0;            // sqrt(C1 T beta_T gamma_hat) + 2
  bool satisfied = false;
  double gamma_hat = 0.0;
  double info_gain_run = 0.0;  // lower surrogate for gamma_T
  double rhs_info_gain = 0.0;
  bool satisfied_info_gain = false;
  double beta_T = 0.0;
};

inline UcbBoundReport bound_ucb(const Trace& trace, const ScheduleParams& params,
                                const GammaSeries& gamma) {
  UcbBoundReport rep;
  const int T = static_cast<int>(trace.records.size());
  if (T < 1) throw std::invalid_argument("bound_ucb: empty trace");
  const double c1 = info_gain_prefactor(params.sigma);
  const double bs = beta_ucb(params, T);
  rep.beta_T = bs * bs;
  rep.gamma_hat = gamma.total;
  rep.info_gain_run = info_gain(trace, params.sigma).total;
  rep.lhs = trace.cumulative(RegretDef::standard_max);
  rep.rhs = std::sqrt(c1 * T * rep.beta_T * rep.gamma_hat) + 2.0;
  rep.satisfied = rep.lhs <= rep.rhs;
  rep.rhs_info_gain = std::sqrt(c1 * T * rep.beta_T * rep.info_gain_run) + 2.0;
  rep.satisfied_info_gain = rep.lhs <= rep.rhs_info_gain;
  return rep;
}

struct VeiBoundReport {
  double lhs = 0.0;            // cumulative improvement-based regret
  double rhs = 0.0;            // headline coefficient 0.4
  double rhs_with_theta = 0.0; // proof coefficient 0.4 + theta
  bool satisfied = false;
  bool satisfied_with_theta = false;
  double gamma_hat = 0.0;
  double beta_T = 0.0;
};

inline VeiBoundReport bound_vei(const Trace& trace, const ScheduleParams& params,
                                double alpha, double theta, const GammaSeries& gamma,
                                VeiLogTerm log_term = VeiLogTerm::as_printed) {
  VeiBoundReport rep;
  const int T = static_cast<int>(trace.records.size());
  if (T < 1) throw std::invalid_argument("bound_vei: empty trace");
  const double cg = info_gain_prefactor(params.sigma);
  const VeiSchedule vs = vei_schedule(params, T, log_term);
  rep.beta_T = vs.beta_sqrt * vs.beta_sqrt;
  rep.gamma_hat = gamma.total;
  rep.lhs = trace.cumulative(RegretDef::improvement);
  const double head = 0.5 * vs.beta_sqrt * std::sqrt(cg * T * gamma.total);
  const double expl = std::pow(0.25 * cg * gamma.total, 0.5 * alpha) *
                      std::pow(double(T), 0.5 * (2.0 - alpha));
  rep.rhs = head + 0.4 * expl + 2.0;
  rep.rhs_with_theta = head + (0.4 + theta) * expl + 2.0;
  rep.satisfied = rep.lhs <= rep.rhs;
  rep.satisfied_with_theta = rep.lhs <= rep.rhs_with_theta;
  return rep;
}

struct EiBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;            // (0.4 + beta_T^{1/2})/2 sqrt(C1 T gamma) + sum + M_h + 2
  bool satisfied = false;
  double star_term = 0.0;      // sum_t beta_t^{1/2} sigma_{t-1}(x*)
  double m_h = 0.0;            // estimated tail constant
  double gamma_hat = 0.0;
};

// Replays the surrogate along the trace to evaluate the EI regret bound.
// star_term and m_h are run-dependent estimates: the bound is reported, not
// certified.
inline EiBoundReport ei_bound_report(const Trace& trace, const ScheduleParams& params,
                                     const KernelSpec& kernel, const Vector& x_star,
                                     const GammaSeries& gamma) {
  EiBoundReport rep;
  const int T = static_cast<int>(trace.records.size());
  if (T < 1) throw std::invalid_argument("ei_bound_report: empty trace");
  rep.gamma_hat = gamma.total;
  rep.lhs = trace.cumulative(RegretDef::improvement);

  GpState state(kernel, params.sigma);
  const double fd = 1e-4 * params.r;
  for (int t = 1; t <= T; ++t) {
    const auto& rec = trace.records[t - 1];
    const double bs = ei_schedule(params, t, EiVariant::compact);
    rep.star_term += bs * state.posterior(x_star).stddev;

    // Lipschitz constant of sigma_{t-1} near x*, by central differences
    double g2 = 0.0;
    for (int j = 0; j < params.d; ++j) {
      Vector lo = x_star, hi = x_star;
      lo[j] = std::max(0.0, x_star[j] - fd);
      hi[j] = std::min(params.r, x_star[j] + fd);
      const double g = (state.posterior(hi).stddev - state.posterior(lo).stddev) /
                       (hi[j] - lo[j]);
      g2 += g * g;
    }
    rep.m_h += bs * std::sqrt(g2) / (params.lipschitz * double(t) * double(t));

    const double y = trace.negated_surrogate ? -rec.y : rec.y;
    state = state.update(rec.x, y);
  }
  const double c1 = info_gain_prefactor(params.sigma);
  const double bT = ei_schedule(params, T, EiVariant::compact);
  rep.rhs = 0.5 * (0.4 + bT) * std::sqrt(c1 * T * gamma.total) + rep.star_term +
            rep.m_h + 2.0;
  rep.satisfied = rep.lhs <= rep.rhs;
  return rep;
}

// Debug telemetry for TS runs on synthetic objectives: lattice points whose
// optimality gap exceeds the sampling spread zeta^{1/2} sigma_{t-1}.  Needs
// the true objective, so it is never part of a production trace.
struct SaturationReport {
  long saturated = 0;
  long total = 0;
  std::vector<bool> mask;
};

inline SaturationReport saturated_set(const GpState& state, const Discretization& disc,
                                      const std::function<double(const Vector&)>& f,
                                      double zeta_sqrt) {
  if (!f) throw std::invalid_argument("saturated_set: objective required");
  SaturationReport rep;
  rep.total = disc.size();
  rep.mask.resize(rep.total, false);
  // best objective value among lattice points (minimization orientation)
  double f_best = std::numeric_limits<double>::infinity();
  std::vector<double> values(rep.total);
  for (long i = 0; i < rep.total; ++i) {
    values[i] = f(disc.point(i));
    f_best = std::min(f_best, values[i]);
  }
  for (long i = 0; i < rep.total; ++i) {
    const double gap = values[i] - f_best;
    const double spread = zeta_sqrt * state.posterior(disc.point(i)).stddev;
    if (gap > spread) {
      rep.mask[i] = true;
      ++rep.saturated;
    }
  }
  return rep;
}

// --- statistical coverage of the probabilistic error bounds -------------------

enum class CoverageKind { pointwise_error, ei_gap };

inline CoverageKind coverage_kind_from_string(const std::string& s) {
  if (s == "pointwise_error") return CoverageKind::pointwise_error;
  if (s == "ei_gap") return CoverageKind::ei_gap;
  throw ConfigError("coverage kind: unknown value '" + s + "'");
}

struct CoverageParams {
  KernelSpec kernel;
  BoxDomain domain;
  double B = 2.0;
  double delta = 0.2;
  double sigma = 0.1;
  double sigma_eps = 0.1;
  int t_max = 30;
  int centers = 12;
  std::uint64_t seed = 1;
};

struct CoverageReport {
  int replications = 0;
  int violations = 0;
  double rate = 0.0;
  double ci99_halfwidth = 0.0;
  double delta = 0.0;
};

// Each replication draws a fresh norm-certified objective, a fresh design of
// random size t, fresh Gaussian noise and one probe, then checks the
// pointwise inequality once.  The guarantee is a violation probability of at
// most delta per replication.
inline CoverageReport coverage_test(CoverageKind kind, int replications,
                                    const CoverageParams& cp) {
  if (replications < 1) throw std::invalid_argument("coverage: replications >= 1");
  cp.domain.validate();
  int violations = 0;
  const double c_sigma = cp.sigma_eps / cp.sigma;
  const double slack = 1e-9;  // roundoff allowance on a closed inequality
  for (int i = 0; i < replications; ++i) {
    Rng rng(mix_seed(cp.seed, 0xc0f0 + std::uint64_t(i)));
    const int t = 1 + static_cast<int>(rng.uniform_int(cp.t_max));
    const RkhsFunction f =
        make_rkhs(cp.kernel, cp.domain, cp.centers, cp.B, rng.raw());
    Matrix X(cp.domain.d, t);
    Vector y(t);
    for (int j = 0; j < t; ++j) {
      X.col(j) = rng.uniform_vector(cp.domain.d, 0.0, cp.domain.r);
      y[j] = f.evaluate(X.col(j)) + cp.sigma_eps * rng.normal();
    }
    const GpState state = GpState::fit(cp.kernel, cp.sigma, X, y);
    const Vector probe = rng.uniform_vector(cp.domain.d, 0.0, cp.domain.r);
    const Posterior post = state.posterior(probe);
    const double fx = f.evaluate(probe);

    if (kind == CoverageKind::pointwise_error) {
      const double bs = cp.B + c_sigma * std::sqrt(2.0 * std::log(1.0 / cp.delta));
      if (std::abs(fx - post.mean) > bs * post.stddev + slack) ++violations;
    } else {
      double y_plus = y.minCoeff();
      const double gap = improvement(y_plus, fx) -
                         ei_from_moments(post.mean, post.stddev, y_plus, 1.0);
      const double bs = kEiGapFactor *
                        (cp.B + c_sigma * std::sqrt(2.0 * std::log(1.0 / cp.delta)));
      if (std::abs(gap) > bs * post.stddev + slack) ++violations;
    }
  }
  CoverageReport rep;
  rep.replications = replications;
  rep.violations = violations;
  rep.rate = double(violations) / double(replications);
  rep.ci99_halfwidth =
      2.5758 * std::sqrt(std::max(rep.rate * (1.0 - rep.rate), 1e-12) /
                         double(replications));
  rep.delta = cp.delta;
  return rep;
}

}  // namespace bogp
