#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "bogp/common.hpp"
#include "bogp/domain.hpp"
#include "bogp/gp.hpp"
#include "bogp/normal.hpp"

namespace bogp {

enum class AcqKind { ucb, ts, ei, vei };

inline std::string to_string(AcqKind k) {
  switch (k) {
    case AcqKind::ucb: return "ucb";
    case AcqKind::ts: return "ts";
    case AcqKind::ei: return "ei";
    case AcqKind::vei: return "vei";
  }
  return "?";
}

inline AcqKind acq_kind_from_string(const std::string& s) {
  if (s == "ucb") return AcqKind::ucb;
  if (s == "ts") return AcqKind::ts;
  if (s == "ei") return AcqKind::ei;
  if (s == "vei") return AcqKind::vei;
  throw ConfigError("acq.kind: unknown value '" + s + "'");
}

enum class ThetaMode { fixed, schedule_min };

struct AcquisitionSpec {
  AcqKind kind = AcqKind::ucb;
  double alpha = 1.0;  // improvement exponent (ei/vei)
  double theta = 0.0;  // exploration weight (vei, theta_mode == fixed)
  ThetaMode theta_mode = ThetaMode::schedule_min;
  // Optional override producing beta_t^{1/2} (ucb) or nu_t^{1/2} (ts).
  std::function<double(int)> schedule;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("acq.alpha must be in (0,1]");
    if (kind == AcqKind::vei && theta_mode == ThetaMode::fixed && !(theta >= 0.0))
      throw ConfigError("acq.theta must be >= 0");
  }
};

// Best observation so far under the minimization convention.
struct Incumbent {
  double y_plus = std::numeric_limits<double>::infinity();
  Vector x_plus;

  bool valid() const { return std::isfinite(y_plus); }

  void observe(const Vector& x, double y) {
    if (y < y_plus) {
      y_plus = y;
      x_plus = x;
    }
  }
};

// mu_t(x) + beta^{1/2} sigma_t(x), applied verbatim to whatever surrogate the
// state holds.  The optimization engine trains the surrogate on negated
// observations, so maximizing this expression searches for small objective
// values.
inline double ucb_value(const GpState& state, const Vector& x, double beta_sqrt) {
  if (!(beta_sqrt >= 0.0)) throw std::invalid_argument("ucb_value: beta_sqrt must be >= 0");
  const Posterior p = state.posterior(x);
  return p.mean + beta_sqrt * p.stddev;
}

// sd^alpha with the zero case routed to the continuous limit by the callers.
inline double pow_alpha(double sd, double alpha) {
  return std::exp(alpha * std::log(std::max(sd, 1e-300)));
}

// EI written through the profile tau: EI(a, b) = b tau(a / b), b > 0.
inline double ei_ab(double a, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("ei_ab: b must be positive");
  return b * tau(a / b);
}

// Expected improvement from posterior moments: with z = (y+ - mu) / sd^alpha,
//   EI = (y+ - mu) Phi(z) + sd^alpha phi(z),
// and the degenerate sd = 0 limit max(y+ - mu, 0).
inline double ei_from_moments(double mean, double sd, double y_plus, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("ei: alpha must be in (0,1]");
  const double a = y_plus - mean;
  if (sd == 0.0) return std::max(a, 0.0);
  const double b = pow_alpha(sd, alpha);
  const double z = a / b;
  return std::max(0.0, a * normal_cdf(z) + b * normal_pdf(z));
}

inline double ei_value(const GpState& state, const Vector& x,
                       const Incumbent& incumbent, double alpha) {
  if (!incumbent.valid())
    throw std::invalid_argument("ei_value: incumbent not initialized");
  const Posterior p = state.posterior(x);
  return ei_from_moments(p.mean, p.stddev, incumbent.y_plus, alpha);
}

// EI plus the explicit exploration bonus theta sd^alpha.
inline double vei_from_moments(double mean, double sd, double y_plus, double alpha,
                               double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("vei: theta must be >= 0");
  const double bonus = (sd == 0.0) ? 0.0 : theta * pow_alpha(sd, alpha);
  return ei_from_moments(mean, sd, y_plus, alpha) + bonus;
}

inline double vei_value(const GpState& state, const Vector& x,
                        const Incumbent& incumbent, double alpha, double theta) {
  if (!incumbent.valid())
    throw std::invalid_argument("vei_value: incumbent not initialized");
  const Posterior p = state.posterior(x);
  return vei_from_moments(p.mean, p.stddev, incumbent.y_plus, alpha, theta);
}

struct TsSelection {
  Vector x;
  long index = 0;
  double sampled_value = 0.0;
  bool chunked = false;
};

// Smallest index attaining the maximum.
inline long argmax_on_set(const Vector& values) {
  if (values.size() < 1) throw std::invalid_argument("argmax_on_set: empty");
  long best = 0;
  for (Index i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

// One scaled posterior draw over the lattice, then its argmax.  Lattices
// larger than joint_cap fall back to independently sampled chunks (cross-chunk
// correlation is dropped); the selection is flagged so traces record it.
inline TsSelection ts_select(const GpState& state, const Discretization& disc,
                             double nu, std::uint64_t seed, Index joint_cap = 2048) {
  const long m = disc.size();
  if (m < 1) throw std::invalid_argument("ts_select: empty lattice");
  TsSelection sel;
  Vector sample(m);
  if (m <= joint_cap) {
    sample = state.sample_on_set(disc.all_points(), nu, seed);
  } else {
    sel.chunked = true;
    for (long start = 0, chunk = 0; start < m; start += joint_cap, ++chunk) {
      const long len = std::min<long>(joint_cap, m - start);
      Matrix P(disc.domain().d, len);
      for (long i = 0; i < len; ++i) P.col(i) = disc.point(start + i);
      sample.segment(start, len) =
          state.sample_on_set(P, nu, mix_seed(seed, 0xc4u + std::uint64_t(chunk)));
    }
  }
  sel.index = argmax_on_set(sample);
  sel.x = disc.point(sel.index);
  sel.sampled_value = sample[sel.index];
  return sel;
}

}  // namespace bogp
