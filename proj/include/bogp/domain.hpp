#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bogp/common.hpp"
#include "bogp/rng.hpp"

namespace bogp {

// Box [0, r]^d together with the Lipschitz constant of the objective on it.
struct BoxDomain {
  int d = 1;
  double r = 1.0;
  double lipschitz = 1.0;

  void validate() const {
    if (d < 1) throw ConfigError("domain.d must be >= 1");
    if (!(r > 0.0)) throw ConfigError("domain.r must be positive");
    if (!(lipschitz > 0.0)) throw ConfigError("lipschitz must be positive");
  }

  bool contains(const Vector& x, double tol = 1e-12) const {
    if (x.size() != d) return false;
    return (x.array() >= -tol).all() && (x.array() <= r + tol).all();
  }

  Vector clip(Vector x) const {
    return x.cwiseMax(0.0).cwiseMin(r);
  }
};

inline double cover_radius(const BoxDomain& domain, int t) {
  return 1.0 / (domain.lipschitz * double(t) * double(t));
}

// Regular lattice covering the box: every x in the box is within h_t of a
// lattice point (in 2-norm) as long as the cap was not hit.  Axis spacing
// 2 h_t / sqrt(d) makes the cell half-diagonal equal to h_t.  Coordinates are
// x_j = min(i * spacing, r); points are indexed lexicographically by
// multi-index with axis 0 most significant.
class Discretization {
public:
  Discretization(const BoxDomain& domain, int t, long cap)
      : domain_(domain), t_(t) {
    domain.validate();
    if (t < 1) throw std::invalid_argument("discretization: t must be >= 1");
    const double min_cap = std::pow(2.0, domain.d);
    if (static_cast<double>(cap) < min_cap)
      throw ConfigError("grid.cap must be at least 2^d");
    h_ = bogp::cover_radius(domain, t);
    spacing_ = std::min(2.0 * h_ / std::sqrt(double(domain.d)), domain.r);
    axis_points_ = static_cast<long>(std::ceil(domain.r / spacing_)) + 1;
    if (std::pow(double(axis_points_), domain.d) > static_cast<double>(cap)) {
      axis_points_ = std::max<long>(
          2, static_cast<long>(std::floor(std::pow(double(cap), 1.0 / domain.d))));
      spacing_ = domain.r / double(axis_points_ - 1);
      capped_ = true;
    }
  }

  const BoxDomain& domain() const { return domain_; }
  int t() const { return t_; }
  double cover_radius() const { return h_; }
  double spacing() const { return spacing_; }
  long axis_points() const { return axis_points_; }
  bool capped() const { return capped_; }

  long size() const {
    long n = 1;
    for (int j = 0; j < domain_.d; ++j) n *= axis_points_;
    return n;
  }

  double coordinate(long i) const {
    return std::min(double(i) * spacing_, domain_.r);
  }

  Vector point(long flat) const {
    Vector x(domain_.d);
    for (int j = domain_.d - 1; j >= 0; --j) {
      x[j] = coordinate(flat % axis_points_);
      flat /= axis_points_;
    }
    return x;
  }

  Matrix all_points() const {
    const long n = size();
    Matrix P(domain_.d, n);
    for (long i = 0; i < n; ++i) P.col(i) = point(i);
    return P;
  }

private:
  BoxDomain domain_;
  int t_;
  double h_;
  double spacing_;
  long axis_points_;
  bool capped_ = false;
};

// Nearest lattice point in 2-norm.  The distance is separable, so the
// lexicographically-smallest tie rule reduces to rounding half-down per axis.
inline Vector closest(const Discretization& disc, const Vector& x) {
  const BoxDomain& dom = disc.domain();
  if (x.size() != dom.d || !dom.contains(x))
    throw std::invalid_argument("closest: point outside the box");
  Vector out(dom.d);
  const long last = disc.axis_points() - 1;
  for (int j = 0; j < dom.d; ++j) {
    const double q = x[j] / disc.spacing();
    long best = -1;
    double best_dist = 0.0;
    for (long cand : {static_cast<long>(std::floor(q)),
                      static_cast<long>(std::ceil(q)), last}) {
      if (cand < 0 || cand > last) continue;
      const double dist = std::abs(x[j] - disc.coordinate(cand));
      if (best < 0 || dist < best_dist || (dist == best_dist && cand < best)) {
        best = cand;
        best_dist = dist;
      }
    }
    out[j] = disc.coordinate(best);
  }
  return out;
}

struct MaximizerResult {
  Vector x;
  double value;
};

// Multistart coordinate pattern search with a halving step.  Derivative-free
// on purpose: acquisition surfaces are nonsmooth where the posterior
// deviation vanishes.  Deterministic in the seed; ties keep the earlier
// candidate, so a constant surface returns the first random start.
template <typename Acq>
MaximizerResult maximize_acquisition(Acq&& acq, const BoxDomain& domain,
                                     int restarts, int local_steps,
                                     std::uint64_t seed) {
  domain.validate();
  if (restarts < 1) throw ConfigError("opt.restarts must be >= 1");
  if (local_steps < 0) throw ConfigError("opt.local_steps must be >= 0");
  Rng rng(seed);

  auto eval = [&](const Vector& x) {
    const double v = acq(x);
    if (std::isnan(v)) {
      std::string where = "[";
      for (Index j = 0; j < x.size(); ++j)
        where += (j ? ";" : "") + std::to_string(x[j]);
      throw NumericError("acquisition returned NaN at " + where + "]");
    }
    return v;
  };

  MaximizerResult best{Vector(), 0.0};
  bool have_best = false;
  for (int s = 0; s < restarts; ++s) {
    Vector x = rng.uniform_vector(domain.d, 0.0, domain.r);
    double v = eval(x);
    double step = domain.r / 4.0;
    for (int it = 0; it < local_steps && step > 1e-12; ++it) {
      bool improved = false;
      for (int j = 0; j < domain.d; ++j) {
        for (double dir : {1.0, -1.0}) {
          Vector cand = x;
          cand[j] = std::min(domain.r, std::max(0.0, cand[j] + dir * step));
          const double cv = eval(cand);
          if (cv > v) {
            x = std::move(cand);
            v = cv;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (!have_best || v > best.value) {
      best = {std::move(x), v};
      have_best = true;
    }
  }
  return best;
}

}  // namespace bogp
