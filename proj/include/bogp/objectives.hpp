#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bogp/common.hpp"
#include "bogp/domain.hpp"
#include "bogp/gp.hpp"
#include "bogp/kernels.hpp"
#include "bogp/rng.hpp"

namespace bogp {

// A deterministic objective on a box, with whatever ground truth is known
// about it.  f_star is the minimum (the engine minimizes internally).
struct Objective {
  std::string name;
  std::function<double(const Vector&)> f;
  double lipschitz = 0.0;
  double f_star = std::numeric_limits<double>::quiet_NaN();
  std::vector<Vector> minimizers;
  bool f_star_exact = false;
};

// max(f, 0); inherits the Lipschitz constant of f.
inline std::function<double(const Vector&)> clip_positive(
    std::function<double(const Vector&)> f) {
  return [f = std::move(f)](const Vector& x) { return std::max(f(x), 0.0); };
}

namespace detail {

// Max finite-difference gradient norm over random probes, times a safety
// factor.  An estimate, not a certificate.
inline double estimate_lipschitz(const std::function<double(const Vector&)>& f,
                                 const BoxDomain& domain, std::uint64_t seed,
                                 int probes = 512, double safety = 1.25) {
  Rng rng(mix_seed(seed, 0x11b5));
  const double h = 1e-5 * domain.r;
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    Vector x = rng.uniform_vector(domain.d, 0.0, domain.r);
    double g2 = 0.0;
    for (int j = 0; j < domain.d; ++j) {
      Vector lo = x, hi = x;
      lo[j] = std::max(0.0, x[j] - h);
      hi[j] = std::min(domain.r, x[j] + h);
      const double g = (f(hi) - f(lo)) / (hi[j] - lo[j]);
      g2 += g * g;
    }
    worst = std::max(worst, std::sqrt(g2));
  }
  return safety * worst;
}

// Coarse lattice scan followed by pattern-search refinement of the best
// cells.  Good enough at d <= 3 for the synthetic objectives used here.
inline std::pair<double, Vector> numeric_minimum(
    const std::function<double(const Vector&)>& f, const BoxDomain& domain,
    std::uint64_t seed) {
  const int axis = domain.d == 1 ? 1025 : (domain.d == 2 ? 65 : 17);
  long total = 1;
  for (int j = 0; j < domain.d; ++j) total *= axis;
  double best = std::numeric_limits<double>::infinity();
  Vector best_x = Vector::Zero(domain.d);
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    Vector x(domain.d);
    for (int j = domain.d - 1; j >= 0; --j) {
      x[j] = domain.r * double(rem % axis) / double(axis - 1);
      rem /= axis;
    }
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  auto res = maximize_acquisition([&](const Vector& x) { return -f(x); }, domain,
                                  8, 60, mix_seed(seed, 0x5ca9));
  if (-res.value < best) {
    best = -res.value;
    best_x = res.x;
  }
  // polish the scan winner too
  Vector x = best_x;
  double step = domain.r / double(axis - 1);
  for (int it = 0; it < 60 && step > 1e-13; ++it) {
    bool improved = false;
    for (int j = 0; j < domain.d; ++j) {
      for (double dir : {1.0, -1.0}) {
        Vector cand = x;
        cand[j] = std::min(domain.r, std::max(0.0, cand[j] + dir * step));
        const double cv = f(cand);
        if (cv < best) {
          best = cv;
          x = cand;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {best, x};
}

}  // namespace detail

// f(x) = sum_i a_i k(c_i, x), with the coefficients rescaled so that the
// native-space norm sqrt(a^T K a) equals the requested bound exactly.
class RkhsFunction {
public:
  RkhsFunction(KernelSpec kernel, Matrix centers, Vector coeffs)
      : kernel_(kernel), centers_(std::move(centers)), coeffs_(std::move(coeffs)) {
    if (centers_.cols() != coeffs_.size())
      throw std::invalid_argument("rkhs: centers/coeffs mismatch");
  }

  double evaluate(const Vector& x) const {
    return cross_gram(kernel_, centers_, x).dot(coeffs_);
  }

  double norm() const {
    const Matrix K = gram(kernel_, centers_);
    return std::sqrt(coeffs_.dot(K * coeffs_));
  }

  const KernelSpec& kernel() const { return kernel_; }
  const Matrix& centers() const { return centers_; }
  const Vector& coeffs() const { return coeffs_; }
  double lipschitz_estimate() const { return lipschitz_est_; }
  void set_lipschitz_estimate(double v) { lipschitz_est_ = v; }

  Objective objective(const BoxDomain& domain, std::uint64_t seed = 1) const {
    Objective obj;
    obj.name = "rkhs";
    obj.f = [*this](const Vector& x) { return evaluate(x); };
    obj.lipschitz = lipschitz_est_;
    auto [fmin, xmin] = detail::numeric_minimum(obj.f, domain, seed);
    obj.f_star = fmin;
    obj.minimizers = {xmin};
    obj.f_star_exact = false;  // numeric optimum
    return obj;
  }

  nlohmann::json to_json() const;
  static RkhsFunction from_json(const nlohmann::json& j);

private:
  KernelSpec kernel_;
  Matrix centers_;
  Vector coeffs_;
  double lipschitz_est_ = 0.0;
};

inline RkhsFunction make_rkhs(const KernelSpec& kernel, const BoxDomain& domain,
                              int m, double B, std::uint64_t seed) {
  kernel.validate();
  domain.validate();
  if (m < 1) throw std::invalid_argument("make_rkhs: m must be >= 1");
  if (!(B >= 1.0)) throw std::invalid_argument("make_rkhs: B must be >= 1");
  for (int attempt = 0; attempt < 8; ++attempt) {
    Rng rng(mix_seed(seed, 0xf00d + std::uint64_t(attempt)));
    Matrix centers(domain.d, m);
    for (int i = 0; i < m; ++i)
      centers.col(i) = rng.uniform_vector(domain.d, 0.0, domain.r);
    Vector coeffs = rng.normal_vector(m);
    const Matrix K = gram(kernel, centers);
    const double q = coeffs.dot(K * coeffs);
    if (!(q > 1e-12)) continue;  // resample degenerate draws
    coeffs *= B / std::sqrt(q);
    RkhsFunction f(kernel, std::move(centers), std::move(coeffs));
    f.set_lipschitz_estimate(detail::estimate_lipschitz(
        [&f](const Vector& x) { return f.evaluate(x); }, domain, seed));
    return f;
  }
  throw NumericError("make_rkhs: could not draw a non-degenerate coefficient vector");
}

// A joint prior draw on a regular lattice, extended to the box by
// multilinear interpolation.  Only the lattice values are an exact draw.
class GpPriorFunction {
public:
  GpPriorFunction(KernelSpec kernel, BoxDomain domain, long axis_points,
                  Vector values)
      : kernel_(kernel), domain_(domain), axis_points_(axis_points),
        values_(std::move(values)) {
    if (axis_points_ < 2) throw std::invalid_argument("gp prior: axis_points must be >= 2");
    long total = 1;
    for (int j = 0; j < domain_.d; ++j) total *= axis_points_;
    if (values_.size() != total)
      throw std::invalid_argument("gp prior: lattice size mismatch");
  }

  double spacing() const { return domain_.r / double(axis_points_ - 1); }
  long axis_points() const { return axis_points_; }
  const Vector& values() const { return values_; }
  const BoxDomain& domain() const { return domain_; }
  const KernelSpec& kernel() const { return kernel_; }

  Vector lattice_point(long flat) const {
    Vector x(domain_.d);
    for (int j = domain_.d - 1; j >= 0; --j) {
      x[j] = spacing() * double(flat % axis_points_);
      flat /= axis_points_;
    }
    return x;
  }

  Matrix lattice() const {
    Matrix P(domain_.d, values_.size());
    for (long i = 0; i < values_.size(); ++i) P.col(i) = lattice_point(i);
    return P;
  }

  double evaluate(const Vector& x) const {
    if (x.size() != domain_.d)
      throw std::invalid_argument("gp prior: dimension mismatch");
    const double s = spacing();
    std::vector<long> base(domain_.d);
    std::vector<double> frac(domain_.d);
    for (int j = 0; j < domain_.d; ++j) {
      const double u = std::min(std::max(x[j], 0.0), domain_.r) / s;
      long i0 = static_cast<long>(std::floor(u));
      i0 = std::min(i0, axis_points_ - 2);
      base[j] = i0;
      frac[j] = u - double(i0);
    }
    double acc = 0.0;
    const long corners = 1L << domain_.d;
    for (long mask = 0; mask < corners; ++mask) {
      double wgt = 1.0;
      long flat = 0;
      for (int j = 0; j < domain_.d; ++j) {
        const int hi = (mask >> j) & 1;
        wgt *= hi ? frac[j] : (1.0 - frac[j]);
        flat = flat * axis_points_ + (base[j] + hi);
      }
      acc += wgt * values_[flat];
    }
    return acc;
  }

  Objective objective(std::uint64_t seed = 1) const {
    Objective obj;
    obj.name = "gp_prior";
    obj.f = [*this](const Vector& x) { return evaluate(x); };
    obj.lipschitz = detail::estimate_lipschitz(obj.f, domain_, seed);
    // interpolation takes convex combinations, so the lattice minimum is the
    // global minimum
    long best = 0;
    for (long i = 1; i < values_.size(); ++i)
      if (values_[i] < values_[best]) best = i;
    obj.f_star = values_[best];
    obj.minimizers = {lattice_point(best)};
    obj.f_star_exact = true;
    return obj;
  }

  nlohmann::json to_json() const;
  static GpPriorFunction from_json(const nlohmann::json& j);

private:
  KernelSpec kernel_;
  BoxDomain domain_;
  long axis_points_;
  Vector values_;
};

inline GpPriorFunction make_gp_prior(const KernelSpec& kernel, const BoxDomain& domain,
                                     long axis_points, std::uint64_t seed) {
  domain.validate();
  GpPriorFunction proto(kernel, domain, axis_points,
                        Vector::Zero(static_cast<long>(
                            std::llround(std::pow(double(axis_points), domain.d)))));
  const GpState prior(kernel, 0.0);
  Vector values = prior.sample_on_set(proto.lattice(), 1.0, mix_seed(seed, 0x6a77));
  return GpPriorFunction(kernel, domain, axis_points, std::move(values));
}

// --- fixed benchmarks --------------------------------------------------------

inline Objective benchmark(const std::string& name, const BoxDomain& domain) {
  domain.validate();
  Objective obj;
  obj.name = name;
  if (name == "quadratic_bowl") {
    const Vector c = Vector::Constant(domain.d, domain.r / 2.0);
    obj.f = [c](const Vector& x) { return (x - c).squaredNorm(); };
    obj.lipschitz = domain.r * std::sqrt(double(domain.d));
    obj.f_star = 0.0;
    obj.minimizers = {c};
    obj.f_star_exact = true;
  } else if (name == "sinusoid_1d") {
    if (domain.d != 1) throw ConfigError("sinusoid_1d requires domain.d = 1");
    const double r = domain.r;
    obj.f = [r](const Vector& x) { return std::sin(3.0 * M_PI * x[0] / r); };
    obj.lipschitz = 3.0 * M_PI / r;
    obj.f_star = -1.0;
    obj.minimizers = {Vector::Constant(1, r / 2.0)};
    obj.f_star_exact = true;
  } else if (name == "branin_scaled") {
    if (domain.d != 2) throw ConfigError("branin_scaled requires domain.d = 2");
    const double r = domain.r;
    auto eval = [r](const Vector& x) {
      const double u = -5.0 + 15.0 * x[0] / r;
      const double v = 15.0 * x[1] / r;
      const double b = 5.1 / (4.0 * M_PI * M_PI);
      const double c = 5.0 / M_PI;
      const double t = 1.0 / (8.0 * M_PI);
      const double w = v - b * u * u + c * u - 6.0;
      return w * w + 10.0 * (1.0 - t) * std::cos(u) + 10.0;
    };
    obj.f = eval;
    // sup of the analytic gradient norm over a dense grid
    double worst = 0.0;
    const int n = 401;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double u = -5.0 + 15.0 * double(i) / double(n - 1);
        const double v = 15.0 * double(j) / double(n - 1);
        const double b = 5.1 / (4.0 * M_PI * M_PI);
        const double c = 5.0 / M_PI;
        const double t = 1.0 / (8.0 * M_PI);
        const double w = v - b * u * u + c * u - 6.0;
        const double du = 2.0 * w * (-2.0 * b * u + c) - 10.0 * (1.0 - t) * std::sin(u);
        const double dv = 2.0 * w;
        worst = std::max(worst, std::hypot(du, dv));
      }
    }
    obj.lipschitz = worst * 15.0 / r;
    obj.f_star = 0.39788735772973816;
    const double s = r / 15.0;
    obj.minimizers = {
        (Vector(2) << (-M_PI + 5.0) * s, 12.275 * s).finished(),
        (Vector(2) << (M_PI + 5.0) * s, 2.275 * s).finished(),
        (Vector(2) << (9.42478 + 5.0) * s, 2.475 * s).finished()};
    obj.f_star_exact = false;  // published optimum, verified numerically
  } else {
    throw ConfigError("objective.name: unknown benchmark '" + name + "'");
  }
  return obj;
}

}  // namespace bogp
