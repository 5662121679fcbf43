#pragma once

#include <cmath>
#include <string>

#include "bogp/common.hpp"

namespace bogp {

enum class KernelFamily { squared_exponential, matern12, matern32, matern52 };

inline std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::squared_exponential: return "se";
    case KernelFamily::matern12: return "matern12";
    case KernelFamily::matern32: return "matern32";
    case KernelFamily::matern52: return "matern52";
  }
  return "?";
}

inline KernelFamily kernel_family_from_string(const std::string& s) {
  if (s == "se") return KernelFamily::squared_exponential;
  if (s == "matern12") return KernelFamily::matern12;
  if (s == "matern32") return KernelFamily::matern32;
  if (s == "matern52") return KernelFamily::matern52;
  throw ConfigError("kernel.family: unknown value '" + s + "'");
}

// Unit-variance stationary correlation as a function of the 2-norm distance.
// All four families satisfy k(0) = 1 and 0 < k(r) <= 1, non-increasing in r.
template <typename Scalar>
Scalar kernel_profile(KernelFamily family, Scalar dist, Scalar lengthscale) {
  const Scalar q = dist / lengthscale;
  switch (family) {
    case KernelFamily::squared_exponential:
      return std::exp(Scalar(-0.5) * q * q);
    case KernelFamily::matern12:
      return std::exp(-q);
    case KernelFamily::matern32: {
      const Scalar a = Scalar(1.7320508075688772935274463L) * q;  // sqrt(3) q
      return (Scalar(1) + a) * std::exp(-a);
    }
    case KernelFamily::matern52: {
      const Scalar a = Scalar(2.2360679774997896964091737L) * q;  // sqrt(5) q
      return (Scalar(1) + a + a * a / Scalar(3)) * std::exp(-a);
    }
  }
  return Scalar(0);
}

// Kernel family plus its single isotropic lengthscale.  Immutable value;
// evaluation is pure and thread-safe.
struct KernelSpec {
  KernelFamily family = KernelFamily::squared_exponential;
  double lengthscale = 1.0;

  void validate() const {
    if (!(lengthscale > 0.0))
      throw ConfigError("kernel.lengthscale must be positive");
  }
};

inline double evaluate(const KernelSpec& spec, const Vector& x, const Vector& y) {
  spec.validate();
  if (x.size() < 1 || x.size() != y.size())
    throw std::invalid_argument("kernel evaluate: dimension mismatch");
  if (x == y) return 1.0;
  return kernel_profile(spec.family, (x - y).norm(), spec.lengthscale);
}

// Gram matrix of the given points (columns of X).  Each unordered pair is
// evaluated once and mirrored, so the result is symmetric bit-exactly and
// has a unit diagonal.
inline Matrix gram(const KernelSpec& spec, const Matrix& X) {
  spec.validate();
  const Index t = X.cols();
  if (t < 1) throw std::invalid_argument("gram: empty point list");
  Matrix K(t, t);
  for (Index j = 0; j < t; ++j) {
    K(j, j) = 1.0;
    for (Index i = j + 1; i < t; ++i) {
      const double v = kernel_profile(spec.family, (X.col(i) - X.col(j)).norm(),
                                      spec.lengthscale);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

// k_t(x): covariances between each column of X and the probe x.
inline Vector cross_gram(const KernelSpec& spec, const Matrix& X, const Vector& x) {
  spec.validate();
  if (X.rows() != x.size())
    throw std::invalid_argument("cross_gram: dimension mismatch");
  Vector k(X.cols());
  for (Index i = 0; i < X.cols(); ++i)
    k[i] = kernel_profile(spec.family, (X.col(i) - x).norm(), spec.lengthscale);
  return k;
}

}  // namespace bogp
