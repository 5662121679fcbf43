#pragma once

#include <cmath>

namespace bogp {

// Standard normal density, cdf, and the profile tau(z) = z Phi(z) + phi(z)
// that expected improvement factorizes through.  tau is positive everywhere,
// strictly increasing, and tau'(z) = Phi(z).

template <typename Scalar = double>
Scalar normal_pdf(Scalar z) {
  constexpr Scalar inv_sqrt_2pi = Scalar(0.3989422804014326779399461L);
  return inv_sqrt_2pi * std::exp(Scalar(-0.5) * z * z);
}

template <typename Scalar = double>
Scalar normal_cdf(Scalar z) {
  constexpr Scalar inv_sqrt_2 = Scalar(0.7071067811865475244008444L);
  // erfc keeps relative accuracy deep in the lower tail.
  return Scalar(0.5) * std::erfc(-z * inv_sqrt_2);
}

template <typename Scalar = double>
Scalar tau(Scalar z) {
  return z * normal_cdf(z) + normal_pdf(z);
}

}  // namespace bogp
