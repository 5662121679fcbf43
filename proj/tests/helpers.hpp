#pragma once

#include "bogp/gp.hpp"
#include "bogp/kernels.hpp"
#include "bogp/rng.hpp"

namespace bogp::testing {

inline KernelSpec se(double lengthscale = 1.0) {
  return {KernelFamily::squared_exponential, lengthscale};
}

// Random history of t samples of a smooth function plus noise; the workhorse
// state generator for randomized GP checks.
inline GpState random_state(Rng& rng, const KernelSpec& kernel, double sigma,
                            int t, int d, double r = 1.0) {
  Matrix X(d, t);
  Vector y(t);
  for (int i = 0; i < t; ++i) {
    X.col(i) = rng.uniform_vector(d, 0.0, r);
    y[i] = std::sin(3.0 * X(0, i)) + 0.3 * rng.normal();
  }
  return GpState::fit(kernel, sigma, X, y);
}

inline KernelSpec any_kernel(Rng& rng, double lengthscale) {
  static const KernelFamily fams[] = {
      KernelFamily::squared_exponential, KernelFamily::matern12,
      KernelFamily::matern32, KernelFamily::matern52};
  return {fams[rng.uniform_int(4)], lengthscale};
}

}  // namespace bogp::testing
