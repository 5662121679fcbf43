#pragma once

#include <cstdint>
#include <cmath>
#include <random>

#include "bogp/common.hpp"

namespace bogp {

// splitmix64: cheap, well-mixed mapping used to derive independent stream
// seeds from (master seed, tag) pairs.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream.  Distributions are implemented explicitly
// (std:: distributions are not bit-stable across standard libraries).  The
// seed is remixed first; raw sequential seeds leave mt19937_64 poorly
// initialized and visibly correlate the first draws across streams.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(mix_seed(seed, 0xa5a5a5a5ULL)) {}

  std::uint64_t raw() { return gen_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  std::uint64_t uniform_int(std::uint64_t n) {
    // modulo bias is < 2^-53 for any n this project uses
    return gen_() % n;
  }

  // Box-Muller with a cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so the log is finite
    double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * M_PI * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

  Vector normal_vector(Index n) {
    Vector z(n);
    for (Index i = 0; i < n; ++i) z[i] = normal();
    return z;
  }

  Vector uniform_vector(Index n, double lo, double hi) {
    Vector x(n);
    for (Index i = 0; i < n; ++i) x[i] = uniform(lo, hi);
    return x;
  }

private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bogp
