#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bogp/gp.hpp"
#include "bogp/serialize.hpp"
#include "helpers.hpp"

using namespace bogp;
using bogp::testing::any_kernel;
using bogp::testing::random_state;
using bogp::testing::se;

namespace {

Vector vec1(double v) {
  Vector x(1);
  x << v;
  return x;
}

}  // namespace

TEST_CASE("prior state") {
  const GpState prior(se(), 1.0);
  const Posterior p = prior.posterior(vec1(0.37));
  CHECK(p.mean == 0.0);
  CHECK(p.stddev == 1.0);
}

TEST_CASE("single-sample closed form") {
  // probe at the sample with sigma = 1: mu = y/(1+sigma^2), var = 1 - 1/(1+sigma^2)
  const double y1 = 0.8;
  GpState s = GpState(se(), 1.0).update(vec1(0.5), y1);
  const Posterior p = s.posterior(vec1(0.5));
  CHECK(p.mean == doctest::Approx(y1 / 2.0).epsilon(1e-9));
  CHECK(p.stddev == doctest::Approx(0.70710678118654752).epsilon(1e-9));

  // a far probe recovers the prior
  const Posterior far = s.posterior(vec1(100.0));
  CHECK(far.mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(far.stddev == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("update order does not matter") {
  Rng rng(3);
  GpState a(se(0.5), 0.3);
  GpState b(se(0.5), 0.3);
  const Vector x1 = vec1(0.2), x2 = vec1(0.7);
  a = a.update(x1, 1.0).update(x2, -0.5);
  b = b.update(x2, -0.5).update(x1, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Vector probe = vec1(rng.uniform());
    const Posterior pa = a.posterior(probe);
    const Posterior pb = b.posterior(probe);
    CHECK(pa.mean == doctest::Approx(pb.mean).epsilon(1e-8));
    CHECK(pa.stddev == doctest::Approx(pb.stddev).epsilon(1e-8));
  }
}

TEST_CASE("incremental update matches from-scratch fit") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + int(rng.uniform_int(3));
    const int t = 1 + int(rng.uniform_int(50));
    const KernelSpec k = any_kernel(rng, 0.3 + rng.uniform());
    const double sigma = 0.05 + rng.uniform();
    Matrix X(d, t);
    Vector y(t);
    GpState inc(k, sigma);
    for (int i = 0; i < t; ++i) {
      X.col(i) = rng.uniform_vector(d, 0.0, 1.0);
      y[i] = std::cos(2.0 * X(0, i)) + 0.1 * rng.normal();
      inc = inc.update(X.col(i), y[i]);
    }
    const GpState batch = GpState::fit(k, sigma, X, y);
    for (int probe = 0; probe < 20; ++probe) {
      const Vector xp = rng.uniform_vector(d, 0.0, 1.0);
      const Posterior pi = inc.posterior(xp);
      const Posterior pb = batch.posterior(xp);
      REQUIRE(std::abs(pi.mean - pb.mean) < 1e-7);
      REQUIRE(std::abs(pi.stddev - pb.stddev) < 1e-7);
    }
  }
}

TEST_CASE("factor reproduces the regularized gram matrix") {
  Rng rng(9);
  const GpState s = random_state(rng, se(0.4), 0.2, 25, 2);
  const Matrix K = gram(s.kernel(), s.points());
  Matrix target = K;
  target.diagonal().array() += s.sigma() * s.sigma() + s.jitter();
  const Matrix rebuilt = s.chol() * s.chol().transpose();
  CHECK((rebuilt - target).norm() / target.norm() < 1e-8);
}

TEST_CASE("duplicate points") {
  // with sigma > 0 the matrix stays positive definite
  GpState s(se(), 0.5);
  s = s.update(vec1(0.4), 1.0).update(vec1(0.4), 1.2);
  CHECK(s.size() == 2);

  // with sigma = 0 the jitter ladder absorbs the singularity and the result
  // matches a from-scratch factorization at the same jitter
  GpState z(se(), 0.0);
  z = z.update(vec1(0.4), 1.0);
  z = z.update(vec1(0.4), 1.0);
  CHECK(z.size() == 2);
  Matrix X(1, 2);
  X << 0.4, 0.4;
  Vector y(2);
  y << 1.0, 1.0;
  GpState batch = GpState::fit(se(), 0.0, X, y);
  Rng rng(21);
  for (int i = 0; i < 5; ++i) {
    const Vector probe = vec1(rng.uniform());
    CHECK(z.posterior(probe).mean ==
          doctest::Approx(batch.posterior(probe).mean).epsilon(1e-8));
  }
}

TEST_CASE("interpolation limit at sigma = 0") {
  Rng rng(33);
  Matrix X(1, 8);
  Vector y(8);
  for (int i = 0; i < 8; ++i) {
    X(0, i) = 0.1 + 0.1 * i;
    y[i] = std::sin(5.0 * X(0, i));
  }
  const GpState s = GpState::fit(se(0.3), 0.0, X, y);
  for (int i = 0; i < 8; ++i)
    CHECK(std::abs(s.posterior(X.col(i)).mean - y[i]) < 1e-4);
}

TEST_CASE("posterior deviation shrinks as data accumulates") {
  Rng rng(41);
  std::vector<Vector> probes;
  for (int i = 0; i < 20; ++i) probes.push_back(rng.uniform_vector(2, 0.0, 1.0));
  GpState s(se(0.5), 0.2);
  std::vector<double> prev(20, 1.0);
  for (int t = 0; t < 30; ++t) {
    s = s.update(rng.uniform_vector(2, 0.0, 1.0), rng.normal());
    for (int i = 0; i < 20; ++i) {
      const double sd = s.posterior(probes[i]).stddev;
      REQUIRE(sd <= prev[i] + 1e-8);
      prev[i] = sd;
    }
  }
}

TEST_CASE("non-finite observations are rejected") {
  GpState s(se(), 0.1);
  CHECK_THROWS_AS(s.update(vec1(0.1), std::nan("")), NumericError);
  CHECK_THROWS_AS(
      s.update(vec1(0.1), std::numeric_limits<double>::infinity()), NumericError);
  s = s.update(vec1(0.1), 1.0);
  Vector bad(2);
  bad << 0.1, 0.2;
  CHECK_THROWS_AS(s.posterior(bad), std::invalid_argument);
}

TEST_CASE("noise weights: closed form and bound") {
  GpState s = GpState(se(), 1.0).update(vec1(0.5), 0.7);
  const Vector h = s.noise_weights(vec1(0.5));
  REQUIRE(h.size() == 1);
  CHECK(h[0] == doctest::Approx(0.5).epsilon(1e-9));
  const double sd = s.posterior(vec1(0.5)).stddev;
  CHECK(h.norm() <= sd / s.sigma() + 1e-8);

  // uncorrelated probe: weights vanish
  const Vector far = s.noise_weights(vec1(80.0));
  CHECK(far.norm() < 1e-12);

  GpState z(se(), 0.0);
  z = z.update(vec1(0.3), 1.0);
  CHECK_THROWS_AS(z.noise_weights(vec1(0.3)), UnsupportedError);
}

TEST_CASE("noise-weight inequality on random instances") {
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + int(rng.uniform_int(3));
    const int t = 1 + int(rng.uniform_int(30));
    const double sigma = 0.05 + rng.uniform();
    const GpState s = random_state(rng, any_kernel(rng, 0.2 + rng.uniform()),
                                   sigma, t, d);
    const Vector probe = rng.uniform_vector(d, 0.0, 1.0);
    const double lhs = s.noise_weights(probe).norm();
    const double rhs = s.posterior(probe).stddev / sigma;
    REQUIRE(lhs <= rhs + 1e-8);
  }
}

TEST_CASE("sample_on_set: scale zero is the mean") {
  Rng rng(60);
  const GpState s = random_state(rng, se(0.5), 0.3, 12, 1);
  Matrix P(1, 4);
  P << 0.1, 0.3, 0.6, 0.9;
  const Vector draw = s.sample_on_set(P, 0.0, 123);
  for (int i = 0; i < 4; ++i)
    CHECK(draw[i] == s.posterior(P.col(i)).mean);
}

TEST_CASE("sample_on_set: deterministic in the seed") {
  Rng rng(61);
  const GpState s = random_state(rng, se(0.5), 0.3, 6, 1);
  Matrix P(1, 3);
  P << 0.2, 0.5, 0.8;
  const Vector a = s.sample_on_set(P, 2.0, 99);
  const Vector b = s.sample_on_set(P, 2.0, 99);
  CHECK(a == b);
  const Vector c = s.sample_on_set(P, 2.0, 100);
  CHECK(a != c);
}

TEST_CASE("sample_on_set: prior moments over many seeds") {
  const GpState prior(se(), 1.0);
  Matrix P(1, 1);
  P << 0.5;
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = prior.sample_on_set(P, 1.0, 1000 + i)[0];
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("sample_on_set: correlated pair covariance") {
  const GpState prior(se(), 1.0);
  Matrix P(1, 2);
  P << 0.0, 0.7;  // correlation exp(-0.245)
  const double scale = 1.5;
  const Matrix target = scale * prior.posterior_cov(P);
  const int n = 100000;
  double s0 = 0, s1 = 0, s00 = 0, s11 = 0, s01 = 0;
  for (int i = 0; i < n; ++i) {
    const Vector v = prior.sample_on_set(P, scale, 5000 + i);
    s0 += v[0];
    s1 += v[1];
    s00 += v[0] * v[0];
    s11 += v[1] * v[1];
    s01 += v[0] * v[1];
  }
  const double m0 = s0 / n, m1 = s1 / n;
  CHECK(std::abs(s00 / n - m0 * m0 - target(0, 0)) < 0.02);
  CHECK(std::abs(s11 / n - m1 * m1 - target(1, 1)) < 0.02);
  CHECK(std::abs(s01 / n - m0 * m1 - target(0, 1)) < 0.02);
}

TEST_CASE("json round trip") {
  Rng rng(71);
  const GpState s = random_state(rng, se(0.4), 0.2, 9, 2);
  const GpState back = GpState::from_json(s.to_json());
  const Vector probe = rng.uniform_vector(2, 0.0, 1.0);
  CHECK(back.posterior(probe).mean ==
        doctest::Approx(s.posterior(probe).mean).epsilon(1e-12));
  CHECK(back.size() == s.size());
}
