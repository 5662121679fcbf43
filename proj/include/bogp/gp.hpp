#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include <nlohmann/json_fwd.hpp>

#include "bogp/common.hpp"
#include "bogp/kernels.hpp"
#include "bogp/rng.hpp"

namespace bogp {

namespace detail {

constexpr double kJitterFloor = 1e-10;
constexpr double kJitterCeil = 1e-6;

// Lower Cholesky factor of A (overwritten in place, upper part ignored).
// Returns the index of the first non-positive pivot, or nullopt on success.
inline std::optional<Index> cholesky_in_place(Matrix& A) {
  const Index n = A.rows();
  for (Index j = 0; j < n; ++j) {
    double p = A(j, j) - A.row(j).head(j).squaredNorm();
    if (!(p > 0.0)) return j;
    p = std::sqrt(p);
    A(j, j) = p;
    if (j + 1 < n) {
      A.col(j).tail(n - j - 1) =
          (A.col(j).tail(n - j - 1) -
           A.bottomLeftCorner(n - j - 1, j) * A.row(j).head(j).transpose()) /
          p;
    }
  }
  A.triangularView<Eigen::StrictlyUpper>().setZero();
  return std::nullopt;
}

}  // namespace detail

struct Posterior {
  double mean;
  double stddev;
};

// Exact GP regressor with unit prior variance and assumed observation noise
// sigma.  The factored matrix is K_t + sigma^2 I + jitter I; jitter starts at
// 1e-10 and escalates tenfold (up to 1e-6) on pivot failure.  States are
// immutable: update() returns an extended copy, so posterior queries on one
// state may run concurrently while a single driver extends it.
class GpState {
public:
  GpState(KernelSpec kernel, double sigma)
      : kernel_(kernel), sigma_(sigma), jitter_(detail::kJitterFloor) {
    kernel_.validate();
    if (!(sigma >= 0.0)) throw ConfigError("gp sigma must be >= 0");
    X_.resize(0, 0);
    y_.resize(0);
    L_.resize(0, 0);
    w_.resize(0);
  }

  // Batch fit; the from-scratch reference path for the incremental update.
  static GpState fit(const KernelSpec& kernel, double sigma, const Matrix& X,
                     const Vector& y) {
    GpState s(kernel, sigma);
    if (X.cols() != y.size())
      throw std::invalid_argument("gp fit: points/observations length mismatch");
    if (!y.allFinite()) throw NumericError("gp fit: non-finite observation");
    s.X_ = X;
    s.y_ = y;
    if (y.size() > 0) s.refactor();
    return s;
  }

  Index size() const { return y_.size(); }
  Index dim() const { return X_.rows(); }
  const Matrix& points() const { return X_; }
  const Vector& observations() const { return y_; }
  const Matrix& chol() const { return L_; }
  double sigma() const { return sigma_; }
  double jitter() const { return jitter_; }
  const KernelSpec& kernel() const { return kernel_; }

  // (mu_t(x), sigma_t(x)); the prior (0, 1) when no samples are stored.
  Posterior posterior(const Vector& x) const {
    if (size() == 0) return {0.0, 1.0};
    check_dim(x);
    const Vector k = cross_gram(kernel_, X_, x);
    const double mean = k.dot(w_);
    const Vector v = L_.triangularView<Eigen::Lower>().solve(k);
    double var = 1.0 - v.squaredNorm();
    if (var < -1e-10)
      throw NumericError("posterior variance " + std::to_string(var) +
                         " below tolerance");
    var = std::min(1.0, std::max(0.0, var));
    return {mean, std::sqrt(var)};
  }

  // Extend with one sample via a rank-1 Cholesky border.  Escalates jitter
  // and refactors from scratch if the new pivot is not acceptable.
  GpState update(const Vector& x, double y) const {
    if (!std::isfinite(y)) throw NumericError("gp update: non-finite observation");
    GpState next(*this);
    if (size() == 0) {
      next.X_.resize(x.size(), 1);
      next.X_.col(0) = x;
      next.y_.resize(1);
      next.y_[0] = y;
      next.refactor();
      return next;
    }
    check_dim(x);
    const Index t = size();
    next.X_.conservativeResize(Eigen::NoChange, t + 1);
    next.X_.col(t) = x;
    next.y_.conservativeResize(t + 1);
    next.y_[t] = y;

    const Vector k = cross_gram(kernel_, X_, x);
    const Vector c = L_.triangularView<Eigen::Lower>().solve(k);
    const double diag = 1.0 + sigma_ * sigma_ + jitter_;
    const double p2 = diag - c.squaredNorm();
    if (p2 > 1e-14) {
      next.L_.conservativeResize(t + 1, t + 1);
      next.L_.row(t).head(t) = c.transpose();
      next.L_.col(t).head(t).setZero();
      next.L_(t, t) = std::sqrt(p2);
      next.refresh_weights();
    } else {
      next.refactor();  // escalates jitter as needed
    }
    return next;
  }

  // h_t(x) = (K_t + sigma^2 I)^{-1} k_t(x).  Defined only for sigma > 0;
  // satisfies ||h_t(x)|| <= sigma_t(x) / sigma.
  Vector noise_weights(const Vector& x) const {
    if (!(sigma_ > 0.0))
      throw UnsupportedError("noise_weights requires sigma > 0");
    if (size() < 1) throw std::invalid_argument("noise_weights: empty state");
    check_dim(x);
    const Vector k = cross_gram(kernel_, X_, x);
    const Vector v = L_.triangularView<Eigen::Lower>().solve(k);
    return L_.transpose().triangularView<Eigen::Upper>().solve(v);
  }

  // Joint posterior covariance of the columns of P.
  Matrix posterior_cov(const Matrix& P) const {
    Matrix S = gram(kernel_, P);
    if (size() == 0) return S;
    if (P.rows() != dim())
      throw std::invalid_argument("posterior_cov: dimension mismatch");
    Matrix C(size(), P.cols());
    for (Index j = 0; j < P.cols(); ++j) C.col(j) = cross_gram(kernel_, X_, P.col(j));
    const Matrix V = L_.triangularView<Eigen::Lower>().solve(C);
    S.noalias() -= V.transpose() * V;
    S = ((S + S.transpose()) * 0.5).eval();
    return S;
  }

  // One joint draw from N(mu_t(P), scale * Sigma_t(P)), deterministic in
  // the seed.  scale = 0 returns the posterior mean exactly.
  Vector sample_on_set(const Matrix& P, double scale, std::uint64_t seed) const {
    if (P.cols() < 1) throw std::invalid_argument("sample_on_set: empty point set");
    if (!(scale >= 0.0)) throw std::invalid_argument("sample_on_set: scale must be >= 0");
    Vector mean(P.cols());
    if (size() == 0) {
      mean.setZero();
    } else {
      for (Index j = 0; j < P.cols(); ++j) mean[j] = posterior(P.col(j)).mean;
    }
    if (scale == 0.0) return mean;

    Matrix S = posterior_cov(P);
    Matrix L = S;
    double j = detail::kJitterFloor;
    for (;;) {
      L = S;
      L.diagonal().array() += j;
      if (!detail::cholesky_in_place(L)) break;
      if (j >= detail::kJitterCeil) {
        auto piv = detail::cholesky_in_place(L);
        throw SingularModelError("sample covariance factorization failed",
                                 piv.value_or(0));
      }
      j *= 10.0;
    }
    Rng rng(seed);
    const Vector z = rng.normal_vector(P.cols());
    const Vector colored = L.triangularView<Eigen::Lower>() * z;
    return mean + std::sqrt(scale) * colored;
  }

  nlohmann::json to_json() const;
  static GpState from_json(const nlohmann::json& j);

private:
  void check_dim(const Vector& x) const {
    if (x.size() != dim())
      throw std::invalid_argument("gp: probe dimension mismatch");
  }

  // Factor K + sigma^2 I + jitter I from scratch, walking the jitter ladder
  // until the factorization succeeds.
  void refactor() {
    const Index t = y_.size();
    const Matrix K = gram(kernel_, X_);
    for (;;) {
      Matrix A = K;
      A.diagonal().array() += sigma_ * sigma_ + jitter_;
      auto piv = detail::cholesky_in_place(A);
      if (!piv) {
        L_ = std::move(A);
        refresh_weights();
        return;
      }
      if (jitter_ >= detail::kJitterCeil)
        throw SingularModelError("gp factorization failed after jitter escalation",
                                 *piv);
      jitter_ *= 10.0;
    }
    (void)t;
  }

  void refresh_weights() {
    w_ = L_.triangularView<Eigen::Lower>().solve(y_);
    w_ = L_.transpose().triangularView<Eigen::Upper>().solve(w_).eval();
  }

  KernelSpec kernel_;
  double sigma_;
  double jitter_;
  Matrix X_;  // d x t, columns are sample locations
  Vector y_;
  Matrix L_;  // lower factor of K + sigma^2 I + jitter I
  Vector w_;  // (K + sigma^2 I + jitter I)^{-1} y
};

}  // namespace bogp
