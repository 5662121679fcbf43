#pragma once

#include <nlohmann/json.hpp>

#include "bogp/gp.hpp"
#include "bogp/objectives.hpp"

namespace bogp {

inline nlohmann::json to_json(const KernelSpec& k) {
  return {{"family", to_string(k.family)}, {"lengthscale", k.lengthscale}};
}

inline KernelSpec kernel_from_json(const nlohmann::json& j) {
  KernelSpec k;
  k.family = kernel_family_from_string(j.at("family").get<std::string>());
  k.lengthscale = j.at("lengthscale").get<double>();
  k.validate();
  return k;
}

inline nlohmann::json to_json(const BoxDomain& d) {
  return {{"d", d.d}, {"r", d.r}, {"lipschitz", d.lipschitz}};
}

inline BoxDomain domain_from_json(const nlohmann::json& j) {
  BoxDomain d;
  d.d = j.at("d").get<int>();
  d.r = j.at("r").get<double>();
  d.lipschitz = j.value("lipschitz", 1.0);
  d.validate();
  return d;
}

inline nlohmann::json to_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Vector vector_from_json(const nlohmann::json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

inline nlohmann::json to_json(const Matrix& m) {
  nlohmann::json cols = nlohmann::json::array();
  for (Index c = 0; c < m.cols(); ++c) cols.push_back(to_json(Vector(m.col(c))));
  return cols;
}

inline Matrix matrix_from_json(const nlohmann::json& j, Index rows) {
  Matrix m(rows, static_cast<Index>(j.size()));
  for (Index c = 0; c < m.cols(); ++c)
    m.col(c) = vector_from_json(j[static_cast<std::size_t>(c)]);
  return m;
}

inline nlohmann::json GpState::to_json() const {
  return {{"kernel", bogp::to_json(kernel_)},
          {"sigma", sigma_},
          {"points", bogp::to_json(X_)},
          {"observations", bogp::to_json(y_)}};
}

inline GpState GpState::from_json(const nlohmann::json& j) {
  const KernelSpec k = kernel_from_json(j.at("kernel"));
  const double sigma = j.at("sigma").get<double>();
  const auto pts = j.at("points");
  if (pts.empty()) return GpState(k, sigma);
  const Index d = static_cast<Index>(pts[0].size());
  return GpState::fit(k, sigma, matrix_from_json(pts, d),
                      vector_from_json(j.at("observations")));
}

inline nlohmann::json RkhsFunction::to_json() const {
  return {{"kind", "rkhs"},
          {"kernel", bogp::to_json(kernel_)},
          {"centers", bogp::to_json(centers_)},
          {"coeffs", bogp::to_json(coeffs_)},
          {"norm", norm()},
          {"lipschitz_est", lipschitz_est_}};
}

inline RkhsFunction RkhsFunction::from_json(const nlohmann::json& j) {
  const KernelSpec k = kernel_from_json(j.at("kernel"));
  const auto ctr = j.at("centers");
  if (ctr.empty()) throw ConfigError("rkhs json: no centers");
  const Index d = static_cast<Index>(ctr[0].size());
  RkhsFunction f(k, matrix_from_json(ctr, d), vector_from_json(j.at("coeffs")));
  f.set_lipschitz_estimate(j.value("lipschitz_est", 0.0));
  return f;
}

inline nlohmann::json GpPriorFunction::to_json() const {
  return {{"kind", "gp"},
          {"kernel", bogp::to_json(kernel_)},
          {"domain", bogp::to_json(domain_)},
          {"axis_points", axis_points_},
          {"values", bogp::to_json(values_)}};
}

inline GpPriorFunction GpPriorFunction::from_json(const nlohmann::json& j) {
  return GpPriorFunction(kernel_from_json(j.at("kernel")),
                         domain_from_json(j.at("domain")),
                         j.at("axis_points").get<long>(),
                         vector_from_json(j.at("values")));
}

}  // namespace bogp
