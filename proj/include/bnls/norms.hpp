#pragma once

#include <cmath>

#include "bnls/transform.hpp"

namespace bnls {

/// Quadrature L^p norm over R^d.
inline double lp_norm(const RadialGrid& g, const Eigen::VectorXcd& u, double p) {
  return std::pow((g.weights.array() * u.array().abs().pow(p)).sum(), 1.0 / p);
}

inline double l2_norm(const RadialGrid& g, const Eigen::VectorXcd& u) {
  return std::sqrt((g.weights.array() * u.array().abs2()).sum());
}

/// ||u||_{L^2}^2 evaluated in spectrum (Plancherel side).
inline double mass_spectral(const RadialGrid& g, const Eigen::VectorXcd& uhat) {
  return (g.spectral_weights.array() * uhat.array().abs2()).sum();
}

inline double grad_l2_spectral(const RadialGrid& g, const Eigen::VectorXcd& uhat) {
  return std::sqrt(
      (g.spectral_weights.array() * g.spectral_nodes.array().square() * uhat.array().abs2())
          .sum());
}

inline double lap_l2_spectral(const RadialGrid& g, const Eigen::VectorXcd& uhat) {
  return std::sqrt((g.spectral_weights.array() * g.spectral_nodes.array().pow(4) *
                    uhat.array().abs2())
                       .sum());
}

struct Norms {
  double l2 = 0.0;
  double grad_l2 = 0.0;
  double lap_l2 = 0.0;
};

inline Norms norms(const TransformPlan& plan, const Eigen::VectorXcd& u) {
  Norms out;
  out.l2 = l2_norm(plan.grid(), u);
  Eigen::VectorXcd uh = plan.forward(u);
  out.grad_l2 = grad_l2_spectral(plan.grid(), uh);
  out.lap_l2 = lap_l2_spectral(plan.grid(), uh);
  return out;
}

}  // namespace bnls
