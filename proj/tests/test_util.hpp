#pragma once

#include <Eigen/Core>
#include <complex>
#include <random>

#include "bnls/field.hpp"
#include "bnls/grid.hpp"
#include "bnls/norms.hpp"
#include "bnls/transform.hpp"

namespace bnls::test {

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline double wquad(const RadialGrid& g, const Eigen::VectorXd& f) {
  return (g.weights.array() * f.array()).sum();
}

// Smooth decaying random field: a few random Gaussian bumps in the spectrum,
// synthesized through the inverse transform. Spatially decaying and bandlimited.
inline Eigen::VectorXcd random_smooth_field(const TransformPlan& plan, std::mt19937_64& rng,
                                            bool complex_phase = true, double band_frac = 0.25) {
  const RadialGrid& g = plan.grid();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double band = band_frac * g.rhomax;
  Eigen::VectorXcd uh = Eigen::VectorXcd::Zero(g.n);
  for (int b = 0; b < 6; ++b) {
    const double c = (0.05 + 0.75 * unif(rng)) * band;
    const double w = (0.05 + 0.30 * unif(rng)) * band;
    const double amp_re = gauss(rng);
    const double amp_im = complex_phase ? gauss(rng) : 0.0;
    for (int k = 0; k < g.n; ++k) {
      const double x = (g.spectral_nodes(k) - c) / w;
      uh(k) += Cplx(amp_re, amp_im) * std::exp(-x * x);
    }
  }
  return plan.inverse(uh);
}

// Smooth radial bump compactly supported (numerically) around r0 with width w.
inline Eigen::VectorXcd bump_field(const RadialGrid& g, double r0, double w) {
  Eigen::VectorXcd f(g.n);
  for (int k = 0; k < g.n; ++k) {
    const double x = (g.nodes(k) - r0) / w;
    f(k) = std::exp(-x * x);
  }
  return f;
}

}  // namespace bnls::test
