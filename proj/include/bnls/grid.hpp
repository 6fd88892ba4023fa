#pragma once

#include <Eigen/Core>
#include <memory>

namespace bnls {

/// Radial collocation grid at scaled Bessel-function zeros of order nu = d/2 - 1,
/// with positive quadrature weights for int_{R^d} f = Omega_{d-1} int f(r) r^{d-1} dr.
///
/// The weights are the Fourier-Bessel quadrature weights plus a boundary-localized
/// moment correction that makes the rule exact on f = r^{2m}, m = 0..3 (in particular
/// on f == 1, so the weight sum reproduces the ball volume to machine precision).
struct RadialGrid {
  int d = 0;
  int n = 0;
  double rmax = 0.0;
  double nu = 0.0;      // d/2 - 1
  double S = 0.0;       // (n+1)-th zero of J_nu: bandwidth product rmax * rhomax
  double rhomax = 0.0;  // S / rmax

  Eigen::VectorXd nodes;             // r_k = j_k * rmax / S, strictly increasing, in (0, rmax)
  Eigen::VectorXd weights;           // d-dim quadrature weights (Omega included)
  Eigen::VectorXd spectral_nodes;    // rho_k = j_k / rmax
  Eigen::VectorXd spectral_weights;  // d-dim spectral-side weights

  // internals shared with TransformPlan
  Eigen::VectorXd zeros;  // j_{nu,1..n}
  Eigen::VectorXd Jp1;    // |J_{nu+1}(j_k)|
  Eigen::VectorXd w1r;    // 1-D weights for int h(r) r dr on nodes
  Eigen::VectorXd w1s;    // 1-D weights for int h(rho) rho drho on spectral nodes

  double ball_volume() const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Surface measure of the unit sphere S^{d-1}.
double unit_sphere_area(int d);

/// rmax > 0, n >= 16.
GridPtr make_grid(int d, double rmax, int n);

}  // namespace bnls
