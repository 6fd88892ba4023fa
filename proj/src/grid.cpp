#include "bnls/grid.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace bnls {

double unit_sphere_area(int d) {
  return 2.0 * std::pow(M_PI, d / 2.0) / boost::math::tgamma(d / 2.0);
}

double RadialGrid::ball_volume() const {
  return unit_sphere_area(d) * std::pow(rmax, d) / d;
}

namespace {

// Fourier-Bessel weights for int_0^L h(x) x dx at nodes j_k * L / S, corrected on the
// last K nodes so that monomials x^{2nu+2m}, m = 0..M, integrate exactly.
Eigen::VectorXd corrected_weights_1d(double nu, const Eigen::VectorXd& x, double L,
                                     const Eigen::VectorXd& Jp1, double band) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd w = 2.0 / (band * band * Jp1.array().square());

  const int M = 3;
  const int K = std::min(12, n / 2);
  Eigen::MatrixXd A(M + 1, K);
  Eigen::VectorXd e(M + 1);
  for (int m = 0; m <= M; ++m) {
    Eigen::ArrayXd hm = (x.array() / L).pow(2.0 * nu + 2.0 * m);
    e(m) = L * L / (2.0 * nu + 2.0 * m + 2.0) - (w.array() * hm).sum();
    A.row(m) = hm.segment(n - K, K);
  }
  // minimal-norm correction on the boundary nodes
  Eigen::VectorXd delta =
      A.transpose() * (A * A.transpose()).ldlt().solve(e);
  w.segment(n - K, K) += delta;
  return w;
}

}  // namespace

GridPtr make_grid(int d, double rmax, int n) {
  if (d < 2) throw std::invalid_argument("make_grid: d must be >= 2");
  if (!(rmax > 0.0)) throw std::invalid_argument("make_grid: rmax must be > 0");
  if (n < 16) throw std::invalid_argument("make_grid: n must be >= 16");

  auto g = std::make_shared<RadialGrid>();
  g->d = d;
  g->n = n;
  g->rmax = rmax;
  g->nu = d / 2.0 - 1.0;

  g->zeros.resize(n);
  for (int k = 0; k < n; ++k) g->zeros(k) = boost::math::cyl_bessel_j_zero(g->nu, k + 1);
  g->S = boost::math::cyl_bessel_j_zero(g->nu, n + 1);
  g->rhomax = g->S / rmax;

  g->nodes = g->zeros * (rmax / g->S);
  g->spectral_nodes = g->zeros / rmax;
  g->Jp1.resize(n);
  for (int k = 0; k < n; ++k)
    g->Jp1(k) = std::abs(boost::math::cyl_bessel_j(g->nu + 1.0, g->zeros(k)));

  g->w1r = corrected_weights_1d(g->nu, g->nodes, rmax, g->Jp1, g->rhomax);
  g->w1s = corrected_weights_1d(g->nu, g->spectral_nodes, g->rhomax, g->Jp1, rmax);

  const double om = unit_sphere_area(d);
  g->weights = om * g->nodes.array().pow(d - 2) * g->w1r.array();
  g->spectral_weights = om * g->spectral_nodes.array().pow(d - 2) * g->w1s.array();

  if ((g->weights.array() <= 0.0).any() || (g->spectral_weights.array() <= 0.0).any())
    throw std::runtime_error("make_grid: non-positive quadrature weight");
  return g;
}

}  // namespace bnls
