#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <memory>

#include "bnls/field.hpp"
#include "bnls/grid.hpp"

namespace bnls {

enum class Symbol { lap, bilap, invlap, riesz_half };

/// Dense quasi-discrete Hankel transform of order nu = d/2 - 1 on a RadialGrid,
/// plus the radial-derivative kernel (order d/2) and high-order prefix integration.
///
/// forward() maps node samples to the unitary-convention radial Fourier transform
/// at the spectral nodes; -Delta acts as the diagonal multiplier rho^2 there.
/// inverse() is the exact matrix inverse of forward(), so inverse(forward(u)) == u
/// to roundoff for every sample vector.
class TransformPlan {
 public:
  explicit TransformPlan(GridPtr grid);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  Eigen::VectorXcd forward(const Eigen::VectorXcd& u) const;
  Eigen::VectorXcd inverse(const Eigen::VectorXcd& uhat) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& u) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& uhat) const;

  /// Spectral multiplier: lap -> -rho^2, bilap -> rho^4, invlap -> 1/rho^2,
  /// riesz_half -> 1/rho. invlap and riesz_half require d >= 3.
  Field apply_symbol(const Field& u, Symbol s) const;
  Eigen::VectorXcd apply_symbol(const Eigen::VectorXcd& u, Symbol s) const;

  /// d_r u and d_r^2 u via the transform (J_{d/2} kernel for the first derivative,
  /// d_r^2 u = lap u - (d-1)/r d_r u for the second).
  Eigen::VectorXcd radial_derivative(const Eigen::VectorXcd& u, int order) const;
  Field radial_derivative(const Field& u, int order) const;

  Eigen::VectorXcd laplacian(const Eigen::VectorXcd& u) const;

  /// Interpolatory prefix integrals on the nodes: (prefix f)_k = int_0^{r_k} f dr,
  /// (tail f)_k = int_{r_k}^{rmax} f dr. Order-10 local polynomial rule.
  Eigen::VectorXcd prefix_integral(const Eigen::VectorXcd& f) const;
  Eigen::VectorXcd tail_integral(const Eigen::VectorXcd& f) const;
  Eigen::VectorXd prefix_integral(const Eigen::VectorXd& f) const;
  Eigen::VectorXd tail_integral(const Eigen::VectorXd& f) const;
  double total_integral(const Eigen::VectorXd& f) const;  // int_0^rmax f dr

  /// Value of the field at r = 0 reconstructed from its spectrum.
  Cplx eval_at_zero(const Eigen::VectorXcd& uhat) const;

  /// Field value at an arbitrary radius from its spectrum (O(n) kernel sum).
  Cplx eval_at(const Eigen::VectorXcd& uhat, double r) const;

  const Eigen::VectorXd& rho2() const { return rho2_; }
  const Eigen::VectorXd& rho4() const { return rho4_; }

 private:
  GridPtr grid_;
  Eigen::MatrixXd F_;     // forward matrix
  Eigen::MatrixXd Finv_;  // exact inverse
  Eigen::MatrixXd D1h_;   // d_r from spectrum
  Eigen::VectorXd rho2_, rho4_, invrho2_, invrho_;

  // prefix integration stencils: segment i = [edge_i, edge_{i+1}], edges = {0, nodes}
  Eigen::MatrixXd seg_coef_;  // (n+1) x (p+1)
  Eigen::VectorXi seg_start_;
  int pord_ = 10;

  Eigen::VectorXd prefix_real(const Eigen::VectorXd& f) const;
};

using PlanPtr = std::shared_ptr<const TransformPlan>;
PlanPtr make_plan(GridPtr grid);

/// Free-space (-Delta)^{-1} f for radial f (d >= 3) by direct quadrature of the
/// two-piece Newton formula, independent of the spectral path:
///   u(r) = 1/(d-2) [ r^{2-d} int_0^r f s^{d-1} ds + int_r^rmax f s ds ].
Eigen::VectorXcd newton_potential_oracle(const TransformPlan& plan, const Eigen::VectorXcd& f);
Field newton_potential_oracle(const TransformPlan& plan, const Field& f);

/// Constant by which the free-space potential of an interior-supported source
/// exceeds the Dirichlet (spectral) realization: (int f) * rmax^{2-d} / ((d-2) Omega).
double dirichlet_gauge_constant(const TransformPlan& plan, const Eigen::VectorXcd& f);

/// Free-space inverse Laplacian on the l=1 sector (radial vector profiles w(r) x/r),
/// by quadrature of the kernel G_1(r,s) = (1/d) min(r,s)/max(r,s)^{d-1}. Oracle route.
Eigen::VectorXcd green_l1_oracle(const TransformPlan& plan, const Eigen::VectorXcd& w);

/// Same operator through the shifted-order spectral route: w x/r = grad(-Psi) with
/// Psi = int_r^inf w, so G1[w] = -d_r (-Delta)^{-1} Psi (gauge constant drops out).
Eigen::VectorXcd riesz_invlap_l1(const TransformPlan& plan, const Eigen::VectorXcd& w);

/// Spectrum of the radial vector field w(r) x/r under the order-d/2 transform,
/// returned at the spectral nodes: ft(rho) = rho * hat(int_r^inf w)(rho).
Eigen::VectorXcd vector_spectrum(const TransformPlan& plan, const Eigen::VectorXcd& w);

}  // namespace bnls
