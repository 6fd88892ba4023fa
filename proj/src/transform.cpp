#include "bnls/transform.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace bnls {

namespace {

Eigen::VectorXcd apply_real(const Eigen::MatrixXd& M, const Eigen::VectorXcd& v) {
  Eigen::VectorXd re = M * v.real();
  Eigen::VectorXd im = M * v.imag();
  Eigen::VectorXcd out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

// Gauss-Legendre nodes/weights on [-1,1]: golub-welsch via Eigen
void gauss_legendre(int m, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) {
    double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x = es.eigenvalues();
  w = 2.0 * es.eigenvectors().row(0).array().square();
}

}  // namespace

TransformPlan::TransformPlan(GridPtr grid) : grid_(std::move(grid)) {
  const RadialGrid& g = *grid_;
  const int n = g.n;
  const double nu = g.nu;

  // scalings: uhat = diag(1/srho) * T * diag(sr) * u
  Eigen::VectorXd sr = g.nodes.array().pow(nu) * g.rmax / g.Jp1.array();
  Eigen::VectorXd srho = g.spectral_nodes.array().pow(nu) * g.rhomax / g.Jp1.array();

  Eigen::MatrixXd T(n, n);
  Eigen::MatrixXd K1(n, n);  // J_{nu+1} kernel on the same argument matrix
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double x = g.zeros(i) * g.zeros(j) / g.S;
      const double t = (2.0 / g.S) * boost::math::cyl_bessel_j(nu, x) / (g.Jp1(i) * g.Jp1(j));
      T(i, j) = t;
      T(j, i) = t;
      const double k1 = boost::math::cyl_bessel_j(nu + 1.0, x);
      K1(i, j) = k1;
      K1(j, i) = k1;
    }
  }
  // Keep the diagonal scalings exact and invert only the well-conditioned
  // symmetric kernel T.
  Eigen::MatrixXd Tinv = Eigen::PartialPivLU<Eigen::MatrixXd>(T).inverse();
  F_ = srho.cwiseInverse().asDiagonal() * T * sr.asDiagonal();
  Finv_ = sr.cwiseInverse().asDiagonal() * Tinv * srho.asDiagonal();

  // d_r u (r_k) = -sum_j c_j rho_j r_k^{-nu} J_{nu+1}(rho_j r_k),
  // c_j = 2 rho_j^nu uhat_j / (rmax^2 Jp1_j^2); note rho_j r_k = j_j j_k / S.
  Eigen::VectorXd cscale =
      2.0 * g.spectral_nodes.array().pow(nu) * g.spectral_nodes.array() /
      (g.rmax * g.rmax * g.Jp1.array().square());
  D1h_ = -(g.nodes.array().pow(-nu).matrix().asDiagonal() * K1 * cscale.asDiagonal());

  rho2_ = g.spectral_nodes.array().square();
  rho4_ = rho2_.array().square();
  invrho2_ = rho2_.cwiseInverse();
  invrho_ = g.spectral_nodes.cwiseInverse();

  // prefix integration stencils
  const int p = pord_;
  Eigen::VectorXd glx, glw;
  gauss_legendre(p + 2, glx, glw);
  seg_coef_ = Eigen::MatrixXd::Zero(n + 1, p + 1);
  seg_start_.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double lo = (i == 0) ? 0.0 : g.nodes(i - 1);
    const double hi = (i == n) ? g.rmax : g.nodes(i);
    const double c = 0.5 * (lo + hi);
    int j0 = 0;
    while (j0 < n && g.nodes(j0) < c) ++j0;
    int start = std::min(std::max(j0 - (p + 1) / 2, 0), n - (p + 1));
    seg_start_(i) = start;
    for (int q = 0; q < static_cast<int>(glx.size()); ++q) {
      const double t = 0.5 * (hi - lo) * glx(q) + 0.5 * (hi + lo);
      const double tw = 0.5 * (hi - lo) * glw(q);
      for (int m = 0; m <= p; ++m) {
        double L = 1.0;
        for (int mm = 0; mm <= p; ++mm) {
          if (mm == m) continue;
          L *= (t - g.nodes(start + mm)) / (g.nodes(start + m) - g.nodes(start + mm));
        }
        seg_coef_(i, m) += tw * L;
      }
    }
  }
}

Eigen::VectorXcd TransformPlan::forward(const Eigen::VectorXcd& u) const { return apply_real(F_, u); }
Eigen::VectorXcd TransformPlan::inverse(const Eigen::VectorXcd& uh) const { return apply_real(Finv_, uh); }
Eigen::VectorXd TransformPlan::forward(const Eigen::VectorXd& u) const { return F_ * u; }
Eigen::VectorXd TransformPlan::inverse(const Eigen::VectorXd& uh) const { return Finv_ * uh; }

Eigen::VectorXcd TransformPlan::apply_symbol(const Eigen::VectorXcd& u, Symbol s) const {
  if ((s == Symbol::invlap || s == Symbol::riesz_half) && grid_->d < 3)
    throw std::domain_error("apply_symbol: invlap/riesz_half require d >= 3");
  Eigen::VectorXcd uh = forward(u);
  switch (s) {
    case Symbol::lap: uh.array() *= -rho2_.array(); break;
    case Symbol::bilap: uh.array() *= rho4_.array(); break;
    case Symbol::invlap: uh.array() *= invrho2_.array(); break;
    case Symbol::riesz_half: uh.array() *= invrho_.array(); break;
  }
  return inverse(uh);
}

Field TransformPlan::apply_symbol(const Field& u, Symbol s) const {
  return Field(u.grid, apply_symbol(u.values, s));
}

Eigen::VectorXcd TransformPlan::laplacian(const Eigen::VectorXcd& u) const {
  Eigen::VectorXcd uh = forward(u);
  uh.array() *= -rho2_.array();
  return inverse(uh);
}

Eigen::VectorXcd TransformPlan::radial_derivative(const Eigen::VectorXcd& u, int order) const {
  if (order == 1) return apply_real(D1h_, forward(u));
  if (order == 2) {
    Eigen::VectorXcd uh = forward(u);
    Eigen::VectorXcd du = apply_real(D1h_, uh);
    uh.array() *= -rho2_.array();
    Eigen::VectorXcd lap = inverse(uh);
    return lap - ((grid_->d - 1) * du.array() / grid_->nodes.array()).matrix();
  }
  throw std::invalid_argument("radial_derivative: order must be 1 or 2");
}

Field TransformPlan::radial_derivative(const Field& u, int order) const {
  return Field(u.grid, radial_derivative(u.values, order));
}

Eigen::VectorXd TransformPlan::prefix_real(const Eigen::VectorXd& f) const {
  const int n = grid_->n;
  Eigen::VectorXd out(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += seg_coef_.row(i).dot(f.segment(seg_start_(i), pord_ + 1));
    out(i) = acc;
  }
  return out;
}

Eigen::VectorXd TransformPlan::prefix_integral(const Eigen::VectorXd& f) const {
  return prefix_real(f);
}

Eigen::VectorXcd TransformPlan::prefix_integral(const Eigen::VectorXcd& f) const {
  Eigen::VectorXd re = prefix_real(f.real());
  Eigen::VectorXd im = prefix_real(f.imag());
  Eigen::VectorXcd out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

double TransformPlan::total_integral(const Eigen::VectorXd& f) const {
  const int n = grid_->n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) acc += seg_coef_.row(i).dot(f.segment(seg_start_(i), pord_ + 1));
  return acc;
}

Eigen::VectorXd TransformPlan::tail_integral(const Eigen::VectorXd& f) const {
  Eigen::VectorXd pre = prefix_real(f);
  const double tot = total_integral(f);
  return Eigen::VectorXd::Constant(pre.size(), tot) - pre;
}

Eigen::VectorXcd TransformPlan::tail_integral(const Eigen::VectorXcd& f) const {
  Eigen::VectorXd re = tail_integral(Eigen::VectorXd(f.real()));
  Eigen::VectorXd im = tail_integral(Eigen::VectorXd(f.imag()));
  Eigen::VectorXcd out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

Cplx TransformPlan::eval_at_zero(const Eigen::VectorXcd& uhat) const {
  // u(0) = c_nu int uhat rho^{d-1} drho with kernel limit c_nu = 1/(2^nu Gamma(nu+1))
  const RadialGrid& g = *grid_;
  const double cnu = 1.0 / (std::pow(2.0, g.nu) * boost::math::tgamma(g.nu + 1.0));
  Cplx acc(0.0, 0.0);
  for (int k = 0; k < g.n; ++k)
    acc += g.w1s(k) * std::pow(g.spectral_nodes(k), g.d - 2) * uhat(k);
  return cnu * acc;
}

Cplx TransformPlan::eval_at(const Eigen::VectorXcd& uhat, double r) const {
  if (r == 0.0) return eval_at_zero(uhat);
  const RadialGrid& g = *grid_;
  Cplx acc(0.0, 0.0);
  for (int k = 0; k < g.n; ++k) {
    const double s = g.spectral_nodes(k) * r;
    const double ker = std::pow(s, -g.nu) * boost::math::cyl_bessel_j(g.nu, s);
    acc += g.w1s(k) * std::pow(g.spectral_nodes(k), g.d - 2) * ker * uhat(k);
  }
  return acc;
}

PlanPtr make_plan(GridPtr grid) { return std::make_shared<TransformPlan>(std::move(grid)); }

Eigen::VectorXcd newton_potential_oracle(const TransformPlan& plan, const Eigen::VectorXcd& f) {
  const RadialGrid& g = plan.grid();
  if (g.d < 3) throw std::domain_error("newton_potential_oracle: requires d >= 3");
  Eigen::ArrayXd rd = g.nodes.array().pow(g.d - 1);
  Eigen::VectorXcd frd = (f.array() * rd.cast<Cplx>()).matrix();
  Eigen::VectorXcd fr = (f.array() * g.nodes.array().cast<Cplx>()).matrix();
  Eigen::VectorXcd cum = plan.prefix_integral(frd);
  Eigen::VectorXcd suf = plan.tail_integral(fr);
  Eigen::VectorXcd out =
      (g.nodes.array().pow(2 - g.d).cast<Cplx>() * cum.array() + suf.array()).matrix();
  return out / (g.d - 2.0);
}

Field newton_potential_oracle(const TransformPlan& plan, const Field& f) {
  return Field(f.grid, newton_potential_oracle(plan, f.values));
}

double dirichlet_gauge_constant(const TransformPlan& plan, const Eigen::VectorXcd& f) {
  const RadialGrid& g = plan.grid();
  const double total = (g.weights.array() * f.real().array()).sum();
  return total * std::pow(g.rmax, 2 - g.d) / ((g.d - 2.0) * unit_sphere_area(g.d));
}

Eigen::VectorXcd green_l1_oracle(const TransformPlan& plan, const Eigen::VectorXcd& w) {
  const RadialGrid& g = plan.grid();
  if (g.d < 3) throw std::domain_error("green_l1_oracle: requires d >= 3");
  Eigen::ArrayXd rd = g.nodes.array().pow(g.d);
  Eigen::VectorXcd wrd = (w.array() * rd.cast<Cplx>()).matrix();
  Eigen::VectorXcd cum = plan.prefix_integral(wrd);
  Eigen::VectorXcd suf = plan.tail_integral(w);
  Eigen::VectorXcd out =
      (g.nodes.array().pow(1 - g.d).cast<Cplx>() * cum.array() +
       g.nodes.array().cast<Cplx>() * suf.array())
          .matrix();
  return out / static_cast<double>(g.d);
}

Eigen::VectorXcd riesz_invlap_l1(const TransformPlan& plan, const Eigen::VectorXcd& w) {
  if (plan.grid().d < 3) throw std::domain_error("riesz_invlap_l1: requires d >= 3");
  Eigen::VectorXcd psi = plan.tail_integral(w);  // Psi = int_r^rmax w
  Eigen::VectorXcd ph = plan.forward(psi);
  ph.array() *= plan.grid().spectral_nodes.array().square().inverse().cast<Cplx>();
  return plan.radial_derivative(Eigen::VectorXcd(-plan.inverse(ph)), 1);
}

Eigen::VectorXcd vector_spectrum(const TransformPlan& plan, const Eigen::VectorXcd& w) {
  if (plan.grid().d < 3) throw std::domain_error("vector_spectrum: requires d >= 3");
  Eigen::VectorXcd psi = plan.tail_integral(w);
  Eigen::VectorXcd ph = plan.forward(psi);
  return (plan.grid().spectral_nodes.array().cast<Cplx>() * ph.array()).matrix();
}

}  // namespace bnls
