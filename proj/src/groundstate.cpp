#include "bnls/groundstate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bnls/norms.hpp"

namespace bnls {

namespace {

double sigma_star(int d) { return d <= 4 ? 1e300 : 4.0 / (d - 4); }

Eigen::VectorXd power_nonlinearity(const Eigen::VectorXd& u, double sigma) {
  return u.array().abs().pow(2.0 * sigma) * u.array();
}

}  // namespace

GroundState solve_Q(const Params& params, const TransformPlan& plan, const Field& init,
                    const SolveOptions& opts) {
  if (!(params.sigma > 0.0) || params.sigma >= sigma_star(params.d))
    throw std::invalid_argument("solve_Q: requires an energy-subcritical exponent");
  if (init.values.norm() == 0.0) throw std::invalid_argument("solve_Q: zero initial guess");

  const RadialGrid& g = plan.grid();
  const double sigma = params.sigma;
  const double gamma = (2.0 * sigma + 1.0) / (2.0 * sigma);
  Eigen::ArrayXd sym = plan.rho4().array() + 1.0;

  Eigen::VectorXd u = init.values.real();
  Eigen::VectorXd uh = plan.forward(u);
  double res = 1e300;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    Eigen::VectorXd nl = power_nonlinearity(u, sigma);
    Eigen::VectorXd nlh = plan.forward(nl);
    const double num = (g.spectral_weights.array() * sym * uh.array().square()).sum();
    const double den = (g.weights.array() * u.array().abs().pow(2.0 * sigma + 2.0)).sum();
    if (!(den > 0.0) || !std::isfinite(num))
      throw std::runtime_error("solve_Q: iteration collapsed");
    const double S = num / den;
    uh = (std::pow(S, gamma) * nlh.array() / sym).matrix();
    u = plan.inverse(uh);
    if (std::abs(S - 1.0) < opts.tol_s && it > 4) {
      // plug-in residual of lap^2 Q + Q - |Q|^{2s}Q in the spectral L^2 norm,
      // evaluated as (1+rho^4) uhat - F(nl(u)) with uhat the spectral iterate
      // (the rho^4-amplified forward-inverse roundoff cancels analytically)
      Eigen::VectorXd rh =
          (sym * uh.array()).matrix() - plan.forward(power_nonlinearity(u, sigma));
      res = std::sqrt((g.spectral_weights.array() * rh.array().square()).sum());
      if (res < opts.tol_resid) break;
    }
  }
  if (res >= opts.tol_resid)
    throw std::runtime_error("solve_Q: no convergence after max_iter iterations");
  if (l2_norm(g, u.cast<Cplx>()) < 1e-12)
    throw std::runtime_error("solve_Q: collapse to the zero profile");

  GroundState out;
  out.profile = Field(plan.grid_ptr(), u.cast<Cplx>());
  out.residual = res;
  out.iterations = it + 1;
  out.pohozaev = pohozaev_report(out.profile, params, plan);
  out.c_gn = weinstein(out.profile, params, plan);
  out.k_gn = out.pohozaev.threshold_norm;
  return out;
}

PohozaevReport pohozaev_report(const Field& Q, const Params& params, const TransformPlan& plan) {
  const RadialGrid& g = plan.grid();
  const double sigma = params.sigma;
  Eigen::VectorXcd qh = plan.forward(Q.values);
  const double A = lap_l2_spectral(g, qh);  // ||lap Q||
  const double A2 = A * A;
  const double M2 = (g.weights.array() * Q.values.array().abs2()).sum();
  const double P = (g.weights.array() * Q.values.array().abs().pow(2.0 * sigma + 2.0)).sum();
  const double sc = params.s_c;

  PohozaevReport rep;
  rep.lap_l2 = A;
  rep.lp_2s2 = P;
  rep.mass = M2;
  rep.id1_residual = std::abs(A2 - params.d / (params.d + 2.0 * (2.0 - sc)) * P) / A2;
  rep.id2_residual = std::abs(A2 - params.d / (2.0 * (2.0 - sc)) * M2) / A2;
  rep.energy = 0.5 * A2 - P / (2.0 * sigma + 2.0);
  rep.threshold_energy = std::pow(rep.energy, sc) * std::pow(M2, 2.0 - sc);
  rep.threshold_norm = std::pow(A, sc) * std::pow(std::sqrt(M2), 2.0 - sc);
  return rep;
}

double k_gn_from_c(const Params& params, double c_gn) {
  return std::pow(4.0 * (params.sigma + 1.0) / (params.d * params.sigma * c_gn),
                  1.0 / params.sigma);
}

double weinstein(const Field& u, const Params& params, const TransformPlan& plan) {
  const RadialGrid& g = plan.grid();
  const double l2 = l2_norm(g, u.values);
  if (l2 == 0.0) throw std::invalid_argument("weinstein: zero field");
  const double sigma = params.sigma;
  const double P = (g.weights.array() * u.values.array().abs().pow(2.0 * sigma + 2.0)).sum();
  const double lap = lap_l2_spectral(g, plan.forward(u.values));
  const double ds2 = params.d * sigma / 2.0;
  return P / (std::pow(lap, ds2) * std::pow(l2, 2.0 * sigma + 2.0 - ds2));
}

// ---- explicit bubble --------------------------------------------------------

double w_value(int d, double r) {
  const double beta = std::pow(d * (d - 4.0) * (d * d - 4.0), 0.25);
  return std::pow(beta / (1.0 + r * r), (d - 4.0) / 2.0);
}

double w_lap(int d, double r) {
  const double a = (d - 4.0) / 2.0;
  const double beta = std::pow(d * (d - 4.0) * (d * d - 4.0), 0.25);
  const double c = std::pow(beta, a);
  const double s = 1.0 + r * r;
  return -2.0 * a * c * std::pow(s, -a - 2.0) * (d + 2.0 * r * r);
}

Field explicit_W(int d, const GridPtr& grid) {
  if (d < 5) throw std::invalid_argument("explicit_W: requires d >= 5");
  Field u(grid);
  for (int k = 0; k < grid->n; ++k) u.values(k) = w_value(d, grid->nodes(k));
  return u;
}

double radial_integral_analytic(int d, const std::function<double(double)>& f) {
  // substitution r = (1-s)/s maps (0,1) -> (0,inf); 256-point Gauss-Legendre
  static const auto gl = [] {
    const int m = 256;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i < m; ++i) {
      double b = i / std::sqrt(4.0 * i * i - 1.0);
      J(i, i - 1) = b;
      J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    std::pair<Eigen::VectorXd, Eigen::VectorXd> out;
    out.first = (es.eigenvalues().array() + 1.0) / 2.0;
    out.second = es.eigenvectors().row(0).array().square();
    return out;
  }();
  double acc = 0.0;
  for (int q = 0; q < 256; ++q) {
    const double s = gl.first(q);
    const double r = (1.0 - s) / s;
    acc += gl.second(q) * f(r) * std::pow(r, d - 1) / (s * s);
  }
  return acc;
}

WReport w_report(const TransformPlan& plan) {
  const RadialGrid& g = plan.grid();
  const int d = g.d;
  if (d < 5) throw std::invalid_argument("w_report: requires d >= 5");
  const double p = 2.0 * d / (d - 4.0);

  // taper: 1 on [0, a], C^6 smoothstep down to 0 at b
  const double a = 0.45 * g.rmax, b = 0.85 * g.rmax;
  auto s6 = [](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double x7 = std::pow(x, 7);
    return x7 * (1716.0 + x * (-9009.0 + x * (20020.0 + x * (-24024.0 +
               x * (16380.0 + x * (-6006.0 + x * 924.0))))));
  };
  Eigen::VectorXd wt(g.n), chi(g.n);
  for (int k = 0; k < g.n; ++k) {
    const double r = g.nodes(k);
    chi(k) = 1.0 - s6((r - a) / (b - a));
    wt(k) = w_value(d, r);
  }
  Eigen::VectorXd tw = (chi.array() * wt.array()).matrix();

  Eigen::VectorXd twh = plan.forward(tw);
  Eigen::VectorXd lap2 = plan.inverse(Eigen::VectorXd(g.spectral_nodes.array().pow(4) * twh.array()));
  Eigen::VectorXd lap = plan.inverse(Eigen::VectorXd(-g.spectral_nodes.array().square() * twh.array()));

  WReport rep;
  rep.w0 = w_value(d, 0.0);

  // weighted elliptic residual on r <= a
  double num = 0.0, den = 0.0;
  for (int k = 0; k < g.n; ++k) {
    if (g.nodes(k) > a) continue;
    const double rhs = std::pow(wt(k), 1.0 + 8.0 / (d - 4.0));
    num += g.weights(k) * std::pow(lap2(k) - rhs, 2);
    den += g.weights(k) * rhs * rhs;
  }
  rep.elliptic_residual = std::sqrt(num / den);

  // ||lap W||^2 and E[W]: grid part on r <= a plus analytic tails
  double A2 = 0.0, Pp = 0.0;
  for (int k = 0; k < g.n; ++k) {
    if (g.nodes(k) > a) continue;
    A2 += g.weights(k) * lap(k) * lap(k);
    Pp += g.weights(k) * std::pow(wt(k), p);
  }
  const double om = unit_sphere_area(d);
  A2 += om * radial_integral_analytic(d, [&](double r) {
    return r <= a ? 0.0 : std::pow(w_lap(d, r), 2);
  });
  Pp += om * radial_integral_analytic(d, [&](double r) {
    return r <= a ? 0.0 : std::pow(w_value(d, r), p);
  });
  rep.lap_norm2 = A2;
  rep.energy = 0.5 * A2 - Pp / p;
  rep.poho_residual = std::abs(rep.energy - 2.0 / d * A2) / std::abs(rep.energy);
  return rep;
}

// ---- Fourier rearrangement --------------------------------------------------

Field fourier_rearrange(const Field& u, const TransformPlan& plan) {
  const RadialGrid& g = plan.grid();
  const int n = g.n;
  Eigen::VectorXcd uh = plan.forward(u.values);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(uh(i)) > std::abs(uh(j));
  });

  // lay the sorted chunks out along the measure axis and reassign the L^2 energy
  // of each overlap to the rho-ordered shells: exact measure bookkeeping, so the
  // rearrangement preserves sum m_k |v_k|^2 identically.
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  int shell = 0;
  double shell_left = g.spectral_weights(0);
  for (int j = 0; j < n && shell < n; ++j) {
    const double v2 = std::norm(uh(order[j]));
    double chunk = g.spectral_weights(order[j]);
    while (chunk > 0.0 && shell < n) {
      const double take = std::min(chunk, shell_left);
      e(shell) += v2 * take;
      chunk -= take;
      shell_left -= take;
      if (shell_left <= 0.0) {
        ++shell;
        if (shell < n) shell_left = g.spectral_weights(shell);
      }
    }
  }
  Eigen::VectorXd vsharp = (e.array() / g.spectral_weights.array()).sqrt();
  Eigen::VectorXd out = plan.inverse(vsharp);
  return Field(u.grid, out.cast<Cplx>());
}

}  // namespace bnls
