#include "bnls/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace bnls {

namespace {

Eigen::ArrayXd abs2(const Eigen::VectorXcd& v) { return v.array().abs2(); }

// unit-profile sup constants for the virial budget, cached per (kind, d)
struct BudgetConsts {
  double c3, c4, c6, cL;
};

const BudgetConsts& budget_consts(CutoffKind kind, int d) {
  static std::map<std::pair<int, int>, BudgetConsts> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(static_cast<int>(kind), d);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  BudgetConsts c{0, 0, 0, 0};
  const double cd = d - 1.0;
  for (int i = 1; i <= 40000; ++i) {
    const double x = 11.0 * i / 40000.0;
    std::array<double, 7> f{};
    for (int j = 0; j <= 6; ++j) f[j] = cutoff_phi_unit(kind, x, j);
    // derivative stacks: g = lap phi and h = lap^2 phi with their radial derivatives
    const double g1 = f[3] + cd * (f[2] / x - f[1] / (x * x));
    const double g2 = f[4] + cd * (f[3] / x - 2 * f[2] / (x * x) + 2 * f[1] / (x * x * x));
    const double g3 = f[5] + cd * (f[4] / x - 3 * f[3] / (x * x) + 6 * f[2] / (x * x * x) -
                                   6 * f[1] / std::pow(x, 4));
    const double g4 = f[6] + cd * (f[5] / x - 4 * f[4] / (x * x) + 12 * f[3] / (x * x * x) -
                                   24 * f[2] / std::pow(x, 4) + 24 * f[1] / std::pow(x, 5));
    const double h0 = g2 + cd * g1 / x;
    const double h1 = g3 + cd * (g2 / x - g1 / (x * x));
    const double h2 = g4 + cd * (g3 / x - 2 * g2 / (x * x) + 2 * g1 / (x * x * x));
    const double lap3 = h2 + cd * h1 / x;
    c.c3 = std::max(c.c3, std::abs(g2));
    c.c4 = std::max(c.c4, std::abs(h0));
    c.c6 = std::max(c.c6, std::abs(lap3));
    c.cL = std::max(c.cL, std::abs(d - (f[2] + cd * f[1] / x)));
  }
  return cache.emplace(key, c).first->second;
}

}  // namespace

double mass(const TransformPlan& plan, const Eigen::VectorXcd& u) {
  return (plan.grid().weights.array() * abs2(u)).sum();
}

double energy(const TransformPlan& plan, const Eigen::VectorXcd& u, const Params& params) {
  const RadialGrid& g = plan.grid();
  Eigen::VectorXcd uh = plan.forward(u);
  const double a = lap_l2_spectral(g, uh);
  const double b = grad_l2_spectral(g, uh);
  const double p =
      (g.weights.array() * u.array().abs().pow(2.0 * params.sigma + 2.0)).sum();
  return 0.5 * a * a + 0.5 * params.mu * b * b - p / (2.0 * params.sigma + 2.0);
}

double localized_virial(const TransformPlan& plan, const Eigen::VectorXcd& u,
                        const CutoffPair& pair) {
  const RadialGrid& g = plan.grid();
  Eigen::VectorXcd du = plan.radial_derivative(u, 1);
  const Cplx s = (g.weights.array().cast<Cplx>() * u.array().conjugate() *
                  pair.phi.col(1).array().cast<Cplx>() * du.array())
                     .sum();
  return 2.0 * s.imag();
}

double riesz_bivariance(const TransformPlan& plan, const Eigen::VectorXcd& u,
                        const CutoffPair& pair) {
  if (plan.grid().d < 3) throw std::domain_error("riesz_bivariance: requires d >= 3");
  Eigen::VectorXcd w = (pair.psi.col(1).array().cast<Cplx>() * u.array()).matrix();
  Eigen::VectorXcd psi = plan.tail_integral(w);
  return mass_spectral(plan.grid(), plan.forward(psi));
}

double riesz_bivariance_oracle(const TransformPlan& plan, const Eigen::VectorXcd& u,
                               const CutoffPair& pair) {
  if (plan.grid().d < 3) throw std::domain_error("riesz_bivariance_oracle: requires d >= 3");
  const RadialGrid& g = plan.grid();
  Eigen::VectorXcd w = (pair.psi.col(1).array().cast<Cplx>() * u.array()).matrix();
  Eigen::VectorXcd h = green_l1_oracle(plan, w);
  return (g.weights.array() * (w.array().conjugate() * h.array()).real()).sum();
}

double commutator_NR(const TransformPlan& plan, const Eigen::VectorXcd& u,
                     const CutoffPair& pair, const Params& params) {
  if (plan.grid().d < 3) throw std::domain_error("commutator_NR: requires d >= 3");
  const RadialGrid& g = plan.grid();
  Eigen::ArrayXcd psi1 = pair.psi.col(1).array().cast<Cplx>();
  Eigen::VectorXcd gv =
      (psi1 * u.array().abs().pow(2.0 * params.sigma).cast<Cplx>() * u.array()).matrix();
  Eigen::VectorXcd h = riesz_invlap_l1(plan, gv);
  const Cplx s =
      (g.weights.array().cast<Cplx>() * u.array().conjugate() * psi1 * h.array()).sum();
  return -2.0 * s.imag();
}

VirialRhs virial_rhs(const TransformPlan& plan, const Eigen::VectorXcd& u,
                     const CutoffPair& pair, const Params& params) {
  const RadialGrid& g = plan.grid();
  const int d = g.d;
  const double sigma = params.sigma;
  const double mu = params.mu;
  const double R = pair.R;

  Eigen::VectorXcd uh = plan.forward(u);
  Eigen::VectorXcd du = plan.radial_derivative(u, 1);
  Eigen::VectorXcd d2u = plan.radial_derivative(u, 2);
  const double A = lap_l2_spectral(g, uh);
  const double G = grad_l2_spectral(g, uh);
  const double M = mass(plan, u);
  const Eigen::ArrayXd p2s2 = u.array().abs().pow(2.0 * sigma + 2.0);
  const double P = (g.weights.array() * p2s2).sum();
  const double E = 0.5 * A * A + 0.5 * mu * G * G - P / (2.0 * sigma + 2.0);

  VirialRhs out;
  out.main = 4.0 * d * sigma * E - (2.0 * d * sigma - 8.0) * A * A -
             (2.0 * d * sigma - 4.0) * mu * G * G;

  const Eigen::ArrayXd one_m_pp = 1.0 - pair.phi.col(2).array();
  out.x_mu = -4.0 * mu * (g.weights.array() * one_m_pp * abs2(du)).sum();

  // exact identity for d/dt M_R[u]
  const Eigen::ArrayXd r = g.nodes.array();
  const Eigen::ArrayXd phi1 = pair.phi.col(1).array();
  const Eigen::ArrayXd phi2 = pair.phi.col(2).array();
  const Eigen::ArrayXd lap_phi = phi2 + (d - 1.0) * phi1 / r;
  // derivative stacks of lap phi and lap^2 phi
  const Eigen::ArrayXd lap1 =
      pair.phi.col(3).array() + (d - 1.0) * (phi2 / r - phi1 / (r * r));
  const Eigen::ArrayXd lap2 = pair.phi.col(4).array() +
                              (d - 1.0) * (pair.phi.col(3).array() / r -
                                           2.0 * phi2 / (r * r) + 2.0 * phi1 / (r * r * r));
  const Eigen::ArrayXd bilap = lap2 + (d - 1.0) * lap1 / r;
  const Eigen::ArrayXd lap3 = pair.phi.col(5).array() +
                              (d - 1.0) * (pair.phi.col(4).array() / r -
                                           3.0 * pair.phi.col(3).array() / (r * r) +
                                           6.0 * phi2 / (r * r * r) - 6.0 * phi1 / r.pow(4));
  const Eigen::ArrayXd lap4 =
      pair.phi.col(6).array() +
      (d - 1.0) * (pair.phi.col(5).array() / r - 4.0 * pair.phi.col(4).array() / (r * r) +
                   12.0 * pair.phi.col(3).array() / (r * r * r) - 24.0 * phi2 / r.pow(4) +
                   24.0 * phi1 / r.pow(5));
  const Eigen::ArrayXd bilap1 = lap3 + (d - 1.0) * (lap2 / r - lap1 / (r * r));
  const Eigen::ArrayXd bilap2 =
      lap4 + (d - 1.0) * (lap3 / r - 2.0 * lap2 / (r * r) + 2.0 * lap1 / (r * r * r));
  const Eigen::ArrayXd trilap = bilap2 + (d - 1.0) * bilap1 / r;

  const Eigen::ArrayXd w = g.weights.array();
  const double neg1 = 8.0 * (w * one_m_pp * abs2(d2u)).sum();
  const double neg2 =
      8.0 * (d - 1.0) * (w * (1.0 - phi1 / r) / (r * r) * abs2(du)).sum();
  const double t43 = -4.0 * (w * lap2 * abs2(du)).sum() - 2.0 * (w * bilap * abs2(du)).sum();
  const double t2 = (w * trilap * abs2(u)).sum();
  const double a2 = 4.0 * mu * (w * phi2 * abs2(du)).sum() - mu * (w * bilap * abs2(u)).sum();
  const double corr_nl = -(2.0 * sigma / (sigma + 1.0)) * (w * (lap_phi - d) * p2s2).sum();
  const double bterm = -(2.0 * sigma * d / (sigma + 1.0)) * P + corr_nl;
  out.exact_rhs = 8.0 * A * A - neg1 - neg2 + t43 + t2 + a2 + bterm;
  out.correction_nl = corr_nl;

  const BudgetConsts& c = budget_consts(pair.kind, d);
  out.budget = (4.0 * c.c3 + 2.0 * c.c4) / (R * R) * G * G + c.c6 / std::pow(R, 4) * M +
               std::abs(mu) * c.c4 / (R * R) * M +
               (2.0 * sigma / (sigma + 1.0)) * c.cL * std::pow(2.0, 2.0 * sigma) *
                   std::pow(M, 1.0 + sigma / 2.0) * std::pow(G, sigma) *
                   std::pow(R, -sigma * (d - 1.0));
  return out;
}

StraussMargin strauss_margin(const TransformPlan& plan, const Eigen::VectorXcd& u) {
  const RadialGrid& g = plan.grid();
  Eigen::VectorXcd uh = plan.forward(u);
  const double l2 = l2_norm(g, u);
  const double gr = grad_l2_spectral(g, uh);
  const double lp = lap_l2_spectral(g, uh);
  const double b1 = 2.0 * std::sqrt(l2) * std::sqrt(gr);
  const double b2 = 2.0 * std::pow(l2, 0.75) * std::pow(lp, 0.25);
  StraussMargin m;
  m.h1 = 1e300;
  m.h2 = 1e300;
  for (int k = 0; k < g.n; ++k) {
    const double amp = std::pow(g.nodes(k), (g.d - 1) / 2.0) * std::abs(u(k));
    m.h1 = std::min(m.h1, b1 - amp);
    m.h2 = std::min(m.h2, b2 - amp);
  }
  return m;
}

double free_bivariance_prediction(const TransformPlan& plan, const Eigen::VectorXcd& u0,
                                  const CutoffPair& pair, double t) {
  const double v0 = riesz_bivariance(plan, u0, pair);
  const double m0 = localized_virial(plan, u0, pair);
  Eigen::VectorXcd uh = plan.forward(u0);
  const double a0 = lap_l2_spectral(plan.grid(), uh);
  return v0 + 4.0 * m0 * t + 16.0 * a0 * a0 * t * t;
}

DiagnosticsRecord make_record(const TransformPlan& plan, const CutoffPair& pair,
                              const Params& params, double t, double dt,
                              const Eigen::VectorXcd& u) {
  DiagnosticsRecord rec;
  rec.t = t;
  rec.dt = dt;
  rec.mass = mass(plan, u);
  rec.energy = energy(plan, u, params);
  Eigen::VectorXcd uh = plan.forward(u);
  rec.grad_l2 = grad_l2_spectral(plan.grid(), uh);
  rec.lap_l2 = lap_l2_spectral(plan.grid(), uh);
  rec.m_r = localized_virial(plan, u, pair);
  if (plan.grid().d >= 3) {
    rec.v_r = riesz_bivariance(plan, u, pair);
    rec.n_r = commutator_NR(plan, u, pair, params);
  } else {
    rec.v_r = std::numeric_limits<double>::quiet_NaN();
    rec.n_r = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

}  // namespace bnls
