#include "bnls/experiments.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace bnls {

const char* to_string(TheoremId t) {
  switch (t) {
    case TheoremId::T1_1: return "T1_1";
    case TheoremId::T1_3: return "T1_3";
    case TheoremId::T1_4: return "T1_4";
  }
  return "?";
}

CriterionVerdict criterion_supercritical(const Field& u0, const Params& params,
                                         const TransformPlan& plan, const GroundState* q,
                                         std::optional<double> kappa) {
  if (!(params.s_c > 0.0 && params.s_c < 2.0))
    throw std::invalid_argument("criterion_supercritical: requires 0 < s_c < 2");
  if (params.sigma > 4.0)
    throw std::invalid_argument("criterion_supercritical: requires sigma <= 4");

  CriterionVerdict v;
  v.theorem = TheoremId::T1_1;
  const double E = energy(plan, u0.values, params);
  const double M = mass(plan, u0.values);
  v.quantities["E"] = E;
  v.quantities["M"] = M;

  if (params.mu > 0.0) {
    v.branch = "i_mu_positive";
    v.satisfied = E < 0.0;
    return v;
  }
  if (params.mu < 0.0) {
    if (!kappa) throw std::invalid_argument("criterion_supercritical: kappa required for mu < 0");
    v.branch = "i_mu_negative";
    v.kappa_used = kappa;
    v.quantities["threshold"] = -(*kappa) * params.mu * params.mu * M;
    v.satisfied = E < v.quantities["threshold"];
    return v;
  }
  if (E < 0.0) {
    v.branch = "ii_negative_energy";
    v.satisfied = true;
    return v;
  }
  if (q == nullptr)
    throw std::invalid_argument(
        "criterion_supercritical: ground state required for the product inequalities");
  const double sc = params.s_c;
  Eigen::VectorXcd uh = plan.forward(u0.values);
  const double lap = lap_l2_spectral(plan.grid(), uh);
  const double prodE = std::pow(E, sc) * std::pow(M, 2.0 - sc);
  const double prodN = std::pow(lap, sc) * std::pow(std::sqrt(M), 2.0 - sc);
  const double thrE = q->pohozaev.threshold_energy;
  const double thrN = q->pohozaev.threshold_norm;
  v.quantities["prod_energy"] = prodE;
  v.quantities["prod_norm"] = prodN;
  v.quantities["thr_energy"] = thrE;
  v.quantities["thr_norm"] = thrN;
  if (prodE < thrE && prodN > thrN) {
    v.branch = "ii_products";
    v.satisfied = true;
  } else if (prodE < thrE && prodN < thrN) {
    v.branch = "remark4_global";  // a-priori bounded regime
    v.satisfied = false;
  } else {
    v.branch = "boundary";
    v.satisfied = false;
  }
  return v;
}

CriterionVerdict criterion_masscritical(const Field& u0, const Params& params,
                                        const TransformPlan& plan) {
  if (params.criticality != Criticality::mass_critical)
    throw std::invalid_argument("criterion_masscritical: requires s_c = 0");
  if (params.mu < 0.0)
    throw std::invalid_argument("criterion_masscritical: mu < 0 is not covered");
  CriterionVerdict v;
  v.theorem = TheoremId::T1_3;
  const double E = energy(plan, u0.values, params);
  v.quantities["E"] = E;
  v.quantities["M"] = mass(plan, u0.values);
  v.satisfied = E < 0.0;
  v.branch = params.mu > 0.0 ? "i_finite_time" : "ii_finite_or_infinite_t2_growth";
  return v;
}

CriterionVerdict criterion_energycritical(const Field& u0, const Params& params,
                                          const TransformPlan& plan,
                                          std::optional<double> kappa) {
  if (params.d < 5 || params.criticality != Criticality::energy_critical)
    throw std::invalid_argument("criterion_energycritical: requires d >= 5 and s_c = 2");
  CriterionVerdict v;
  v.theorem = TheoremId::T1_4;
  const double E = energy(plan, u0.values, params);
  const double M = mass(plan, u0.values);
  v.quantities["E"] = E;
  v.quantities["M"] = M;
  if (params.mu > 0.0) {
    v.branch = "i_mu_positive";
    v.satisfied = E < 0.0;
    return v;
  }
  if (params.mu < 0.0) {
    if (!kappa) throw std::invalid_argument("criterion_energycritical: kappa required for mu < 0");
    v.branch = "i_mu_negative";
    v.kappa_used = kappa;
    v.quantities["threshold"] = -(*kappa) * params.mu * params.mu * M;
    v.satisfied = E < v.quantities["threshold"];
    return v;
  }
  if (E < 0.0) {
    v.branch = "ii_negative_energy";
    v.satisfied = true;
    return v;
  }
  auto wrep = w_report(plan);
  Eigen::VectorXcd uh = plan.forward(u0.values);
  const double lap = lap_l2_spectral(plan.grid(), uh);
  v.quantities["E_W"] = wrep.energy;
  v.quantities["lap_u0"] = lap;
  v.quantities["lap_W"] = std::sqrt(wrep.lap_norm2);
  if (E < wrep.energy && lap > std::sqrt(wrep.lap_norm2)) {
    v.branch = "ii_bubble_products";
    v.satisfied = true;
  } else if (E < wrep.energy && lap < std::sqrt(wrep.lap_norm2)) {
    v.branch = "remark_global";
    v.satisfied = false;
  } else {
    v.branch = "boundary";
    v.satisfied = false;
  }
  return v;
}

RateFit fit_rate(const std::vector<DiagnosticsRecord>& records, double T,
                 const Params& params, const RateFitOptions& opts) {
  const int n = static_cast<int>(records.size());
  if (n < opts.min_records) throw std::invalid_argument("fit_rate: too few records");

  const double dmin = T - records[n - 1].t;
  if (!(dmin > 0.0)) throw std::invalid_argument("fit_rate: T must exceed the last record");
  const double dmax = opts.decade * dmin;

  // close the unrecorded piece int_{t_last}^T with the trailing power law of
  // ||lap u||^2 ~ C_A (T-t)^{-gamma_A}, fitted on the final decade of records
  double sxa = 0, sya = 0, sxxa = 0, sxya = 0;
  int ma = 0;
  for (int i = 0; i < n; ++i) {
    const double dtau = T - records[i].t;
    if (dtau > dmax || !(records[i].lap_l2 > 0.0)) continue;
    const double x = std::log(dtau), y = 2.0 * std::log(records[i].lap_l2);
    sxa += x; sya += y; sxxa += x * x; sxya += x * y;
    ++ma;
  }
  if (ma < 4) throw std::invalid_argument("fit_rate: fit window too short");
  const double gammaA = -(ma * sxya - sxa * sya) / (ma * sxxa - sxa * sxa);
  if (!(gammaA < 1.95))
    throw std::runtime_error("fit_rate: trailing growth too steep for the tail closure");
  const double CA = std::exp((sya + gammaA * sxa) / ma);
  const double g_tail = CA * std::pow(dmin, 2.0 - gammaA) / (2.0 - gammaA);

  // g(t_i) by trailing trapezoid of (T - tau) ||lap u||^2 plus the tail closure
  std::vector<double> g(n, g_tail);
  for (int i = n - 2; i >= 0; --i) {
    const double f1 = (T - records[i].t) * records[i].lap_l2 * records[i].lap_l2;
    const double f2 = (T - records[i + 1].t) * records[i + 1].lap_l2 * records[i + 1].lap_l2;
    g[i] = g[i + 1] + 0.5 * (f1 + f2) * (records[i + 1].t - records[i].t);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  double wlo = 1e300, whi = 0.0;
  double gprev = -1.0;
  for (int i = 0; i < n - 1; ++i) {
    const double dt = T - records[i].t;
    if (dt > dmax || dt < dmin) continue;
    if (!(g[i] > 0.0)) continue;
    if (gprev > 0.0 && g[i] > gprev) throw std::runtime_error("fit_rate: non-monotone g");
    gprev = g[i];
    const double x = std::log(dt), y = std::log(g[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
    wlo = std::min(wlo, dt);
    whi = std::max(whi, dt);
  }
  if (m < opts.min_records) throw std::invalid_argument("fit_rate: fit window too short");

  RateFit fit;
  fit.T = T;
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.C_fit = std::exp((sy - fit.slope * sx) / m);
  fit.beta_measured = fit.slope / (2.0 - fit.slope);
  fit.alpha = (4.0 - params.sigma) / (params.sigma * (params.d - 1));
  fit.window_lo = wlo;
  fit.window_hi = whi;
  fit.points = m;
  return fit;
}

NrScalingResult nr_scaling_probe(const Params& params, const TransformPlan& plan,
                                 const Field& base, const std::vector<double>& R_list,
                                 const std::vector<double>& lambda_list, CutoffKind kind) {
  if (plan.grid().d < 3) throw std::domain_error("nr_scaling_probe: requires d >= 3");
  if (R_list.size() < 2 || lambda_list.size() < 2)
    throw std::invalid_argument("nr_scaling_probe: degenerate family (need >= 2 scales each)");

  const RadialGrid& g = plan.grid();
  Eigen::VectorXcd bh = plan.forward(base.values);

  std::vector<double> logN, logR, logA;
  for (double lam : lambda_list) {
    Eigen::VectorXcd ul(g.n);
    for (int k = 0; k < g.n; ++k)
      ul(k) = std::pow(lam, g.d / 2.0) * plan.eval_at(bh, lam * g.nodes(k));
    const double A = lap_l2_spectral(g, plan.forward(ul));
    for (double R : R_list) {
      auto pair = build_cutoff(plan.grid_ptr(), R, kind);
      const double N = std::abs(commutator_NR(plan, ul, pair, params));
      if (!(N > 1e-14)) throw std::invalid_argument("nr_scaling_probe: degenerate N_R");
      logN.push_back(std::log(N));
      logR.push_back(std::log(R));
      logA.push_back(std::log(A));
    }
  }
  const int m = static_cast<int>(logN.size());
  Eigen::MatrixXd X(m, 3);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = logR[i];
    X(i, 2) = logA[i];
    y(i) = logN[i];
  }
  Eigen::VectorXd coef = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  NrScalingResult out;
  out.a_emp = coef(1);
  out.b_emp = coef(2);
  out.residual = std::sqrt((X * coef - y).squaredNorm() / m);
  return out;
}

GrowthFloorFit growth_floor_fit(const std::vector<DiagnosticsRecord>& records,
                                double t0_fraction) {
  if (records.size() < 4) throw std::invalid_argument("growth_floor_fit: too few records");
  GrowthFloorFit fit;
  const double tend = records.back().t;
  fit.t0 = t0_fraction * tend;
  double c = 1e300;
  double first_in_window = -1.0;
  for (const auto& r : records) {
    if (r.t < fit.t0 || !(r.t > 0.0)) continue;
    if (first_in_window < 0.0) first_in_window = r.lap_l2;
    c = std::min(c, r.lap_l2 / (r.t * r.t));
  }
  fit.c = c;
  fit.grew = records.back().lap_l2 > first_in_window;
  return fit;
}

}  // namespace bnls
