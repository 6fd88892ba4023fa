#include "bnls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bnls {

const char* to_string(BlowupOutcome o) {
  switch (o) {
    case BlowupOutcome::blowup_detected: return "blowup_detected";
    case BlowupOutcome::bounded_on_horizon: return "bounded_on_horizon";
    case BlowupOutcome::resolution_exhausted: return "resolution_exhausted";
  }
  return "?";
}

namespace {

// phi_k(z) = sum_{m>=0} z^m / (m+k)!; closed forms with a Taylor fallback near 0
Eigen::VectorXcd phi_fn(const Eigen::VectorXcd& z, int k) {
  Eigen::VectorXcd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const Cplx zi = z(i);
    if (std::abs(zi) >= 0.25) {
      const Cplx ez = std::exp(zi);
      if (k == 1) out(i) = (ez - 1.0) / zi;
      else if (k == 2) out(i) = (ez - 1.0 - zi) / (zi * zi);
      else out(i) = (ez - 1.0 - zi - 0.5 * zi * zi) / (zi * zi * zi);
    } else {
      Cplx term(1.0, 0.0);
      double fact = 1.0;
      for (int m = 1; m <= k; ++m) fact *= m;
      Cplx acc = term / fact;
      for (int m = 1; m <= 20; ++m) {
        term *= zi;
        fact *= (m + k);
        acc += term / fact;
      }
      out(i) = acc;
    }
  }
  return out;
}

}  // namespace

Etdrk4::Etdrk4(PlanPtr plan, const Params& params, bool linear_only)
    : plan_(std::move(plan)), params_(params), linear_only_(linear_only) {}

void Etdrk4::coefficients(double dt) {
  const RadialGrid& g = plan_->grid();
  Eigen::VectorXcd z =
      (Cplx(0.0, -1.0) * (g.spectral_nodes.array().pow(4) +
                          params_.mu * g.spectral_nodes.array().square()))
          .matrix() *
      dt;
  E_ = z.array().exp();
  E2_ = (z / 2.0).array().exp();
  Qc_ = 0.5 * dt * phi_fn(z / 2.0, 1);
  Eigen::VectorXcd p1 = phi_fn(z, 1), p2 = phi_fn(z, 2), p3 = phi_fn(z, 3);
  f1_ = dt * (p1 - 3.0 * p2 + 4.0 * p3);
  f2_ = dt * (2.0 * p2 - 4.0 * p3);
  f3_ = dt * (4.0 * p3 - p2);
  dt_cached_ = dt;
}

double Etdrk4::step(Eigen::VectorXcd& uhat, double dt) {
  if (dt != dt_cached_) coefficients(dt);
  if (linear_only_) {
    uhat = (E_.array() * uhat.array()).matrix();
    return 0.0;
  }
  const double twosig = 2.0 * params_.sigma;
  auto N = [&](const Eigen::VectorXcd& uh) {
    Eigen::VectorXcd u = plan_->inverse(uh);
    return plan_->forward(
        Eigen::VectorXcd(Cplx(0.0, 1.0) * (u.array().abs().pow(twosig) * u.array())));
  };
  Eigen::VectorXcd Nu = N(uhat);
  Eigen::VectorXcd ah = (E2_.array() * uhat.array() + Qc_.array() * Nu.array()).matrix();
  Eigen::VectorXcd Na = N(ah);
  Eigen::VectorXcd bh = (E2_.array() * uhat.array() + Qc_.array() * Na.array()).matrix();
  Eigen::VectorXcd Nb = N(bh);
  Eigen::VectorXcd ch =
      (E2_.array() * ah.array() + Qc_.array() * (2.0 * Nb.array() - Nu.array())).matrix();
  Eigen::VectorXcd Nc = N(ch);
  Eigen::VectorXcd next = (E_.array() * uhat.array() + f1_.array() * Nu.array() +
                           f2_.array() * (Na.array() + Nb.array()) + f3_.array() * Nc.array())
                              .matrix();
  // ch is a second-order full-step stage: embedded error estimate
  const RadialGrid& g = plan_->grid();
  const double num = (g.spectral_weights.array() * (next - ch).array().abs2()).sum();
  const double den = (g.spectral_weights.array() * next.array().abs2()).sum();
  uhat = std::move(next);
  return std::sqrt(num / std::max(den, 1e-300));
}

EvolutionState step(const EvolutionState& state, const Params& params, const Etdrk4& integ) {
  if (!(state.dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (!state.u.is_finite()) throw std::runtime_error("step: non-finite field");
  const TransformPlan& plan = integ.plan();
  EvolutionState out = state;
  Eigen::VectorXcd uh = plan.forward(state.u.values);
  const_cast<Etdrk4&>(integ).step(uh, state.dt);
  out.u = Field(state.u.grid, plan.inverse(uh));
  if (!out.u.is_finite()) throw std::runtime_error("step: NaN/Inf after step");
  out.t += state.dt;
  out.step_count += 1;
  return out;
}

BlowupVerdict detect_blowup(const std::vector<DiagnosticsRecord>& records,
                            const DetectorOptions& opts) {
  BlowupVerdict v;
  const int n = static_cast<int>(records.size());
  if (n < opts.min_records) throw std::invalid_argument("detect_blowup: insufficient data");

  const double a0 = records.front().lap_l2;
  const double alast = records.back().lap_l2;
  if (!(alast >= opts.amplification * a0)) {
    v.outcome = BlowupOutcome::bounded_on_horizon;
    return v;
  }

  // trailing monotone window
  int start = n - 1;
  while (start > 0 && records[start - 1].lap_l2 < records[start].lap_l2) --start;
  if (n - start < opts.min_records) {
    v.outcome = BlowupOutcome::bounded_on_horizon;
    return v;
  }

  const double tlast = records.back().t;
  auto fit_window = [&](int from) -> std::pair<double, double> {
    // least squares of log A = c - p log(T - t), minimized over T by golden section
    std::vector<double> ts, la;
    for (int i = from; i < n; ++i) {
      ts.push_back(records[i].t);
      la.push_back(std::log(records[i].lap_l2));
    }
    auto sse = [&](double T) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const int m = static_cast<int>(ts.size());
      for (int i = 0; i < m; ++i) {
        const double x = std::log(T - ts[i]);
        sx += x; sy += la[i]; sxx += x * x; sxy += x * la[i];
      }
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      const double icpt = (sy - slope * sx) / m;
      double e = 0.0;
      for (int i = 0; i < m; ++i) {
        const double x = std::log(T - ts[i]);
        const double r = la[i] - (icpt + slope * x);
        e += r * r;
      }
      return std::make_pair(e, -slope);
    };
    const double span = tlast - records[from].t;
    double lo = tlast + 1e-9 * std::max(span, 1e-12), hi = tlast + 10.0 * span;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double b = hi - gr * (hi - lo), c = lo + gr * (hi - lo);
    double fb = sse(b).first, fc = sse(c).first;
    for (int it = 0; it < 200; ++it) {
      if (fb < fc) {
        hi = c; c = b; fc = fb;
        b = hi - gr * (hi - lo);
        fb = sse(b).first;
      } else {
        lo = b; b = c; fb = fc;
        c = lo + gr * (hi - lo);
        fc = sse(c).first;
      }
    }
    const double T = 0.5 * (lo + hi);
    return {T, sse(T).second};
  };

  const int len = n - start;
  const int f1 = start, f2 = start + len / 4, f3 = start + len / 2;
  if (n - f3 < opts.min_records / 2 + 2) {
    v.outcome = BlowupOutcome::bounded_on_horizon;
    return v;
  }
  auto [T1, p1] = fit_window(f1);
  auto [T2, p2] = fit_window(f2);
  auto [T3, p3] = fit_window(f3);
  const double Tref = T3;
  const double spread = std::max({std::abs(T1 - Tref), std::abs(T2 - Tref)});
  const double scale = std::max(Tref - records[f1].t, 1e-300);
  if (spread / scale <= opts.t_stability && p3 > 0.0) {
    v.outcome = BlowupOutcome::blowup_detected;
    v.T_estimate = Tref;
    v.growth_exponent = p3;
  } else {
    v.outcome = BlowupOutcome::bounded_on_horizon;
  }
  return v;
}

EvolveResult evolve(const Field& u0, const Params& params, const PlanPtr& plan,
                    const CutoffPair& pair, const EvolveOptions& opts) {
  const RadialGrid& g = plan->grid();
  if (u0.grid.get() != &g) throw std::invalid_argument("evolve: field grid does not match plan");
  Etdrk4 integ(plan, params, opts.linear_only);

  const double rho_max = g.rhomax;
  const double dt_cap = std::min(opts.controls.cfl_c / std::pow(rho_max, 4),
                                 std::max(opts.record_every, 1e-6));

  EvolveResult out;
  Eigen::VectorXcd uh = plan->forward(u0.values);
  double t = 0.0;
  double dt = std::min(opts.dt_init, dt_cap);
  long steps = 0;
  int clean = 0;

  const double m0 = mass_spectral(g, uh);
  const double e0 = energy(*plan, u0.values, params);
  const double a0 = lap_l2_spectral(g, uh);
  const double e_scale = std::max(std::abs(e0), 0.5 * a0 * a0);

  double next_record = 0.0;
  long steps_at_record = 0;
  double max_drift_m = 0.0, max_drift_e = 0.0;
  double prev_m = m0, prev_e = e0;

  auto push_record = [&](double tt, double hh, const Eigen::VectorXcd& uhat) {
    Eigen::VectorXcd u = plan->inverse(uhat);
    out.records.push_back(make_record(*plan, pair, params, tt, hh, u));
  };

  BlowupOutcome halt = BlowupOutcome::bounded_on_horizon;
  bool halted = false;
  while (t < opts.horizon && steps < opts.max_steps) {
    if (t >= next_record || steps - steps_at_record >= 64) {
      push_record(t, dt, uh);
      while (next_record <= t) next_record += opts.record_every;
      steps_at_record = steps;
      // detection check on the trailing records
      if (static_cast<int>(out.records.size()) >= opts.detector.min_records &&
          out.records.back().lap_l2 >= opts.detector.amplification * out.records.front().lap_l2) {
        BlowupVerdict v = detect_blowup(out.records, opts.detector);
        if (v.outcome == BlowupOutcome::blowup_detected) {
          out.verdict = v;
          halted = true;
          break;
        }
      }
    }

    double h = std::min({dt, opts.horizon - t, next_record - t > 0 ? next_record - t : dt});
    if (h <= 0) h = std::min(dt, opts.horizon - t);

    Eigen::VectorXcd trial = uh;
    double embed = 0.0;
    bool ok = true;
    try {
      embed = integ.step(trial, h);
    } catch (...) {
      ok = false;
    }
    if (!trial.allFinite()) ok = false;

    double m = m0, e = e0;
    if (ok) {
      m = mass_spectral(g, trial);
      Eigen::VectorXcd u = plan->inverse(trial);
      e = energy(*plan, u, params);
      const double step_dm = std::abs(m - prev_m) / m0;
      const double step_de = std::abs(e - prev_e) / e_scale;
      if (embed > opts.controls.tol_embed ||
          step_dm > opts.controls.tol_drift || step_de > opts.controls.tol_drift)
        ok = false;
    }

    if (!ok) {
      dt = h / 2.0;
      clean = 0;
      if (dt < opts.controls.dt_min) {
        halt = BlowupOutcome::resolution_exhausted;
        halted = true;
        break;
      }
      continue;
    }

    uh = std::move(trial);
    t += h;
    ++steps;
    prev_m = m;
    prev_e = e;
    max_drift_m = std::max(max_drift_m, std::abs(m - m0) / m0);
    max_drift_e = std::max(max_drift_e, std::abs(e - e0) / e_scale);
    if (++clean >= opts.controls.grow_after) {
      dt = std::min(2.0 * dt, dt_cap);
      clean = 0;
    }

    // resolution exhaustion: spectral tail of lap u carries real mass
    if (steps % 64 == 0) {
      const int k0 = (4 * g.n) / 5;
      double tail = 0.0, tot = 0.0;
      for (int k = 0; k < g.n; ++k) {
        const double c = g.spectral_weights(k) * std::pow(g.spectral_nodes(k), 4) *
                         std::norm(uh(k));
        tot += c;
        if (k >= k0) tail += c;
      }
      if (tail > opts.tail_fraction * tot) {
        halt = BlowupOutcome::resolution_exhausted;
        halted = true;
        break;
      }
    }
  }

  if (out.records.empty() || out.records.back().t != t) push_record(t, dt, uh);
  if (!halted) {
    if (static_cast<int>(out.records.size()) >= opts.detector.min_records) {
      out.verdict = detect_blowup(out.records, opts.detector);
    }
  } else if (out.verdict.outcome != BlowupOutcome::blowup_detected) {
    out.verdict.outcome = halt;
    if (halt == BlowupOutcome::resolution_exhausted &&
        static_cast<int>(out.records.size()) >= opts.detector.min_records) {
      // a run stopped by exhaustion may still satisfy the detector
      BlowupVerdict v = detect_blowup(out.records, opts.detector);
      if (v.outcome == BlowupOutcome::blowup_detected) out.verdict = v;
      else out.verdict.outcome = BlowupOutcome::resolution_exhausted;
    }
  }

  out.final_state.t = t;
  out.final_state.u = Field(u0.grid, plan->inverse(uh));
  out.final_state.dt = dt;
  out.final_state.step_count = steps;
  out.final_state.mass_drift = max_drift_m;
  out.final_state.energy_drift = max_drift_e;
  return out;
}

}  // namespace bnls
