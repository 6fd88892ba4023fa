#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bnls/evolution.hpp"
#include "bnls/groundstate.hpp"
#include "test_util.hpp"

using namespace bnls;
using namespace bnls::test;

namespace {

std::vector<DiagnosticsRecord> synthetic_records(const std::function<double(double)>& A,
                                                 double t0, double t1, int n) {
  std::vector<DiagnosticsRecord> recs(n);
  for (int i = 0; i < n; ++i) {
    const double t = t0 + (t1 - t0) * i / (n - 1);
    recs[i].t = t;
    recs[i].lap_l2 = A(t);
    recs[i].mass = 1.0;
  }
  return recs;
}

}  // namespace

TEST_CASE("free flow conserves spectral norms to machine per step") {
  auto plan = make_plan(make_grid(3, 24.0, 192));
  const RadialGrid& g = plan->grid();
  auto params = make_params(3, 2.0, 0.4);
  Etdrk4 integ(plan, params, /*linear_only=*/true);
  Eigen::VectorXcd uh = plan->forward(gaussian_field(plan->grid_ptr(), 1.0, 1.0).values);
  const double m0 = mass_spectral(g, uh);
  const double a0 = lap_l2_spectral(g, uh);
  for (int s = 0; s < 50; ++s) {
    integ.step(uh, 1e-3);
    CHECK(rel_err(mass_spectral(g, uh), m0) < 1e-12);
    CHECK(rel_err(lap_l2_spectral(g, uh), a0) < 1e-12);
  }
}

TEST_CASE("soliton: u0 = Q evolves as e^{it} Q") {
  auto params = make_params(3, 2.0, 0.0);
  auto plan = make_plan(make_grid(3, 30.0, 384));
  auto gs = solve_Q(params, *plan, gaussian_field(plan->grid_ptr(), 1.0, 1.0));
  Etdrk4 integ(plan, params);
  Eigen::VectorXcd uh = plan->forward(gs.profile.values);
  const double h = 5e-4;
  const int nst = 400;  // t = 0.2
  for (int s = 0; s < nst; ++s) integ.step(uh, h);
  Eigen::VectorXcd u = plan->inverse(uh);
  Eigen::VectorXcd ref = std::exp(Cplx(0.0, nst * h)) * gs.profile.values;
  CHECK(l2_norm(plan->grid(), u - ref) / l2_norm(plan->grid(), ref) < 1e-7);
}

TEST_CASE("Richardson: one full step vs two half steps shows 4th order") {
  auto params = make_params(3, 1.0, 0.3);
  auto plan = make_plan(make_grid(3, 24.0, 256));
  Eigen::VectorXcd u0 = gaussian_field(plan->grid_ptr(), 1.2, 1.0, 0.5).values;
  Etdrk4 integ(plan, params);
  const double h = 2e-3;

  auto advance = [&](double step_h, int m) {
    Eigen::VectorXcd uh = plan->forward(u0);
    for (int s = 0; s < m; ++s) integ.step(uh, step_h);
    return uh;
  };
  Eigen::VectorXcd ref = advance(h / 8, 8);
  const double e_full = (advance(h, 1) - ref).norm();
  const double e_half = (advance(h / 2, 2) - ref).norm();
  const double ratio = e_full / e_half;
  CHECK(ratio > 9.0);
  CHECK(ratio < 25.0);
}

TEST_CASE("step aborts on non-finite fields") {
  auto params = make_params(3, 2.0, 0.0);
  auto plan = make_plan(make_grid(3, 24.0, 64));
  Etdrk4 integ(plan, params);
  EvolutionState st;
  st.u = gaussian_field(plan->grid_ptr(), 1.0, 1.0);
  st.u.values(3) = Cplx(std::nan(""), 0.0);
  st.dt = 1e-3;
  CHECK_THROWS(step(st, params, integ));
}

TEST_CASE("detector recovers a manufactured power law") {
  // ||lap u|| = (1-t)^{-1/2} on [0, 0.999]: T = 1.000 +- 0.01, p = 0.5 +- 0.05.
  auto recs = synthetic_records([](double t) { return std::pow(1.0 - t, -0.5); }, 0.0,
                                0.999, 400);
  DetectorOptions opts;
  opts.amplification = 10.0;  // manufactured series only grows ~31x
  auto v = detect_blowup(recs, opts);
  REQUIRE(v.outcome == BlowupOutcome::blowup_detected);
  CHECK(std::abs(*v.T_estimate - 1.0) < 0.01);
  CHECK(std::abs(*v.growth_exponent - 0.5) < 0.05);
}

TEST_CASE("detector: monotone bounded records stay bounded") {
  auto recs = synthetic_records([](double t) { return 2.0 - std::exp(-t); }, 0.0, 5.0, 100);
  auto v = detect_blowup(recs);
  CHECK(v.outcome == BlowupOutcome::bounded_on_horizon);
}

TEST_CASE("detector: a noisy spike is not blowup (stability check fails)") {
  auto recs = synthetic_records(
      [](double t) {
        double base = 1.0 + 0.3 * std::sin(12.0 * t);
        if (t > 4.6) base += 2e4 * (t - 4.6);  // spike at the end
        return base;
      },
      0.0, 5.0, 200);
  DetectorOptions opts;
  opts.amplification = 100.0;
  auto v = detect_blowup(recs, opts);
  CHECK(v.outcome == BlowupOutcome::bounded_on_horizon);
}

TEST_CASE("detector requires enough data") {
  auto recs = synthetic_records([](double t) { return 1.0 + t; }, 0.0, 1.0, 4);
  CHECK_THROWS(detect_blowup(recs));
}

TEST_CASE("evolve: zero data stays trivially bounded with zero records") {
  auto params = make_params(3, 2.0, 0.0);
  auto plan = make_plan(make_grid(3, 24.0, 128));
  auto pair = build_cutoff(plan->grid_ptr(), 2.0, CutoffKind::generic);
  EvolveOptions opts;
  opts.horizon = 0.05;
  opts.record_every = 0.01;
  auto res = evolve(zero_field(plan->grid_ptr()), params, plan, pair, opts);
  CHECK(res.verdict.outcome == BlowupOutcome::bounded_on_horizon);
  for (const auto& r : res.records) {
    CHECK(r.mass == 0.0);
    CHECK(r.lap_l2 == 0.0);
  }
}

TEST_CASE("evolve: conservation drift within thresholds on a smooth run") {
  auto params = make_params(3, 1.0, -1.0);
  auto plan = make_plan(make_grid(3, 24.0, 256));
  auto pair = build_cutoff(plan->grid_ptr(), 2.0, CutoffKind::generic);
  EvolveOptions opts;
  opts.horizon = 0.25;
  opts.record_every = 0.05;
  opts.dt_init = 4e-4;
  auto res = evolve(gaussian_field(plan->grid_ptr(), 1.0, 1.0), params, plan, pair, opts);
  CHECK(res.verdict.outcome == BlowupOutcome::bounded_on_horizon);
  CHECK(res.final_state.mass_drift < 1e-8);
  CHECK(res.final_state.energy_drift < 1e-8);
  CHECK(res.final_state.t == doctest::Approx(0.25));
}

TEST_CASE("time reversal: conjugate, evolve, conjugate returns the data") {
  auto params = make_params(3, 2.0, 0.5);
  auto plan = make_plan(make_grid(3, 24.0, 256));
  auto pair = build_cutoff(plan->grid_ptr(), 2.0, CutoffKind::generic);
  Field u0 = gaussian_field(plan->grid_ptr(), 0.9, 1.1, 0.2);

  EvolveOptions opts;
  opts.horizon = 0.1;
  opts.record_every = 0.05;
  opts.dt_init = 2e-4;
  auto fwd = evolve(u0, params, plan, pair, opts);
  Field back(plan->grid_ptr(), fwd.final_state.u.values.conjugate());
  auto rev = evolve(back, params, plan, pair, opts);
  Eigen::VectorXcd got = rev.final_state.u.values.conjugate();
  CHECK(l2_norm(plan->grid(), got - u0.values) / l2_norm(plan->grid(), u0.values) < 1e-6);
}
