#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bnls/diagnostics.hpp"
#include "bnls/evolution.hpp"
#include "bnls/groundstate.hpp"
#include "test_util.hpp"

using namespace bnls;
using namespace bnls::test;

TEST_CASE("energy of the zero field is zero") {
  auto plan = make_plan(make_grid(3, 20.0, 64));
  auto params = make_params(3, 2.0, 0.5);
  CHECK(energy(*plan, Eigen::VectorXcd::Zero(64), params) == 0.0);
}

TEST_CASE("energy homogeneity: E[lambda Q] from the scaled pieces exactly") {
  auto params = make_params(3, 2.0, 0.0);
  auto plan = make_plan(make_grid(3, 30.0, 384));
  auto gs = solve_Q(params, *plan, gaussian_field(plan->grid_ptr(), 1.0, 1.0));
  const double A2 = gs.pohozaev.lap_l2 * gs.pohozaev.lap_l2;
  const double P = gs.pohozaev.lp_2s2;
  for (double lam : {0.8, 1.2}) {
    Eigen::VectorXcd u = lam * gs.profile.values;
    const double want = 0.5 * lam * lam * A2 -
                        std::pow(lam, 2 * params.sigma + 2) * P / (2 * params.sigma + 2);
    CHECK(rel_err(energy(*plan, u, params), want) < 1e-12);
  }
}

TEST_CASE("localized virial vanishes on real fields") {
  auto plan = make_plan(make_grid(3, 24.0, 192));
  auto pair = build_cutoff(plan->grid_ptr(), 3.0, CutoffKind::generic);
  Eigen::VectorXcd u = bump_field(plan->grid(), 2.0, 1.0);
  CHECK(localized_virial(*plan, u, pair) == 0.0);
}

TEST_CASE("localized virial obeys the Cauchy-Schwarz bound c R ||u|| ||grad u||") {
  std::mt19937_64 rng(41);
  auto plan = make_plan(make_grid(3, 24.0, 192));
  const RadialGrid& g = plan->grid();
  auto pair = build_cutoff(plan->grid_ptr(), 2.0, CutoffKind::generic);
  double cmax = 0.0;
  for (int i = 1; i <= 2000; ++i)
    cmax = std::max(cmax, cutoff_phi_unit(CutoffKind::generic, 10.5 * i / 2000.0, 1));
  for (int t = 0; t < 30; ++t) {
    Eigen::VectorXcd u = random_smooth_field(*plan, rng);
    Eigen::VectorXcd uh = plan->forward(u);
    const double bound =
        2.0 * cmax * pair.R * l2_norm(g, u) * grad_l2_spectral(g, uh);
    CHECK(std::abs(localized_virial(*plan, u, pair)) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("virial rhs: mass-critical coefficients collapse to 16 E - 4 mu ||grad u||^2") {
  auto params = make_params(2, 2.0, 0.7);
  auto plan = make_plan(make_grid(2, 24.0, 192));
  auto pair = build_cutoff(plan->grid_ptr(), 3.0, CutoffKind::generic);
  Eigen::VectorXcd u = gaussian_field(plan->grid_ptr(), 1.3, 1.0, 0.4).values;
  auto rhs = virial_rhs(*plan, u, pair, params);
  const double E = energy(*plan, u, params);
  const double G = grad_l2_spectral(plan->grid(), plan->forward(u));
  CHECK(rel_err(rhs.main, 16.0 * E - 4.0 * params.mu * G * G) < 1e-12);
}

TEST_CASE("virial rhs: nonlinear correction is exactly zero for data inside r <= R") {
  auto params = make_params(3, 2.0, 0.0);
  auto plan = make_plan(make_grid(3, 60.0, 384));
  auto pair = build_cutoff(plan->grid_ptr(), 6.0, CutoffKind::generic);
  Eigen::VectorXcd u(plan->grid().n);
  for (int k = 0; k < plan->grid().n; ++k) {
    const double r = plan->grid().nodes(k);
    u(k) = r < 6.0 ? std::exp(-r * r) * std::pow(1.0 - r / 6.0, 2) : 0.0;
  }
  auto rhs = virial_rhs(*plan, u, pair, params);
  CHECK(rhs.correction_nl == 0.0);
}

TEST_CASE("riesz bivariance: nonnegative, Hardy bound, and oracle cross-check") {
  std::mt19937_64 rng(42);
  for (int d : {3, 5}) {
    auto plan = make_plan(make_grid(d, 36.0, 512));
    const RadialGrid& g = plan->grid();
    auto pair = build_cutoff(plan->grid_ptr(), 2.0, CutoffKind::generic);
    double cpsi = 0.0;  // sup of s p(s) for the Hardy constant
    for (int i = 1; i <= 2000; ++i) {
      const double x = 10.5 * i / 2000.0;
      cpsi = std::max(cpsi, x * cutoff_psi_unit(CutoffKind::generic, x, 1));
    }
    const double hardy = 2.0 / (d - 2.0);
    for (int t = 0; t < 30; ++t) {
      Eigen::VectorXcd u = random_smooth_field(*plan, rng);
      const double V = riesz_bivariance(*plan, u, pair);
      CHECK(V >= 0.0);
      const double m = mass(*plan, u);
      CHECK(V <= hardy * hardy * cpsi * cpsi * std::pow(pair.R, 4) * m * (1 + 1e-12));
    }
    // cross-check against the composite Newton-kernel form
    Eigen::VectorXcd u = gaussian_field(plan->grid_ptr(), 1.0, 1.5, 0.3).values;
    const double a = riesz_bivariance(*plan, u, pair);
    const double b = riesz_bivariance_oracle(*plan, u, pair);
    CHECK(rel_err(a, b) < 1e-5);
  }
}

TEST_CASE("riesz bivariance and N_R reject d = 2") {
  auto plan = make_plan(make_grid(2, 24.0, 64));
  auto pair = build_cutoff(plan->grid_ptr(), 2.0, CutoffKind::generic);
  Eigen::VectorXcd u = bump_field(plan->grid(), 2.0, 1.0);
  CHECK_THROWS(riesz_bivariance(*plan, u, pair));
  CHECK_THROWS(commutator_NR(*plan, u, pair, make_params(2, 2.0, 0.0)));
}

TEST_CASE("N_R vanishes identically on real data") {
  auto plan = make_plan(make_grid(5, 30.0, 192));
  auto pair = build_cutoff(plan->grid_ptr(), 2.0, CutoffKind::generic);
  auto params = make_params(5, 0.8, 0.0);
  Eigen::VectorXcd u = bump_field(plan->grid(), 1.5, 0.8);
  CHECK(commutator_NR(*plan, u, pair, params) == 0.0);
}

TEST_CASE("Lemma 5.2 exponent tables at d=5 mass-critical") {
  // a = (6-d)/2 for 3 <= d <= 5 and b = (6-d)/4 for d = 3,4,5
  const int d = 5;
  CHECK((6.0 - d) / 2.0 == doctest::Approx(0.5));
  CHECK((6.0 - d) / 4.0 == doctest::Approx(0.25));
}

TEST_CASE("strauss margins: nonnegative on random smooth fields, zero field gives zero") {
  std::mt19937_64 rng(43);
  for (int d : {2, 3, 5}) {
    auto plan = make_plan(make_grid(d, 24.0, 192));
    for (int t = 0; t < 30; ++t) {
      Eigen::VectorXcd u = random_smooth_field(*plan, rng);
      auto m = strauss_margin(*plan, u);
      CHECK(m.h1 >= -1e-9);
      CHECK(m.h2 >= -1e-9);
    }
    auto z = strauss_margin(*plan, Eigen::VectorXcd::Zero(plan->grid().n));
    CHECK(z.h1 == 0.0);
    CHECK(z.h2 == 0.0);
  }
}

TEST_CASE("gradient interpolation chain holds under spectral quadrature") {
  std::mt19937_64 rng(44);
  auto plan = make_plan(make_grid(3, 24.0, 192));
  const RadialGrid& g = plan->grid();
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXcd uh = plan->forward(random_smooth_field(*plan, rng));
    const double l2 = std::sqrt(mass_spectral(g, uh));
    const double gr = grad_l2_spectral(g, uh);
    const double lp = lap_l2_spectral(g, uh);
    CHECK(gr <= std::sqrt(l2) * std::sqrt(lp) * (1.0 + 1e-10));
  }
}

TEST_CASE("free bivariance prediction at t = 0 and for real data") {
  auto plan = make_plan(make_grid(3, 48.0, 256));
  auto pair = build_cutoff(plan->grid_ptr(), 2.0, CutoffKind::generic);
  Eigen::VectorXcd u = gaussian_field(plan->grid_ptr(), 1.0, 1.0).values;
  const double v0 = riesz_bivariance(*plan, u, pair);
  CHECK(free_bivariance_prediction(*plan, u, pair, 0.0) == doctest::Approx(v0));
  // real data: M(0) = 0, prediction is v0 + 16 ||lap u||^2 t^2
  const double a0 = lap_l2_spectral(plan->grid(), plan->forward(u));
  const double t = 0.37;
  CHECK(rel_err(free_bivariance_prediction(*plan, u, pair, t),
                v0 + 16.0 * a0 * a0 * t * t) < 1e-12);
}

TEST_CASE("records carry NaN riesz entries in d = 2") {
  auto plan = make_plan(make_grid(2, 24.0, 64));
  auto pair = build_cutoff(plan->grid_ptr(), 2.0, CutoffKind::generic);
  auto params = make_params(2, 2.0, 0.0);
  auto rec = make_record(*plan, pair, params, 0.0, 1e-3,
                         gaussian_field(plan->grid_ptr(), 1.0, 1.0).values);
  CHECK(std::isnan(rec.v_r));
  CHECK(std::isnan(rec.n_r));
  CHECK(rec.mass > 0.0);
}
