#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bnls/experiments.hpp"
#include "test_util.hpp"

using namespace bnls;
using namespace bnls::test;

namespace {

std::vector<DiagnosticsRecord> manufactured(double gamma, double T, int n, double tmax) {
  // records densify geometrically toward T, like adaptive runs near collapse
  std::vector<DiagnosticsRecord> recs(n);
  const double d0 = T, d1 = T - tmax;
  for (int i = 0; i < n; ++i) {
    const double dist = d0 * std::pow(d1 / d0, static_cast<double>(i) / (n - 1));
    recs[i].t = T - dist;
    recs[i].lap_l2 = std::pow(dist, -gamma / 2.0);  // ||lap u||^2 = (T-t)^{-gamma}
  }
  return recs;
}

struct QContext {
  Params params;
  PlanPtr plan;
  GroundState gs;
};

QContext& context_32() {
  static QContext ctx = [] {
    QContext c{make_params(3, 2.0, 0.0), make_plan(make_grid(3, 40.0, 512)), {}};
    c.gs = solve_Q(c.params, *c.plan, gaussian_field(c.plan->grid_ptr(), 1.0, 1.0));
    return c;
  }();
  return ctx;
}

}  // namespace

TEST_CASE("supercritical criterion at lambda Q: sharp dichotomy across lambda = 1") {
  auto& ctx = context_32();
  auto scaled = [&](double lam) {
    Field u = ctx.gs.profile;
    u.values *= lam;
    return u;
  };
  auto v12 = criterion_supercritical(scaled(1.2), ctx.params, *ctx.plan, &ctx.gs, {});
  CHECK(v12.satisfied);

  auto v08 = criterion_supercritical(scaled(0.8), ctx.params, *ctx.plan, &ctx.gs, {});
  CHECK_FALSE(v08.satisfied);
  CHECK(v08.branch == "remark4_global");

  auto v10 = criterion_supercritical(ctx.gs.profile, ctx.params, *ctx.plan, &ctx.gs, {});
  CHECK_FALSE(v10.satisfied);
  CHECK(v10.branch == "boundary");
}

TEST_CASE("supercritical criterion: mu branches and error paths") {
  auto& ctx = context_32();
  Field u = gaussian_field(ctx.plan->grid_ptr(), 3.0, 1.0);
  auto pp = make_params(3, 2.0, 1.0);
  auto vp = criterion_supercritical(u, pp, *ctx.plan, nullptr, {});
  CHECK(vp.branch == "i_mu_positive");
  CHECK(vp.satisfied == (energy(*ctx.plan, u.values, pp) < 0.0));

  auto pn = make_params(3, 2.0, -1.0);
  CHECK_THROWS(criterion_supercritical(u, pn, *ctx.plan, nullptr, {}));  // kappa missing
  auto vn = criterion_supercritical(u, pn, *ctx.plan, nullptr, 0.1);
  CHECK(vn.kappa_used == 0.1);

  // product branch without a ground state
  Field small = gaussian_field(ctx.plan->grid_ptr(), 0.1, 1.0);
  CHECK_THROWS(criterion_supercritical(small, ctx.params, *ctx.plan, nullptr, {}));
  CHECK_THROWS(criterion_supercritical(u, make_params(3, 1.0, 0.0), *ctx.plan, nullptr, {}));
}

TEST_CASE("criterion verdicts are invariant under the critical rescaling") {
  auto& ctx = context_32();
  Eigen::VectorXcd qh = ctx.plan->forward(ctx.gs.profile.values);
  const RadialGrid& g = ctx.plan->grid();
  const double sc = ctx.params.s_c;
  for (double amp : {0.9, 1.15}) {
    Field base = ctx.gs.profile;
    base.values *= amp;
    auto v0 = criterion_supercritical(base, ctx.params, *ctx.plan, &ctx.gs, {});
    for (double lam : {0.8, 1.25}) {
      Field ul(ctx.plan->grid_ptr());
      for (int k = 0; k < g.n; ++k)
        ul.values(k) =
            amp * std::pow(lam, g.d / 2.0 - sc) * ctx.plan->eval_at(qh, lam * g.nodes(k));
      auto vl = criterion_supercritical(ul, ctx.params, *ctx.plan, &ctx.gs, {});
      CHECK(vl.satisfied == v0.satisfied);
    }
  }
}

TEST_CASE("mass-critical criterion: sign of the energy decides") {
  auto params = make_params(2, 2.0, 0.0);
  auto plan = make_plan(make_grid(2, 24.0, 256));
  // amplitude scan until the quadrature energy is negative
  double amp = 1.0;
  while (energy(*plan, gaussian_field(plan->grid_ptr(), amp, 1.0).values, params) >= 0.0)
    amp *= 1.3;
  auto vneg = criterion_masscritical(gaussian_field(plan->grid_ptr(), amp, 1.0), params, *plan);
  CHECK(vneg.satisfied);
  CHECK(vneg.branch == "ii_finite_or_infinite_t2_growth");

  auto vsmall =
      criterion_masscritical(gaussian_field(plan->grid_ptr(), 0.05, 1.0), params, *plan);
  CHECK_FALSE(vsmall.satisfied);
  CHECK(vsmall.quantities.at("E") > 0.0);

  auto vzero = criterion_masscritical(zero_field(plan->grid_ptr()), params, *plan);
  CHECK_FALSE(vzero.satisfied);

  CHECK_THROWS(criterion_masscritical(gaussian_field(plan->grid_ptr(), 1.0, 1.0),
                                      make_params(2, 2.0, -0.5), *plan));
  CHECK(criterion_masscritical(gaussian_field(plan->grid_ptr(), amp, 1.0),
                               make_params(2, 2.0, 0.5), *plan)
            .branch == "i_finite_time");
}

TEST_CASE("energy-critical criterion at scaled bubbles") {
  // W decays like 1/r in d=5, so the H^2 truncation must be tapered over a very
  // wide window before its Delta-norm penalty stops eating the hypothesis margins.
  auto params = make_params(5, 4.0, 0.0);
  auto plan = make_plan(make_grid(5, 330.0, 2048));
  const RadialGrid& g = plan->grid();
  // 1.1 W tapered into H^2
  auto s6 = [](double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    const double x7 = std::pow(x, 7);
    return x7 * (1716.0 + x * (-9009.0 + x * (20020.0 + x * (-24024.0 +
               x * (16380.0 + x * (-6006.0 + x * 924.0))))));
  };
  auto scaled_w = [&](double lam) {
    Field u(plan->grid_ptr());
    for (int k = 0; k < g.n; ++k) {
      const double r = g.nodes(k);
      const double chi = 1.0 - s6((r - 12.0) / 288.0);
      u.values(k) = lam * w_value(5, r) * chi;
    }
    return u;
  };
  auto v11 = criterion_energycritical(scaled_w(1.1), params, *plan, {});
  CHECK(v11.satisfied);
  CHECK(v11.branch == "ii_bubble_products");

  auto v09 = criterion_energycritical(scaled_w(0.9), params, *plan, {});
  CHECK_FALSE(v09.satisfied);
  CHECK(v09.branch == "remark_global");

  // E[u0] >= E[W]: big perturbation with positive energy above the bubble level
  Field big = scaled_w(1.0);
  big.values *= 1.0;  // E[W-tapered] ~ E[W]; inflate the H2 part with a bump
  for (int k = 0; k < g.n; ++k) {
    const double r = g.nodes(k);
    big.values(k) += 40.0 * std::exp(-r * r) * std::cos(3.0 * r);
  }
  auto vbig = criterion_energycritical(big, params, *plan, {});
  if (vbig.quantities.count("E_W") && vbig.quantities.at("E") >= vbig.quantities.at("E_W"))
    CHECK(vbig.branch == "boundary");
}

TEST_CASE("rate fit recovers manufactured exponents to 1 percent") {
  auto params = make_params(3, 2.0, 0.0);
  for (double gamma : {0.25, 0.5, 1.0, 1.5}) {
    auto recs = manufactured(gamma, 1.0, 400, 0.9995);
    auto fit = fit_rate(recs, 1.0, params);
    const double s_want = 2.0 - gamma;
    CHECK(rel_err(fit.slope, s_want) < 0.01);
    // closed form g(t) = (T-t)^{2-gamma}/(2-gamma)
    CHECK(rel_err(fit.C_fit, 1.0 / (2.0 - gamma)) < 0.02);
    CHECK(rel_err(fit.beta_measured, s_want / (2.0 - s_want)) < 0.03);
  }
}

TEST_CASE("alpha evaluates the closed form (4-sigma)/(sigma(d-1))") {
  auto params = make_params(4, 1.2, 0.0);
  auto recs = manufactured(0.5, 1.0, 200, 0.99);
  auto fit = fit_rate(recs, 1.0, params, {.min_records = 30, .decade = 10.0});
  CHECK(fit.alpha == doctest::Approx(2.8 / 3.6).epsilon(1e-12));
  CHECK(doctest::Approx(0.7778).epsilon(1e-4) == fit.alpha);
}

TEST_CASE("rate fit error paths") {
  auto params = make_params(3, 2.0, 0.0);
  auto recs = manufactured(0.5, 1.0, 10, 0.9);
  CHECK_THROWS(fit_rate(recs, 1.0, params));  // too few records
  auto recs2 = manufactured(0.5, 1.0, 2000, 0.999);
  CHECK_THROWS(fit_rate(recs2, 0.99, params));  // T before the last record
}

TEST_CASE("N_R scaling probe satisfies -a + 2b = delta") {
  for (int d : {3, 5}) {
    const double sigma = d == 3 ? 2.0 : 4.0 / 5.0;  // supercritical / mass-critical
    auto params = make_params(d, sigma, 0.0);
    auto plan = make_plan(make_grid(d, 60.0, 512));
    Field base = gaussian_field(plan->grid_ptr(), 1.0, 1.0, 0.6);
    auto res = nr_scaling_probe(params, *plan, base, {2.0, 3.0, 4.5}, {0.8, 1.0, 1.25});
    CHECK(std::abs(-res.a_emp + 2.0 * res.b_emp - params.delta) < 0.1);
    if (d == 5) CHECK(res.b_emp <= 0.25 + 0.1);
  }
}

TEST_CASE("N_R probe rejects degenerate families") {
  auto params = make_params(3, 2.0, 0.0);
  auto plan = make_plan(make_grid(3, 40.0, 256));
  Field base = gaussian_field(plan->grid_ptr(), 1.0, 1.0, 0.6);
  CHECK_THROWS(nr_scaling_probe(params, *plan, base, {2.0}, {1.0}));
  Field real_base = gaussian_field(plan->grid_ptr(), 1.0, 1.0, 0.0);
  CHECK_THROWS(nr_scaling_probe(params, *plan, real_base, {2.0, 4.0}, {0.9, 1.1}));
}

TEST_CASE("growth floor fit reports a positive constant on t^2 growth") {
  std::vector<DiagnosticsRecord> recs(100);
  for (int i = 0; i < 100; ++i) {
    const double t = 5.0 * i / 99.0;
    recs[i].t = t;
    recs[i].lap_l2 = 1.0 + 0.3 * t * t;
  }
  auto fit = growth_floor_fit(recs);
  CHECK(fit.grew);
  CHECK(fit.c > 0.0);
  for (const auto& r : recs)
    if (r.t >= fit.t0) CHECK(r.lap_l2 >= fit.c * r.t * r.t);
}
