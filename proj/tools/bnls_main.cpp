#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>

#include "bnls/experiments.hpp"
#include "bnls/groundstate.hpp"
#include "bnls/io.hpp"
#include "bnls/norms.hpp"

using namespace bnls;

namespace {

struct Check {
  std::string name;
  double value;
  double threshold;
  bool less_than;  // pass iff value < threshold (otherwise value > threshold)
};

int report(const std::vector<Check>& checks) {
  int failures = 0;
  for (const auto& c : checks) {
    const bool ok = c.less_than ? (c.value < c.threshold) : (c.value > c.threshold);
    std::printf("[%s] %-58s %12.4e %s %.1e\n", ok ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.less_than ? "<" : ">", c.threshold);
    if (!ok) ++failures;
  }
  return failures;
}

Eigen::VectorXcd random_smooth(const TransformPlan& plan, std::mt19937_64& rng) {
  const RadialGrid& g = plan.grid();
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  const double band = 0.25 * g.rhomax;
  Eigen::VectorXcd uh = Eigen::VectorXcd::Zero(g.n);
  for (int b = 0; b < 6; ++b) {
    const double c = (0.05 + 0.75 * unif(rng)) * band;
    const double w = (0.05 + 0.3 * unif(rng)) * band;
    const Cplx amp(gauss(rng), gauss(rng));
    for (int k = 0; k < g.n; ++k) {
      const double x = (g.spectral_nodes(k) - c) / w;
      uh(k) += amp * std::exp(-x * x);
    }
  }
  return plan.inverse(uh);
}

int cmd_verify(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Check> checks;

  // transform identities and the Newton-theorem oracle
  for (int d : {3, 5}) {
    auto plan = make_plan(make_grid(d, 24.0, 320));
    const RadialGrid& g = plan->grid();
    double rt = 0.0, pl = 0.0;
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXcd u = random_smooth(*plan, rng);
      rt = std::max(rt, (plan->inverse(plan->forward(u)) - u).norm() / u.norm());
      const double a = l2_norm(g, u);
      const double b = std::sqrt(mass_spectral(g, plan->forward(u)));
      pl = std::max(pl, std::abs(a - b) / a);
    }
    checks.push_back({"transform round trip (d=" + std::to_string(d) + ")", rt, 1e-10, true});
    checks.push_back({"Plancherel (d=" + std::to_string(d) + ")", pl, 1e-10, true});

    double orc = 0.0;
    std::uniform_real_distribution<double> unif;
    for (int t = 0; t < 10; ++t) {
      const double r0 = 2.0 + 6.0 * unif(rng), w = 0.8 + 1.2 * unif(rng);
      Eigen::VectorXcd f(g.n);
      for (int k = 0; k < g.n; ++k) {
        const double x = (g.nodes(k) - r0) / w;
        f(k) = std::exp(-x * x);
      }
      Eigen::VectorXcd sp = plan->apply_symbol(f, Symbol::invlap);
      sp.array() += dirichlet_gauge_constant(*plan, f);
      Eigen::VectorXcd nw = newton_potential_oracle(*plan, f);
      orc = std::max(orc, l2_norm(g, sp - nw) / l2_norm(g, nw));
    }
    checks.push_back({"invlap vs Newton oracle (d=" + std::to_string(d) + ")", orc, 1e-6, true});
  }

  // cutoff certification
  {
    auto grid = make_grid(3, 60.0, 256);
    for (auto kind : {CutoffKind::generic, CutoffKind::appendixB}) {
      auto pair = build_cutoff(grid, 2.0, kind);
      for (int d : {2, 3, 4}) {
        auto v = verify_cutoff(pair, d);
        const std::string tag = std::string(to_string(kind)) + ", d=" + std::to_string(d);
        checks.push_back({"cutoff margin 1-phi'' (" + tag + ")",
                          v.margin_one_minus_phipp, -1e-12, false});
        checks.push_back({"cutoff margin d-lap phi (" + tag + ")", v.margin_lap, -1e-12, false});
        checks.push_back({"cutoff psi identity (" + tag + ")", v.psi_identity_err, 1e-10, true});
        if (kind == CutoffKind::appendixB) {
          checks.push_back({"cutoff eta0 slack (" + tag + ")", *v.eta0_slack, 0.0, false});
        }
      }
    }
  }

  // rearrangement lemmas
  {
    auto plan = make_plan(make_grid(3, 24.0, 256));
    const RadialGrid& g = plan->grid();
    double l2err = 0.0, sob = -1e300, l4 = -1e300;
    for (int t = 0; t < 20; ++t) {
      Field u(plan->grid_ptr(), random_smooth(*plan, rng));
      Field us = fourier_rearrange(u, *plan);
      Eigen::VectorXcd a = plan->forward(u.values);
      Eigen::VectorXcd b = plan->forward(us.values);
      l2err = std::max(l2err, std::abs(std::sqrt(mass_spectral(g, b)) - l2_norm(g, u.values)) /
                                  l2_norm(g, u.values));
      for (double sexp : {0.5, 1.0, 2.0}) {
        const double na = std::sqrt((g.spectral_weights.array() *
                                     g.spectral_nodes.array().pow(4 * sexp) * a.array().abs2())
                                        .sum());
        const double nb = std::sqrt((g.spectral_weights.array() *
                                     g.spectral_nodes.array().pow(4 * sexp) * b.array().abs2())
                                        .sum());
        sob = std::max(sob, nb - na);
      }
      l4 = std::max(l4, lp_norm(g, u.values, 4.0) - lp_norm(g, us.values, 4.0));
    }
    checks.push_back({"rearrangement L2 preservation", l2err, 1e-10, true});
    checks.push_back({"rearrangement Sobolev monotonicity excess", sob, 1e-9, true});
    checks.push_back({"rearrangement L4 deficit", l4, 1e-9, true});
  }

  // Pohozaev certification for one representative pair
  {
    auto params = make_params(3, 1.0, 0.0);
    auto plan = make_plan(make_grid(3, 40.0, 512));
    auto gs = solve_Q(params, *plan, gaussian_field(plan->grid_ptr(), 1.0, 1.0));
    checks.push_back({"ground state residual (3,1)", gs.residual, 1e-10, true});
    checks.push_back({"Pohozaev id1 (3,1)", gs.pohozaev.id1_residual, 1e-8, true});
    checks.push_back({"Pohozaev id2 (3,1)", gs.pohozaev.id2_residual, 1e-8, true});
    checks.push_back({"K_{d,s} route agreement (3,1)",
                      std::abs(gs.k_gn - k_gn_from_c(params, gs.c_gn)) / gs.k_gn, 1e-6, true});
  }

  // free-flow bivariance prediction
  {
    auto params = make_params(3, 2.0, 0.0);
    auto plan = make_plan(make_grid(3, 40.0, 384));
    auto pair = build_cutoff(plan->grid_ptr(), 20.0, CutoffKind::generic);
    Field u0 = gaussian_field(plan->grid_ptr(), 1.0, 1.0, 0.3);
    EvolveOptions opts;
    opts.linear_only = true;
    opts.horizon = 0.05;
    opts.record_every = 0.01;
    opts.dt_init = 1e-3;
    auto res = evolve(u0, params, plan, pair, opts);
    double worst = 0.0;
    for (const auto& rec : res.records) {
      const double pred = free_bivariance_prediction(*plan, u0.values, pair, rec.t);
      worst = std::max(worst, std::abs(rec.v_r - pred) / pred);
    }
    checks.push_back({"free-flow bivariance law", worst, 1e-3, true});
  }

  const int failures = report(checks);
  std::printf("%s: %d/%zu checks passed\n", failures == 0 ? "OK" : "FAILED",
              static_cast<int>(checks.size()) - failures, checks.size());
  return failures == 0 ? 0 : 1;
}

int cmd_groundstate(int d, double sigma, double mu, double rmax, int n,
                    const std::string& out) {
  auto params = make_params(d, sigma, mu);
  auto plan = make_plan(make_grid(d, rmax, n));
  auto gs = solve_Q(params, *plan, gaussian_field(plan->grid_ptr(), 1.0, 1.0));
  const std::string dir = resolve_output_dir(out);
  std::filesystem::create_directories(dir);
  export_groundstate_csv(dir + "/Q.csv", gs.profile);
  nlohmann::json j;
  j["params"] = {{"d", d}, {"sigma", sigma}, {"mu", mu}, {"s_c", params.s_c}};
  j["grid"] = {{"rmax", rmax}, {"n", n}};
  j["residual"] = gs.residual;
  j["iterations"] = gs.iterations;
  j["pohozaev"] = {{"id1_residual", gs.pohozaev.id1_residual},
                   {"id2_residual", gs.pohozaev.id2_residual},
                   {"energy", gs.pohozaev.energy},
                   {"mass", gs.pohozaev.mass},
                   {"threshold_energy", gs.pohozaev.threshold_energy},
                   {"threshold_norm", gs.pohozaev.threshold_norm}};
  j["c_gn"] = gs.c_gn;
  j["k_gn"] = gs.k_gn;
  j["k_gn_from_c"] = k_gn_from_c(params, gs.c_gn);
  std::ofstream os(dir + "/groundstate.json");
  os << j.dump(2) << "\n";
  std::printf("groundstate (d=%d, sigma=%g): residual %.3e, C=%.9g, K=%.9g -> %s\n", d, sigma,
              gs.residual, gs.c_gn, gs.k_gn, dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radial spectral laboratory for the focusing biharmonic NLS"};
  app.require_subcommand(1);

  auto* gcmd = app.add_subcommand("groundstate", "solve the ground state Q and export it");
  int gd = 2;
  double gsigma = 2.0, gmu = 0.0, grmax = 40.0;
  int gn = 640;
  std::string gout = "groundstate_out";
  gcmd->add_option("--d", gd, "dimension")->required();
  gcmd->add_option("--sigma", gsigma, "nonlinearity exponent")->required();
  gcmd->add_option("--mu", gmu, "lower-order dispersion");
  gcmd->add_option("--rmax", grmax, "domain radius");
  gcmd->add_option("--n", gn, "grid size");
  gcmd->add_option("--out", gout, "output directory");

  auto* ecmd = app.add_subcommand("evolve", "run one configuration");
  std::string config_path;
  ecmd->add_option("--config", config_path, "JSON run configuration")->required();

  auto* scmd = app.add_subcommand("sweep", "run many configurations in parallel");
  std::string configs_path, table_path = "sweep_table.csv";
  int jobs = 2;
  scmd->add_option("--configs", configs_path, "JSON array of run configurations")->required();
  scmd->add_option("--jobs", jobs, "parallel runs");
  scmd->add_option("--table", table_path, "verdict table output");

  auto* vcmd = app.add_subcommand("verify", "run the certification suite");
  std::uint64_t seed = 12345;
  vcmd->add_option("--seed", seed, "seed for the randomized checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gcmd->parsed()) return cmd_groundstate(gd, gsigma, gmu, grmax, gn, gout);
    if (vcmd->parsed()) return cmd_verify(seed);
    if (ecmd->parsed()) {
      const auto t0 = std::chrono::steady_clock::now();
      RunSummary s = run_one(load_config(config_path));
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (!s.error.empty()) {
        std::fprintf(stderr, "run failed: %s\n", s.error.c_str());
        return 1;
      }
      std::printf("outcome: %s", to_string(s.verdict.outcome));
      if (s.verdict.T_estimate) std::printf("  T ~ %.6g", *s.verdict.T_estimate);
      std::printf("  (wall %.1fs) -> %s\n", wall, resolve_output_dir(s.config.output_dir).c_str());
      return 0;
    }
    if (scmd->parsed()) {
      std::ifstream is(configs_path);
      if (!is) throw std::runtime_error("cannot open " + configs_path);
      std::stringstream ss;
      ss << is.rdbuf();
      nlohmann::json arr = nlohmann::json::parse(ss.str());
      if (!arr.is_array()) throw std::runtime_error("sweep: configs file must hold a JSON array");
      std::vector<RunConfig> configs;
      for (const auto& item : arr) configs.push_back(config_from_json(item.dump()));
      auto summaries = sweep(configs, jobs);
      std::ofstream os(resolve_output_dir(table_path));
      os << sweep_table_csv(summaries);
      int failed = 0;
      for (const auto& s : summaries)
        if (!s.error.empty()) ++failed;
      std::printf("sweep: %zu runs, %d failed -> %s\n", summaries.size(), failed,
                  table_path.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
