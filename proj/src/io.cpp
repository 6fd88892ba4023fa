#include "bnls/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "bnls/groundstate.hpp"

namespace bnls {

using nlohmann::json;

namespace {

std::string fmt_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::runtime_error("records: cannot parse number '" + s + "'");
  return x;
}

template <typename T>
T field_at(const json& j, const std::string& path) {
  const json* cur = &j;
  std::string walked;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    walked += (walked.empty() ? "" : ".") + part;
    if (!cur->contains(part))
      throw std::runtime_error("config: missing field '" + walked + "'");
    cur = &(*cur)[part];
  }
  try {
    return cur->get<T>();
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad value at '" + path + "'");
  }
}

constexpr const char* kRecordHeader = "t,mass,energy,grad_l2,lap_l2,m_r,v_r,n_r,dt";

}  // namespace

std::string config_to_json(const RunConfig& c) {
  json j;
  j["params"] = {{"d", c.d}, {"sigma", c.sigma}, {"mu", c.mu}};
  j["grid"] = {{"rmax", c.rmax}, {"n", c.n}};
  json init = {{"kind", c.initial.kind}};
  if (c.initial.kind == "scaled_ground_state") init["lambda"] = c.initial.lambda;
  if (c.initial.kind == "gaussian") {
    init["amplitude"] = c.initial.amplitude;
    init["width"] = c.initial.width;
    init["chirp"] = c.initial.chirp;
  }
  if (c.initial.kind == "from_file") init["path"] = c.initial.path;
  j["initial"] = init;
  j["cutoff"] = {{"R", c.cutoff_R}, {"kind", c.cutoff_kind}};
  j["horizon"] = c.horizon;
  j["record_every"] = c.record_every;
  j["output_dir"] = c.output_dir;
  if (c.kappa) j["kappa"] = *c.kappa;
  j["seed"] = c.seed;
  j["integrator"] = {{"dt_init", c.dt_init},     {"tol_drift", c.tol_drift},
                     {"tol_embed", c.tol_embed}, {"grow_after", c.grow_after},
                     {"cfl_c", c.cfl_c},         {"dt_min", c.dt_min},
                     {"tail_fraction", c.tail_fraction}};
  j["detector"] = {{"amplification", c.detector_amplification},
                   {"t_stability", c.detector_t_stability},
                   {"min_records", c.detector_min_records}};
  j["rate_fit"] = {{"min_records", c.ratefit_min_records}, {"decade", c.ratefit_decade}};
  j["solver"] = {{"tol_s", c.solver_tol_s},
                 {"tol_resid", c.solver_tol_resid},
                 {"max_iter", c.solver_max_iter}};
  return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig c;
  c.d = field_at<int>(j, "params.d");
  c.sigma = field_at<double>(j, "params.sigma");
  c.mu = field_at<double>(j, "params.mu");
  c.rmax = field_at<double>(j, "grid.rmax");
  c.n = field_at<int>(j, "grid.n");
  c.initial.kind = field_at<std::string>(j, "initial.kind");
  if (c.initial.kind == "scaled_ground_state") {
    c.initial.lambda = field_at<double>(j, "initial.lambda");
  } else if (c.initial.kind == "gaussian") {
    c.initial.amplitude = field_at<double>(j, "initial.amplitude");
    c.initial.width = field_at<double>(j, "initial.width");
    c.initial.chirp = field_at<double>(j, "initial.chirp");
  } else if (c.initial.kind == "from_file") {
    c.initial.path = field_at<std::string>(j, "initial.path");
  } else {
    throw std::runtime_error("config: unknown initial.kind '" + c.initial.kind + "'");
  }
  c.cutoff_R = field_at<double>(j, "cutoff.R");
  c.cutoff_kind = field_at<std::string>(j, "cutoff.kind");
  if (c.cutoff_kind != "generic" && c.cutoff_kind != "appendixB")
    throw std::runtime_error("config: unknown cutoff.kind '" + c.cutoff_kind + "'");
  c.horizon = field_at<double>(j, "horizon");
  c.record_every = field_at<double>(j, "record_every");
  c.output_dir = field_at<std::string>(j, "output_dir");
  if (j.contains("kappa")) c.kappa = j["kappa"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("integrator")) {
    c.dt_init = field_at<double>(j, "integrator.dt_init");
    c.tol_drift = field_at<double>(j, "integrator.tol_drift");
    c.tol_embed = field_at<double>(j, "integrator.tol_embed");
    c.grow_after = field_at<int>(j, "integrator.grow_after");
    c.cfl_c = field_at<double>(j, "integrator.cfl_c");
    c.dt_min = field_at<double>(j, "integrator.dt_min");
    c.tail_fraction = field_at<double>(j, "integrator.tail_fraction");
  }
  if (j.contains("detector")) {
    c.detector_amplification = field_at<double>(j, "detector.amplification");
    c.detector_t_stability = field_at<double>(j, "detector.t_stability");
    c.detector_min_records = field_at<int>(j, "detector.min_records");
  }
  if (j.contains("rate_fit")) {
    c.ratefit_min_records = field_at<int>(j, "rate_fit.min_records");
    c.ratefit_decade = field_at<double>(j, "rate_fit.decade");
  }
  if (j.contains("solver")) {
    c.solver_tol_s = field_at<double>(j, "solver.tol_s");
    c.solver_tol_resid = field_at<double>(j, "solver.tol_resid");
    c.solver_max_iter = field_at<int>(j, "solver.max_iter");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json(ss.str());
}

void write_records(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_records: cannot open " + path);
  os << kRecordHeader << "\n";
  for (const auto& r : records) {
    os << fmt_double(r.t) << ',' << fmt_double(r.mass) << ',' << fmt_double(r.energy) << ','
       << fmt_double(r.grad_l2) << ',' << fmt_double(r.lap_l2) << ',' << fmt_double(r.m_r)
       << ',' << fmt_double(r.v_r) << ',' << fmt_double(r.n_r) << ',' << fmt_double(r.dt)
       << "\n";
  }
}

std::vector<DiagnosticsRecord> read_records(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_records: cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_records: empty file");
  if (line != kRecordHeader) {
    // name the offending column
    std::stringstream got(line), want(kRecordHeader);
    std::string a, b;
    while (true) {
      const bool ga = static_cast<bool>(std::getline(got, a, ','));
      const bool gb = static_cast<bool>(std::getline(want, b, ','));
      if (!ga && !gb) break;
      if (!gb) throw std::runtime_error("read_records: unexpected column '" + a + "'");
      if (!ga) throw std::runtime_error("read_records: missing column '" + b + "'");
      if (a != b) throw std::runtime_error("read_records: unexpected column '" + a + "'");
    }
    throw std::runtime_error("read_records: schema mismatch");
  }
  std::vector<DiagnosticsRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double vals[9];
    for (int i = 0; i < 9; ++i) {
      if (!std::getline(ss, cell, ','))
        throw std::runtime_error("read_records: truncated row");
      vals[i] = parse_double(cell);
    }
    if (std::getline(ss, cell, ','))
      throw std::runtime_error("read_records: extra column in row");
    DiagnosticsRecord r;
    r.t = vals[0]; r.mass = vals[1]; r.energy = vals[2]; r.grad_l2 = vals[3];
    r.lap_l2 = vals[4]; r.m_r = vals[5]; r.v_r = vals[6]; r.n_r = vals[7]; r.dt = vals[8];
    out.push_back(r);
  }
  return out;
}

void export_groundstate_csv(const std::string& path, const Field& Q) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("export_groundstate_csv: cannot open " + path);
  os << "r,re,im\n";
  for (int k = 0; k < Q.n(); ++k) {
    os << fmt_double(Q.grid->nodes(k)) << ',' << fmt_double(Q.values(k).real()) << ','
       << fmt_double(Q.values(k).imag()) << "\n";
  }
}

Field import_profile_csv(const std::string& path, const GridPtr& grid) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("import_profile_csv: cannot open " + path);
  std::string line;
  std::getline(is, line);
  if (line != "r,re,im") throw std::runtime_error("import_profile_csv: bad header");
  Field u(grid);
  int k = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (k >= grid->n) throw std::runtime_error("import_profile_csv: too many rows");
    std::stringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    const double r = parse_double(a);
    if (std::abs(r - grid->nodes(k)) > 1e-10 * (1.0 + grid->nodes(k)))
      throw std::runtime_error("import_profile_csv: node mismatch (re-export on this grid)");
    u.values(k) = Cplx(parse_double(b), parse_double(c));
    ++k;
  }
  if (k != grid->n) throw std::runtime_error("import_profile_csv: too few rows");
  return u;
}

namespace {

json verdict_json(const CriterionVerdict& v) {
  json q = json::object();
  for (const auto& [k, x] : v.quantities) q[k] = x;
  json out = {{"theorem", to_string(v.theorem)},
              {"branch", v.branch},
              {"satisfied", v.satisfied},
              {"quantities", q}};
  if (v.kappa_used) out["kappa_used"] = *v.kappa_used;
  return out;
}

}  // namespace

std::string summary_to_json(const RunSummary& s) {
  json j;
  j["config"] = json::parse(config_to_json(s.config));
  j["numerics"] = {{"prefix_order", 10},
                   {"weight_correction_nodes", 12},
                   {"weight_moments", 4},
                   {"eta0_grid", 10000},
                   {"petviashvili_gamma", (2.0 * s.config.sigma + 1.0) / (2.0 * s.config.sigma)},
                   {"strauss_constant", 2.0}};
  if (!s.error.empty()) {
    j["error"] = s.error;
    return j.dump(2);
  }
  if (s.criterion) j["criterion"] = verdict_json(*s.criterion);
  json ev = {{"outcome", to_string(s.verdict.outcome)}};
  if (s.verdict.T_estimate) ev["T_estimate"] = *s.verdict.T_estimate;
  if (s.verdict.growth_exponent) ev["growth_exponent"] = *s.verdict.growth_exponent;
  j["evolution"] = ev;
  if (s.rate_fit) {
    j["rate_fit"] = {{"T", s.rate_fit->T},
                     {"slope", s.rate_fit->slope},
                     {"beta_measured", s.rate_fit->beta_measured},
                     {"C_fit", s.rate_fit->C_fit},
                     {"alpha", s.rate_fit->alpha},
                     {"window_lo", s.rate_fit->window_lo},
                     {"window_hi", s.rate_fit->window_hi},
                     {"points", s.rate_fit->points}};
  }
  if (s.growth_floor) {
    j["growth_floor"] = {{"c", s.growth_floor->c},
                         {"t0", s.growth_floor->t0},
                         {"grew", s.growth_floor->grew}};
  }
  j["conservation"] = {{"mass_drift_max", s.mass_drift_max},
                       {"energy_drift_max", s.energy_drift_max}};
  json cut = {{"kind", s.config.cutoff_kind}, {"R", s.config.cutoff_R}};
  if (s.eta0) cut["eta0"] = *s.eta0;
  if (s.eta0_slack) cut["eta0_slack"] = *s.eta0_slack;
  j["cutoff"] = cut;
  j["steps"] = s.steps;
  j["t_final"] = s.t_final;
  j["version"] = "bnls 0.1.0";
  return j.dump(2);
}

std::string resolve_output_dir(const std::string& dir) {
  const char* root = std::getenv("BNLS_OUTPUT_ROOT");
  if (root != nullptr && dir.front() != '/') {
    return std::string(root) + "/" + dir;
  }
  return dir;
}

RunSummary run_one(const RunConfig& config) {
  RunSummary s;
  s.config = config;
  const std::string dir = resolve_output_dir(config.output_dir);
  std::filesystem::create_directories(dir);
  const std::string records_path = dir + "/records.csv";
  const std::string summary_path = dir + "/summary.json";

  try {
    auto params = make_params(config.d, config.sigma, config.mu);
    auto grid = make_grid(config.d, config.rmax, config.n);
    auto plan = make_plan(grid);
    const CutoffKind kind =
        config.cutoff_kind == "generic" ? CutoffKind::generic : CutoffKind::appendixB;
    CutoffPair pair = build_cutoff(grid, config.cutoff_R, kind);
    s.eta0 = pair.eta0;
    s.eta0_slack = pair.eta0_slack;

    SolveOptions sopts;
    sopts.tol_s = config.solver_tol_s;
    sopts.tol_resid = config.solver_tol_resid;
    sopts.max_iter = config.solver_max_iter;

    Field u0(grid);
    std::optional<GroundState> gs;
    if (config.initial.kind == "gaussian") {
      u0 = gaussian_field(grid, config.initial.amplitude, config.initial.width,
                          config.initial.chirp);
    } else if (config.initial.kind == "scaled_ground_state") {
      gs = solve_Q(params, *plan, gaussian_field(grid, 1.0, 1.0), sopts);
      u0 = gs->profile;
      u0.values *= config.initial.lambda;
    } else {
      u0 = import_profile_csv(config.initial.path, grid);
    }

    // criterion of the initial data
    try {
      if (params.criticality == Criticality::mass_critical && params.mu >= 0.0) {
        s.criterion = criterion_masscritical(u0, params, *plan);
      } else if (params.criticality == Criticality::energy_critical) {
        s.criterion = criterion_energycritical(u0, params, *plan, config.kappa);
      } else if (params.s_c > 0.0 && params.s_c < 2.0 && params.sigma <= 4.0) {
        if (params.mu == 0.0 && !gs &&
            energy(*plan, u0.values, params) >= 0.0) {
          gs = solve_Q(params, *plan, gaussian_field(grid, 1.0, 1.0), sopts);
        }
        s.criterion = criterion_supercritical(u0, params, *plan, gs ? &*gs : nullptr,
                                              config.kappa);
      }
    } catch (const std::invalid_argument&) {
      // criterion inapplicable for this configuration; leave it empty
    }

    EvolveOptions eopts;
    eopts.horizon = config.horizon;
    eopts.record_every = config.record_every;
    eopts.dt_init = config.dt_init;
    eopts.controls.tol_drift = config.tol_drift;
    eopts.controls.tol_embed = config.tol_embed;
    eopts.controls.grow_after = config.grow_after;
    eopts.controls.cfl_c = config.cfl_c;
    eopts.controls.dt_min = config.dt_min;
    eopts.tail_fraction = config.tail_fraction;
    eopts.detector.amplification = config.detector_amplification;
    eopts.detector.t_stability = config.detector_t_stability;
    eopts.detector.min_records = config.detector_min_records;

    auto res = evolve(u0, params, plan, pair, eopts);
    s.verdict = res.verdict;
    s.mass_drift_max = res.final_state.mass_drift;
    s.energy_drift_max = res.final_state.energy_drift;
    s.steps = res.final_state.step_count;
    s.t_final = res.final_state.t;

    if (res.verdict.outcome == BlowupOutcome::blowup_detected && res.verdict.T_estimate) {
      RateFitOptions ropts;
      ropts.min_records = config.ratefit_min_records;
      ropts.decade = config.ratefit_decade;
      try {
        s.rate_fit = fit_rate(res.records, *res.verdict.T_estimate, params, ropts);
      } catch (const std::exception&) {
      }
    }
    if (params.criticality == Criticality::mass_critical && params.mu == 0.0 &&
        s.criterion && s.criterion->satisfied &&
        res.verdict.outcome != BlowupOutcome::blowup_detected) {
      try {
        s.growth_floor = growth_floor_fit(res.records);
      } catch (const std::exception&) {
      }
    }

    write_records(records_path, res.records);
    std::ofstream os(summary_path);
    os << summary_to_json(s) << "\n";
  } catch (const std::exception& e) {
    std::filesystem::remove(records_path);
    std::filesystem::remove(summary_path);
    s.error = e.what();
  }
  return s;
}

std::vector<RunSummary> sweep(const std::vector<RunConfig>& configs, int jobs) {
  std::vector<RunSummary> out(configs.size());
  const int J = std::max(1, jobs);
  size_t next = 0;
  while (next < configs.size()) {
    std::vector<std::pair<size_t, std::future<RunSummary>>> wave;
    for (int j = 0; j < J && next < configs.size(); ++j, ++next) {
      wave.emplace_back(next, std::async(std::launch::async,
                                         [&configs, i = next] { return run_one(configs[i]); }));
    }
    for (auto& [i, fut] : wave) out[i] = fut.get();
  }
  return out;
}

std::string sweep_table_csv(const std::vector<RunSummary>& summaries) {
  std::ostringstream os;
  os << "config_id,theorem,branch,satisfied,outcome,T_estimate,beta_measured,alpha\n";
  for (size_t i = 0; i < summaries.size(); ++i) {
    const RunSummary& s = summaries[i];
    os << i << ',';
    if (!s.error.empty()) {
      os << ",,,error,,,\n";
      continue;
    }
    if (s.criterion) {
      os << to_string(s.criterion->theorem) << ',' << s.criterion->branch << ','
         << (s.criterion->satisfied ? "true" : "false") << ',';
    } else {
      os << ",,,";
    }
    os << to_string(s.verdict.outcome) << ',';
    if (s.verdict.T_estimate) os << fmt_double(*s.verdict.T_estimate);
    os << ',';
    if (s.rate_fit) os << fmt_double(s.rate_fit->beta_measured);
    os << ',';
    if (s.rate_fit) os << fmt_double(s.rate_fit->alpha);
    os << "\n";
  }
  return os.str();
}

}  // namespace bnls
