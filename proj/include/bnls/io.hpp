#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bnls/cutoffs.hpp"
#include "bnls/diagnostics.hpp"
#include "bnls/evolution.hpp"
#include "bnls/experiments.hpp"

namespace bnls {

struct InitialData {
  std::string kind = "gaussian";  // gaussian | scaled_ground_state | from_file
  double lambda = 1.0;            // scaled_ground_state
  double amplitude = 1.0, width = 1.0, chirp = 0.0;  // gaussian
  std::string path;               // from_file
};

/// Fully serializable run configuration; round-trips through JSON bit-identically
/// (shortest round-trip decimal formatting).
struct RunConfig {
  int d = 3;
  double sigma = 2.0;
  double mu = 0.0;
  double rmax = 30.0;
  int n = 512;
  InitialData initial;
  double cutoff_R = 4.0;
  std::string cutoff_kind = "generic";
  double horizon = 1.0;
  double record_every = 0.01;
  std::string output_dir = "run";
  std::optional<double> kappa;
  std::uint64_t seed = 0;

  // integrator / detector / fit tunables (defaults echoed into the summary)
  double dt_init = 1e-3;
  double tol_drift = 1e-9;
  double tol_embed = 1e-7;
  int grow_after = 20;
  double cfl_c = 1e6;
  double dt_min = 1e-13;
  double tail_fraction = 1e-6;
  double detector_amplification = 1e3;
  double detector_t_stability = 0.01;
  int detector_min_records = 8;
  int ratefit_min_records = 30;
  double ratefit_decade = 10.0;
  double solver_tol_s = 1e-12;
  double solver_tol_resid = 1e-10;
  int solver_max_iter = 10000;
};

std::string config_to_json(const RunConfig& c);
RunConfig config_from_json(const std::string& text);  // errors name the field path
RunConfig load_config(const std::string& path);

/// Fixed CSV schema: t,mass,energy,grad_l2,lap_l2,m_r,v_r,n_r,dt.
/// Values are written with shortest round-trip decimals; read(write(x)) == x exactly.
void write_records(const std::string& path, const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_records(const std::string& path);

void export_groundstate_csv(const std::string& path, const Field& Q);
Field import_profile_csv(const std::string& path, const GridPtr& grid);

struct RunSummary {
  RunConfig config;
  std::optional<CriterionVerdict> criterion;
  BlowupVerdict verdict;
  std::optional<RateFit> rate_fit;
  std::optional<GrowthFloorFit> growth_floor;
  double mass_drift_max = 0.0;
  double energy_drift_max = 0.0;
  std::optional<double> eta0, eta0_slack;
  long steps = 0;
  double t_final = 0.0;
  std::string error;  // nonempty when the run failed
};

std::string summary_to_json(const RunSummary& s);

/// Resolve the output directory against the BNLS_OUTPUT_ROOT override.
std::string resolve_output_dir(const std::string& dir);

/// Run one configuration end to end: criterion, evolution, fits, persisted records
/// and summary. Partial outputs are removed if the run aborts.
RunSummary run_one(const RunConfig& config);

/// Parallel sweep; failures are isolated per run. Also writes sweep_table.csv and
/// the per-run outputs under each config's output_dir.
std::vector<RunSummary> sweep(const std::vector<RunConfig>& configs, int jobs = 2);

std::string sweep_table_csv(const std::vector<RunSummary>& summaries);

}  // namespace bnls
