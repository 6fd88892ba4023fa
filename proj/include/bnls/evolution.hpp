#pragma once

#include <optional>
#include <vector>

#include "bnls/cutoffs.hpp"
#include "bnls/diagnostics.hpp"
#include "bnls/field.hpp"
#include "bnls/params.hpp"
#include "bnls/transform.hpp"

namespace bnls {

enum class BlowupOutcome { blowup_detected, bounded_on_horizon, resolution_exhausted };
const char* to_string(BlowupOutcome o);

struct BlowupVerdict {
  BlowupOutcome outcome = BlowupOutcome::bounded_on_horizon;
  std::optional<double> T_estimate;       // only for blowup_detected
  std::optional<double> growth_exponent;  // fitted p in ||lap u|| ~ (T-t)^{-p}
};

struct DetectorOptions {
  double amplification = 1e3;  // ||lap u|| threshold over its initial value
  double t_stability = 0.01;   // relative agreement of T across window shifts
  int min_records = 8;
};

/// Power-law fit of the trailing records: blowup is declared when the growth
/// threshold is met and the fitted T is stable across window shifts.
BlowupVerdict detect_blowup(const std::vector<DiagnosticsRecord>& records,
                            const DetectorOptions& opts = {});

struct EvolutionState {
  double t = 0.0;
  Field u;
  double dt = 0.0;
  long step_count = 0;
  double mass_drift = 0.0;    // relative deviation from the initial mass
  double energy_drift = 0.0;  // relative deviation from the initial energy
};

struct StepControls {
  double tol_drift = 1e-9;   // per-step conservation drift (relative)
  double tol_embed = 1e-7;   // embedded lower-order error (relative)
  int grow_after = 20;       // clean steps before dt doubles
  double cfl_c = 1e6;        // dt cap cfl_c / rho_max^4
  double dt_min = 1e-13;
};

/// Exponential time differencing RK4 (Cox-Matthews) with the exact unitary linear
/// flow exp(-i (rho^4 + mu rho^2) dt) and an embedded second-order stage for the
/// local error estimate. The spectral coefficients are rebuilt whenever dt changes.
class Etdrk4 {
 public:
  /// linear_only forces the nonlinearity coefficient to zero (free flow).
  Etdrk4(PlanPtr plan, const Params& params, bool linear_only = false);

  /// One step from the spectral state; returns the embedded relative error estimate.
  double step(Eigen::VectorXcd& uhat, double dt);

  const TransformPlan& plan() const { return *plan_; }

 private:
  void coefficients(double dt);

  PlanPtr plan_;
  Params params_;
  bool linear_only_ = false;
  double dt_cached_ = -1.0;
  Eigen::VectorXcd E_, E2_, Qc_, f1_, f2_, f3_;
};

/// Single adaptive step of the full state (physical field view kept in sync).
EvolutionState step(const EvolutionState& state, const Params& params, const Etdrk4& integ);

struct EvolveOptions {
  double horizon = 1.0;
  bool linear_only = false;
  double record_every = 0.01;
  double dt_init = 1e-3;
  StepControls controls;
  DetectorOptions detector;
  double tail_fraction = 1e-6;  // spectral-tail threshold for resolution exhaustion
  long max_steps = 50'000'000;
};

struct EvolveResult {
  std::vector<DiagnosticsRecord> records;
  BlowupVerdict verdict;
  EvolutionState final_state;
};

/// Adaptive evolution with conservation monitoring; halts at the horizon, on blowup
/// detection, or on resolution exhaustion.
EvolveResult evolve(const Field& u0, const Params& params, const PlanPtr& plan,
                    const CutoffPair& pair, const EvolveOptions& opts);

}  // namespace bnls
