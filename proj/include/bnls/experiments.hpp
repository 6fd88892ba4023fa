#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bnls/diagnostics.hpp"
#include "bnls/evolution.hpp"
#include "bnls/groundstate.hpp"

namespace bnls {

enum class TheoremId { T1_1, T1_3, T1_4 };
const char* to_string(TheoremId t);

/// Pure function of the initial data: which hypothesis clause applied and whether
/// it is satisfied, with every compared scalar recorded.
struct CriterionVerdict {
  TheoremId theorem = TheoremId::T1_1;
  std::string branch;
  bool satisfied = false;
  std::map<std::string, double> quantities;
  std::optional<double> kappa_used;
};

/// Theorem "blowup for the mass-supercritical case": 0 < s_c < 2, sigma <= 4.
/// mu > 0: E < 0; mu < 0: E < -kappa mu^2 M (kappa required);
/// mu = 0: E < 0, or the two ground-state product inequalities (Q required).
CriterionVerdict criterion_supercritical(const Field& u0, const Params& params,
                                         const TransformPlan& plan, const GroundState* q,
                                         std::optional<double> kappa);

/// Mass-critical criterion: s_c = 0, mu >= 0 (mu < 0 rejected); satisfied iff E < 0.
CriterionVerdict criterion_masscritical(const Field& u0, const Params& params,
                                        const TransformPlan& plan);

/// Energy-critical criterion: d >= 5, s_c = 2. The bubble thresholds E[W] and
/// ||lap W|| come from the explicit profile with analytic tails (w_report).
CriterionVerdict criterion_energycritical(const Field& u0, const Params& params,
                                          const TransformPlan& plan,
                                          std::optional<double> kappa);

struct RateFit {
  double T = 0.0;
  double beta_measured = 0.0;  // from slope s via beta = s/(2-s)
  double slope = 0.0;          // fitted d log g / d log(T-t)
  double C_fit = 0.0;
  double alpha = 0.0;          // (4-sigma)/(sigma (d-1))
  double window_lo = 0.0, window_hi = 0.0;
  int points = 0;
};

struct RateFitOptions {
  int min_records = 30;
  double decade = 10.0;  // fit over T-t in [min, decade*min]
};

/// g(t) = int_t^T (T-tau) ||lap u(tau)||^2 dtau by trailing quadrature of the records,
/// log-log fitted over the final decade of T-t.
RateFit fit_rate(const std::vector<DiagnosticsRecord>& records, double T,
                 const Params& params, const RateFitOptions& opts = {});

struct NrScalingResult {
  double a_emp = 0.0;
  double b_emp = 0.0;
  double residual = 0.0;  // rms of the regression
};

/// Evaluates N_R over the mass-preserving family u_lambda = lambda^{d/2} u(lambda x)
/// and a geometric ladder of R, then regresses log|N_R| on log R and log||lap u||.
/// Degenerate families (real data, single scale) are rejected.
NrScalingResult nr_scaling_probe(const Params& params, const TransformPlan& plan,
                                 const Field& base, const std::vector<double>& R_list,
                                 const std::vector<double>& lambda_list,
                                 CutoffKind kind = CutoffKind::generic);

struct GrowthFloorFit {
  double c = 0.0;   // fitted constant in ||lap u(t)|| >= c t^2 for t >= t0
  double t0 = 0.0;
  bool grew = false;  // ||lap u|| actually increased over the fit window
};

/// Theorem 1.3(ii) growth-floor fit on runs that did not reach finite-time detection.
GrowthFloorFit growth_floor_fit(const std::vector<DiagnosticsRecord>& records,
                                double t0_fraction = 0.25);

}  // namespace bnls
