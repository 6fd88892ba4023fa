#pragma once

#include "bnls/cutoffs.hpp"
#include "bnls/field.hpp"
#include "bnls/norms.hpp"
#include "bnls/params.hpp"
#include "bnls/transform.hpp"

namespace bnls {

/// One time sample of an evolution run. v_r and n_r are NaN for d < 3.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double grad_l2 = 0.0;
  double lap_l2 = 0.0;
  double m_r = 0.0;
  double v_r = 0.0;
  double n_r = 0.0;
  double dt = 0.0;
};

double mass(const TransformPlan& plan, const Eigen::VectorXcd& u);

/// E[u] = 1/2 ||lap u||^2 + mu/2 ||grad u||^2 - 1/(2s+2) ||u||_{2s+2}^{2s+2}.
double energy(const TransformPlan& plan, const Eigen::VectorXcd& u, const Params& params);

/// M_R[u] = 2 Im int conj(u) phi_R' d_r u dx.
double localized_virial(const TransformPlan& plan, const Eigen::VectorXcd& u,
                        const CutoffPair& pair);

/// V_R[u] = || |grad|^{-1}(grad psi_R u) ||^2, through the shifted-order transform
/// (tail antiderivative of psi_R' u, then the Plancherel sum). d >= 3.
double riesz_bivariance(const TransformPlan& plan, const Eigen::VectorXcd& u,
                        const CutoffPair& pair);

/// Quadrature double-integral oracle for V_R via the l=1 Newton kernel.
double riesz_bivariance_oracle(const TransformPlan& plan, const Eigen::VectorXcd& u,
                               const CutoffPair& pair);

/// N_R[u] = -2 Im int conj(u) psi_R' (-lap)^{-1}(psi_R' |u|^{2s} u) dx.  d >= 3.
double commutator_NR(const TransformPlan& plan, const Eigen::VectorXcd& u,
                     const CutoffPair& pair, const Params& params);

struct VirialRhs {
  double main = 0.0;       // 4 d s E - (2 d s - 8)||lap u||^2 - (2 d s - 4) mu ||grad u||^2
  double x_mu = 0.0;       // -4 mu int (1 - phi_R'') |d_r u|^2
  double budget = 0.0;     // certified bound on the remaining cutoff error terms
  double correction_nl = 0.0;  // -(2s/(s+1)) int (lap phi_R - d)|u|^{2s+2} (exact)
  double exact_rhs = 0.0;  // the full identity for d/dt M_R[u], all terms evaluated
};

/// Lemma-form right-hand side with an explicitly certified error budget
///   budget = (4 c3 + 2 c4) R^{-2} ||grad u||^2 + c6 R^{-4} M + |mu| c4 R^{-2} M
///            + (2s/(s+1)) cL 2^{2s} M^{1+s/2} ||grad u||^s R^{-s(d-1)}
/// with unit-profile sup constants c3 = sup|d_r^2 lap phi|, c4 = sup|lap^2 phi|,
/// c6 = sup|lap^3 phi|, cL = sup|d - lap phi| and the Strauss constant 2.
VirialRhs virial_rhs(const TransformPlan& plan, const Eigen::VectorXcd& u,
                     const CutoffPair& pair, const Params& params);

struct StraussMargin {
  double h1 = 0.0;  // min over nodes of 2 ||u||^{1/2} ||grad u||^{1/2} - r^{(d-1)/2}|u|
  double h2 = 0.0;  // same with 2 ||u||^{3/4} ||lap u||^{1/4}
};
StraussMargin strauss_margin(const TransformPlan& plan, const Eigen::VectorXcd& u);

/// Closed-form free-flow law V(0) + 4 M(0) t + 16 ||lap u0||^2 t^2.
double free_bivariance_prediction(const TransformPlan& plan, const Eigen::VectorXcd& u0,
                                  const CutoffPair& pair, double t);

DiagnosticsRecord make_record(const TransformPlan& plan, const CutoffPair& pair,
                              const Params& params, double t, double dt,
                              const Eigen::VectorXcd& u);

}  // namespace bnls
