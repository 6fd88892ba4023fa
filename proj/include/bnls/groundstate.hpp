#pragma once

#include <optional>

#include "bnls/field.hpp"
#include "bnls/params.hpp"
#include "bnls/transform.hpp"

namespace bnls {

struct PohozaevReport {
  double id1_residual = 0.0;  // | ||lap Q||^2 - d/(d+2(2-s_c)) ||Q||_{2s+2}^{2s+2} | / ||lap Q||^2
  double id2_residual = 0.0;  // | ||lap Q||^2 - d/(2(2-s_c)) ||Q||^2 | / ||lap Q||^2
  double energy = 0.0;        // E[Q] at mu = 0
  double mass = 0.0;
  double threshold_energy = 0.0;  // E[Q]^{s_c} M[Q]^{2-s_c}
  double threshold_norm = 0.0;    // ||lap Q||^{s_c} ||Q||^{2-s_c}
  double lap_l2 = 0.0;
  double lp_2s2 = 0.0;  // ||Q||_{L^{2sigma+2}}^{2sigma+2}
};

struct GroundState {
  Field profile;  // real-valued
  double residual = 0.0;
  PohozaevReport pohozaev;
  double c_gn = 0.0;  // optimal Gagliardo-Nirenberg constant C_{d,sigma} = Weinstein(Q)
  double k_gn = 0.0;  // K_{d,sigma} via the ground-state norm product
  int iterations = 0;
};

struct SolveOptions {
  double tol_s = 1e-12;      // |S - 1| convergence for the normalization factor
  double tol_resid = 1e-10;  // spectral residual of the discrete equation
  int max_iter = 10000;
};

/// Spectral-renormalization (Petviashvili) solve of lap^2 Q + Q = |Q|^{2 sigma} Q,
/// iterating Q <- S^gamma (lap^2 + 1)^{-1}(|Q|^{2 sigma} Q) with
/// S = <Q,(lap^2+1)Q> / <Q,|Q|^{2 sigma} Q> and gamma = (2 sigma + 1)/(2 sigma).
/// Requires an energy-subcritical exponent and a nonzero initial guess.
GroundState solve_Q(const Params& params, const TransformPlan& plan, const Field& init,
                    const SolveOptions& opts = {});

PohozaevReport pohozaev_report(const Field& Q, const Params& params, const TransformPlan& plan);

/// K_{d,sigma} through the Weinstein-maximum formula (4(sigma+1)/(d sigma C))^{1/sigma}.
double k_gn_from_c(const Params& params, double c_gn);

/// Weinstein functional ||u||_{2s+2}^{2s+2} / (||lap u||^{d s/2} ||u||^{2s+2-d s/2}).
double weinstein(const Field& u, const Params& params, const TransformPlan& plan);

/// Explicit energy-critical bubble W(r) = ((d(d-4)(d^2-4))^{1/4}/(1+r^2))^{(d-4)/2}, d >= 5.
Field explicit_W(int d, const GridPtr& grid);
double w_value(int d, double r);
double w_lap(int d, double r);  // analytic radial Laplacian of W

/// High-accuracy 1-D reference integral int_0^inf f(r) r^{d-1} dr (no Omega factor).
double radial_integral_analytic(int d, const std::function<double(double)>& f);

struct WReport {
  double w0 = 0.0;              // W(0)
  double elliptic_residual = 0.0;  // weighted residual of lap^2 W = |W|^{8/(d-4)} W
  double lap_norm2 = 0.0;       // ||lap W||^2 (grid part + analytic tail)
  double energy = 0.0;          // E[W]
  double poho_residual = 0.0;   // |E - (2/d) ||lap W||^2| / E
};

/// Certification of the explicit bubble against the grid machinery; the field is
/// tapered before spectral differentiation (its slow algebraic decay does not fit
/// the truncated domain) and the beyond-taper tails enter through the analytic
/// reference integrals. Truncation-limited by design.
WReport w_report(const TransformPlan& plan);

/// Fourier rearrangement u# = F^{-1}{ (F u)^* }: exact measure-space rearrangement of
/// the spectral modulus against the d-dimensional spectral measure, energy-reassigned
/// onto the spectral shells, phase discarded. Real-valued radial output.
Field fourier_rearrange(const Field& u, const TransformPlan& plan);

}  // namespace bnls
