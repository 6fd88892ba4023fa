#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>

#include "bnls/grid.hpp"

namespace bnls {

enum class CutoffKind { generic, appendixB };
const char* to_string(CutoffKind k);

/// Sampled virial cutoff phi_R and bivariance cutoff psi_R (psi'_R = sqrt(2 phi_R))
/// with radial derivatives of orders 0..6 at the grid nodes. Both kinds satisfy
/// phi_R = r^2/2 for r <= R and phi_R'' <= 1; the generic kind additionally has
/// phi_R == 0 (hence grad psi_R == 0) for r >= 10R, while the appendixB kind keeps
/// the positive plateau required by its eta_0 inequality and plateaus psi' instead.
struct CutoffPair {
  GridPtr grid;
  double R = 0.0;
  CutoffKind kind = CutoffKind::generic;

  // column j = j-th radial derivative sampled at the nodes
  Eigen::MatrixXd phi;  // n x 7
  Eigen::MatrixXd psi;  // n x 7; empty until build_psi

  bool complete() const { return psi.size() > 0; }

  // construction metadata
  double glide_end = 0.0;  // appendixB: landing radius of the phi' glide branch (unit scale)
  double plateau = 0.0;    // unit-scale phi value for r >= 10

  std::optional<double> eta0;        // verified margin constant (appendixB)
  std::optional<double> eta0_slack;  // minimal slack of the eta0 inequality
  std::optional<double> eta0_sup;    // largest grid-valid eta0
};

CutoffPair build_phi(const GridPtr& grid, double R, CutoffKind kind);
void build_psi(CutoffPair& pair);
CutoffPair build_cutoff(const GridPtr& grid, double R, CutoffKind kind);  // both steps

struct CutoffVerification {
  double margin_one_minus_phipp = 0.0;  // min over nodes and fine grid of 1 - phi''
  double margin_one_minus_phir = 0.0;   // min of 1 - phi'/r
  double margin_lap = 0.0;              // min of d - lap phi
  double psi_identity_err = 0.0;        // max |phi' - psi'' psi'| (unit-normalized by R)
  double worst_radius = 0.0;
  std::optional<double> eta0, eta0_slack, eta0_sup;
  bool ok = false;
};

/// Checks the sign inequalities at all nodes and on a fine unit-scale grid; for the
/// appendixB kind also certifies an eta_0 > 0 for
///   1 - phi'' - eta0 { 4 (lap^2 phi + 4 d_r^2 lap phi)^2
///                      + (8d/(4+d))^{d/2} (d - lap phi)^{d/2} } >= 0.
/// Throws on a negative margin, reporting the offending radius.
CutoffVerification verify_cutoff(const CutoffPair& pair, int d);

/// B_R(r) = (8d/(4+d)) (d - lap phi_R)(r) sampled at the nodes; >= 0, == 0 for r <= R.
Eigen::VectorXd b_r_profile(const CutoffPair& pair, int d);

/// Unit-profile evaluation (phi_R(r) = R^2 phi(r/R)); der in 0..6.
double cutoff_phi_unit(CutoffKind kind, double x, int der);
double cutoff_psi_unit(CutoffKind kind, double x, int der);

/// r, phi..phi6, psi..psi6 as CSV.
void export_cutoff_csv(const CutoffPair& pair, const std::string& path);

}  // namespace bnls
