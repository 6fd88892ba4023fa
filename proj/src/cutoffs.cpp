#include "bnls/cutoffs.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace bnls {

const char* to_string(CutoffKind k) {
  return k == CutoffKind::generic ? "generic" : "appendixB";
}

namespace {

// ---- small dense polynomial helpers (ascending coefficients) ---------------

double poly_eval(const std::vector<double>& c, double x, int der) {
  const int n = static_cast<int>(c.size());
  if (der >= n) return 0.0;
  double acc = 0.0;
  for (int j = n - 1; j >= der; --j) {
    double f = 1.0;
    for (int m = 0; m < der; ++m) f *= (j - m);
    acc = acc * x + f * c[j];
  }
  return acc;
}

std::vector<double> poly_antiderivative(const std::vector<double>& c) {
  std::vector<double> out(c.size() + 1, 0.0);
  for (size_t j = 0; j < c.size(); ++j) out[j + 1] = c[j] / static_cast<double>(j + 1);
  return out;
}

// C^6 smoothstep on [0,1]: S6(0)=0, S6(1)=1, first six derivatives vanish at both ends.
const std::vector<double> kS6 = [] {
  std::vector<double> c(14, 0.0);
  c[7] = 1716.0; c[8] = -9009.0; c[9] = 20020.0; c[10] = -24024.0;
  c[11] = 16380.0; c[12] = -6006.0; c[13] = 924.0;
  return c;
}();
const std::vector<double> kS6I = poly_antiderivative(kS6);    // int_0^x S6 ; kS6I(1) = 1/2
const std::vector<double> kS6II = poly_antiderivative(kS6I);  // double integral

// ---- generic profile: p = psi' built first, phi = p^2/2 --------------------
//
// q := 1 - p' ramps 0 -> q0 over [1,3], holds q0 on [3,t], then returns to 1 over
// [t,10] with C^6 junctions; q0 and t are chosen so that p(10) = 0:
//   q0 + q0 (t-3) + (10-t)(q0+1)/2 = 10  with q0 = 27/20  =>  t = 38/7.
// This keeps phi'' = p'^2 + p p'' <= 1 with margin outside r <= 1 (verified on a
// fine grid) and makes sqrt(phi) = p/sqrt(2) exactly as smooth as p.

constexpr double kQ0 = 27.0 / 20.0;
constexpr double kT = 38.0 / 7.0;

double generic_q(double r, int der) {
  if (r <= 1.0 || r >= 10.0) {
    if (der == 0) return (r >= 10.0) ? 1.0 : 0.0;
    return 0.0;
  }
  if (r <= 3.0) {
    const double sc = 0.5;
    return kQ0 * poly_eval(kS6, (r - 1.0) * sc, der) * std::pow(sc, der);
  }
  if (r <= kT) return der == 0 ? kQ0 : 0.0;
  const double L = 10.0 - kT;
  const double x = (r - kT) / L;
  if (der == 0) return 1.0 + (kQ0 - 1.0) * (1.0 - poly_eval(kS6, x, 0));
  return -(kQ0 - 1.0) * poly_eval(kS6, x, der) / std::pow(L, der);
}

// p and its derivatives 0..6
double generic_p(double r, int der) {
  if (r >= 10.0) return 0.0;
  if (der == 1) return (r <= 1.0) ? 1.0 : 1.0 - generic_q(r, 0);
  if (der >= 2) return (r <= 1.0) ? 0.0 : -generic_q(r, der - 1);
  if (r <= 1.0) return r;
  if (r <= 3.0) {
    const double x = (r - 1.0) / 2.0;
    return r - 2.0 * kQ0 * poly_eval(kS6I, x, 0);
  }
  if (r <= kT) return (3.0 - kQ0) + (1.0 - kQ0) * (r - 3.0);
  // descent, cancellation-free: p(r) = int_r^10 (q - 1) ds >= 0
  const double L = 10.0 - kT;
  const double x = (r - kT) / L;
  return (kQ0 - 1.0) * L * ((1.0 - x) - 0.5 + poly_eval(kS6I, x, 0));
}

// P = int_0^x p (psi at unit scale)
double generic_P(double r) {
  if (r <= 1.0) return 0.5 * r * r;
  if (r <= 3.0) {
    const double x = (r - 1.0) / 2.0;
    return 0.5 + 0.5 * (r * r - 1.0) - 4.0 * kQ0 * poly_eval(kS6II, x, 0);
  }
  const double P3 = 0.5 + 0.5 * 8.0 - 4.0 * kQ0 * poly_eval(kS6II, 1.0, 0);
  if (r <= kT) {
    const double s = r - 3.0;
    return P3 + (3.0 - kQ0) * s + 0.5 * (1.0 - kQ0) * s * s;
  }
  const double st = kT - 3.0;
  const double Pt = P3 + (3.0 - kQ0) * st + 0.5 * (1.0 - kQ0) * st * st;
  const double L = 10.0 - kT;
  const double x = std::min((r - kT) / L, 1.0);
  return Pt + (kQ0 - 1.0) * L * L * (0.5 * x - 0.5 * x * x + poly_eval(kS6II, x, 0));
}

// 1 - phi'' for the generic profile without cancellation:
//   1 - p'^2 - p p'' = q (2 - q) + p q'.
double generic_one_minus_phipp(double r) {
  if (r <= 1.0) return 0.0;
  if (r >= 10.0) return 1.0;
  const double q = generic_q(r, 0);
  return q * (2.0 - q) + generic_p(r, 0) * generic_q(r, 1);
}

// ---- appendix B profile -----------------------------------------------------
//
// phi'(r) = r for r <= 1, r - (r-1)^6 up to r1 = 1 + 6^{-1/5}, then a monotone C^6
// glide (degree-11 Hermite in s = r - r1) down to 0 at glide_end <= 10, 0 beyond.

const double kR1 = 1.0 + std::pow(6.0, -0.2);

struct AppxB {
  std::vector<double> glide;   // polynomial in s = r - r1
  std::vector<double> glideI;  // its antiderivative
  double glide_end = 0.0;      // absolute radius where phi' lands at 0
  double phi_r1 = 0.0;         // phi(r1)
  double plateau = 0.0;        // phi(glide_end) = phi(10)
};

std::vector<double> solve_glide(double s2) {
  const double e1 = std::pow(6.0, -0.2);
  const std::array<double, 6> gl = {kR1 - std::pow(6.0, -1.2),
                                    0.0,
                                    -30.0 * std::pow(e1, 4),
                                    -120.0 * std::pow(e1, 3),
                                    -360.0 * e1 * e1,
                                    -720.0 * e1};
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(12, 12);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(12);
  auto fact = [](int j, int k) {
    double f = 1.0;
    for (int m = 0; m < k; ++m) f *= (j - m);
    return f;
  };
  for (int k = 0; k < 6; ++k) {
    A(k, k) = fact(k, k);
    b(k) = gl[k];
  }
  for (int k = 0; k < 6; ++k) {
    for (int j = k; j < 12; ++j) A(6 + k, j) = fact(j, k) * std::pow(s2, j - k);
    b(6 + k) = 0.0;
  }
  Eigen::VectorXd c = A.fullPivLu().solve(b);
  return std::vector<double>(c.data(), c.data() + 12);
}

const AppxB& appxb_profile() {
  static const AppxB prof = [] {
    AppxB P;
    // deterministic calibration: longest landing length whose glide stays
    // nonnegative and nonincreasing on a fine scan (tamer derivatives)
    for (double s2 : {3.2, 2.8, 2.4, 2.0, 1.7, 1.45, 1.15, 0.85, 0.70, 0.55}) {
      std::vector<double> c = solve_glide(s2);
      bool ok = true;
      for (int i = 0; i <= 20000; ++i) {
        const double s = s2 * i / 20000.0;
        if (poly_eval(c, s, 0) < -1e-12 || poly_eval(c, s, 1) > 1e-10) {
          ok = false;
          break;
        }
      }
      if (ok) {
        P.glide = c;
        P.glide_end = kR1 + s2;
        break;
      }
    }
    if (P.glide.empty()) throw std::runtime_error("appendixB: no valid glide branch");
    P.glideI = poly_antiderivative(P.glide);
    P.phi_r1 = 0.5 + 0.5 * (kR1 * kR1 - 1.0) - std::pow(kR1 - 1.0, 7) / 7.0;
    P.plateau = P.phi_r1 + poly_eval(P.glideI, P.glide_end - kR1, 0);
    return P;
  }();
  return prof;
}

double appxb_phip(double r, int der) {  // derivatives of phi' (orders 0..5 needed)
  const AppxB& P = appxb_profile();
  if (r <= 1.0) {
    if (der == 0) return r;
    return der == 1 ? 1.0 : 0.0;
  }
  if (r <= kR1) {
    const double e = r - 1.0;
    double pw = 1.0;  // d^der (r - e^6)
    switch (der) {
      case 0: return r - std::pow(e, 6);
      case 1: return 1.0 - 6.0 * std::pow(e, 5);
      case 2: return -30.0 * std::pow(e, 4);
      case 3: return -120.0 * std::pow(e, 3);
      case 4: return -360.0 * e * e;
      case 5: return -720.0 * e;
      default: return -720.0 * pw;
    }
  }
  if (r <= P.glide_end) return poly_eval(P.glide, r - kR1, der);
  return 0.0;
}

double appxb_phi(double r, int der) {  // orders 0..6
  if (der >= 1) return appxb_phip(r, der - 1);
  const AppxB& P = appxb_profile();
  if (r <= 1.0) return 0.5 * r * r;
  if (r <= kR1) return 0.5 + 0.5 * (r * r - 1.0) - std::pow(r - 1.0, 7) / 7.0;
  if (r <= P.glide_end) return P.phi_r1 + poly_eval(P.glideI, r - kR1, 0);
  return P.plateau;
}

double appxb_one_minus_phipp(double r) {
  if (r <= 1.0) return 0.0;
  if (r <= kR1) return 6.0 * std::pow(r - 1.0, 5);
  if (r <= appxb_profile().glide_end) return 1.0 - poly_eval(appxb_profile().glide, r - kR1, 1);
  return 1.0;
}

// cumulative int_0^r sqrt(2 phi) for the appendixB kind, via per-piece Gauss-Legendre
double appxb_psi(double r) {
  const AppxB& P = appxb_profile();
  static const auto gl = [] {
    // 40-point Gauss-Legendre on [0,1]
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(40, 40);
    for (int i = 1; i < 40; ++i) {
      double bq = i / std::sqrt(4.0 * i * i - 1.0);
      J(i, i - 1) = bq;
      J(i - 1, i) = bq;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    std::pair<Eigen::VectorXd, Eigen::VectorXd> out;
    out.first = (es.eigenvalues().array() + 1.0) / 2.0;
    out.second = es.eigenvectors().row(0).array().square();
    return out;
  }();
  auto seg = [&](double a, double b) {
    double acc = 0.0;
    for (int q = 0; q < 40; ++q) {
      const double x = a + (b - a) * gl.first(q);
      acc += gl.second(q) * std::sqrt(2.0 * appxb_phi(x, 0));
    }
    return acc * (b - a);
  };
  if (r <= 1.0) return 0.5 * r * r;
  static const double psi1 = 0.5;
  static const double psiR1 = psi1 + seg(1.0, kR1);
  if (r <= kR1) return psi1 + seg(1.0, r);
  static const double psiG = psiR1 + seg(kR1, appxb_profile().glide_end);
  if (r <= P.glide_end) return psiR1 + seg(kR1, r);
  return psiG + std::sqrt(2.0 * P.plateau) * (r - P.glide_end);
}

// derivatives 1..6 of psi for appendixB via y = sqrt(2 phi), y y' = phi', etc.
void appxb_psi_derivs(double r, std::array<double, 7>& out) {
  out[0] = appxb_psi(r);
  if (r <= 1.0) {
    out[1] = r; out[2] = 1.0;
    for (int j = 3; j <= 6; ++j) out[j] = 0.0;
    return;
  }
  const AppxB& P = appxb_profile();
  if (r >= P.glide_end) {
    out[1] = std::sqrt(2.0 * P.plateau);
    for (int j = 2; j <= 6; ++j) out[j] = 0.0;
    return;
  }
  std::array<double, 6> f{};  // phi derivatives 0..5
  for (int j = 0; j <= 5; ++j) f[j] = appxb_phi(r, j);
  const double y = std::sqrt(2.0 * f[0]);
  const double y1 = f[1] / y;
  const double y2 = (f[2] - y1 * y1) / y;
  const double y3 = (f[3] - 3.0 * y1 * y2) / y;
  const double y4 = (f[4] - 4.0 * y1 * y3 - 3.0 * y2 * y2) / y;
  const double y5 = (f[5] - 5.0 * y1 * y4 - 10.0 * y2 * y3) / y;
  out[1] = y; out[2] = y1; out[3] = y2; out[4] = y3; out[5] = y4; out[6] = y5;
}

}  // namespace

double cutoff_phi_unit(CutoffKind kind, double x, int der) {
  if (kind == CutoffKind::appendixB) return appxb_phi(x, der);
  if (der == 0) {
    const double p = generic_p(x, 0);
    return 0.5 * p * p;
  }
  // Leibniz on p^2/2
  double acc = 0.0;
  double binom = 1.0;
  for (int i = 0; i <= der; ++i) {
    acc += binom * generic_p(x, i) * generic_p(x, der - i);
    binom = binom * (der - i) / (i + 1.0);
  }
  return 0.5 * acc;
}

double cutoff_psi_unit(CutoffKind kind, double x, int der) {
  if (kind == CutoffKind::generic) {
    if (der == 0) return generic_P(x);
    return generic_p(x, der - 1);
  }
  std::array<double, 7> tmp{};
  appxb_psi_derivs(x, tmp);
  return tmp[der];
}

namespace {

double one_minus_phipp_unit(CutoffKind kind, double x) {
  return kind == CutoffKind::generic ? generic_one_minus_phipp(x) : appxb_one_minus_phipp(x);
}

// 1 - phi'(x)/x without cancellation in the inner region
double one_minus_phir_unit(CutoffKind kind, double x) {
  if (x <= 1.0) return 0.0;
  return 1.0 - cutoff_phi_unit(kind, x, 1) / x;
}

}  // namespace

CutoffPair build_phi(const GridPtr& grid, double R, CutoffKind kind) {
  if (!(R > 0.0)) throw std::invalid_argument("build_phi: R must be > 0");
  CutoffPair pair;
  pair.grid = grid;
  pair.R = R;
  pair.kind = kind;
  const int n = grid->n;
  pair.phi.resize(n, 7);
  for (int k = 0; k < n; ++k) {
    const double r = grid->nodes(k);
    if (r <= R) {
      // quadratic core sampled exactly: phi_R = r^2/2, phi_R' = r, phi_R'' = 1
      pair.phi(k, 0) = 0.5 * r * r;
      pair.phi(k, 1) = r;
      pair.phi(k, 2) = 1.0;
      for (int j = 3; j <= 6; ++j) pair.phi(k, j) = 0.0;
      continue;
    }
    const double x = r / R;
    for (int j = 0; j <= 6; ++j)
      pair.phi(k, j) = std::pow(R, 2 - j) * cutoff_phi_unit(kind, x, j);
  }
  if (kind == CutoffKind::appendixB) {
    pair.glide_end = appxb_profile().glide_end;
    pair.plateau = appxb_profile().plateau;
  }
  return pair;
}

void build_psi(CutoffPair& pair) {
  const int n = pair.grid->n;
  if ((pair.phi.col(0).array() < 0.0).any()) {
    throw std::runtime_error("build_psi: negative phi_R sample (construction error)");
  }
  pair.psi.resize(n, 7);
  for (int k = 0; k < n; ++k) {
    const double r = pair.grid->nodes(k);
    if (r <= pair.R) {
      pair.psi(k, 0) = 0.5 * r * r;
      pair.psi(k, 1) = r;
      pair.psi(k, 2) = 1.0;
      for (int j = 3; j <= 6; ++j) pair.psi(k, j) = 0.0;
      continue;
    }
    const double x = r / pair.R;
    for (int j = 0; j <= 6; ++j)
      pair.psi(k, j) = std::pow(pair.R, 2 - j) * cutoff_psi_unit(pair.kind, x, j);
  }
}

CutoffPair build_cutoff(const GridPtr& grid, double R, CutoffKind kind) {
  CutoffPair pair = build_phi(grid, R, kind);
  build_psi(pair);
  if (kind == CutoffKind::appendixB) {
    auto v = verify_cutoff(pair, grid->d);
    pair.eta0 = v.eta0;
    pair.eta0_slack = v.eta0_slack;
    pair.eta0_sup = v.eta0_sup;
  }
  return pair;
}

namespace {

// lap phi, d_r^2 lap phi, lap^2 phi at unit scale from the derivative stack
struct LapStack {
  double lap, lap1, lap2, bilap;
};

LapStack lap_stack_unit(CutoffKind kind, double x, int d) {
  std::array<double, 5> f{};
  for (int j = 0; j <= 4; ++j) f[j] = cutoff_phi_unit(kind, x, j);
  const double c = d - 1.0;
  LapStack s;
  s.lap = f[2] + c * f[1] / x;
  s.lap1 = f[3] + c * (f[2] / x - f[1] / (x * x));
  s.lap2 = f[4] + c * (f[3] / x - 2.0 * f[2] / (x * x) + 2.0 * f[1] / (x * x * x));
  s.bilap = s.lap2 + c * s.lap1 / x;
  return s;
}

double d_minus_lap_unit(CutoffKind kind, double x, int d) {
  return one_minus_phipp_unit(kind, x) + (d - 1.0) * one_minus_phir_unit(kind, x);
}

}  // namespace

CutoffVerification verify_cutoff(const CutoffPair& pair, int d) {
  if (!pair.complete()) throw std::invalid_argument("verify_cutoff: pair is incomplete");
  CutoffVerification v;
  v.margin_one_minus_phipp = 1e300;
  v.margin_one_minus_phir = 1e300;
  v.margin_lap = 1e300;

  const double cap = (pair.kind == CutoffKind::generic) ? 10.5 : 11.0;
  auto scan = [&](double x) {
    const double m1 = one_minus_phipp_unit(pair.kind, x);
    const double m2 = one_minus_phir_unit(pair.kind, x);
    const double m3 = d_minus_lap_unit(pair.kind, x, d);
    if (m1 < v.margin_one_minus_phipp) v.margin_one_minus_phipp = m1;
    if (m2 < v.margin_one_minus_phir) v.margin_one_minus_phir = m2;
    if (m3 < v.margin_lap) {
      v.margin_lap = m3;
      v.worst_radius = x * pair.R;
    }
  };
  for (int k = 0; k < pair.grid->n; ++k) scan(pair.grid->nodes(k) / pair.R);
  const int fine = 10000;
  for (int i = 1; i <= fine; ++i) scan(cap * i / fine);

  // psi consistency phi' = psi'' psi' at the nodes
  double err = 0.0;
  for (int k = 0; k < pair.grid->n; ++k) {
    const double e = std::abs(pair.phi(k, 1) - pair.psi(k, 2) * pair.psi(k, 1));
    err = std::max(err, e / pair.R);  // phi' scales like R
  }
  v.psi_identity_err = err;

  const double tol = -1e-12;
  if (v.margin_one_minus_phipp < tol || v.margin_one_minus_phir < tol || v.margin_lap < tol) {
    throw std::runtime_error("verify_cutoff: negative margin near r = " +
                             std::to_string(v.worst_radius));
  }

  if (pair.kind == CutoffKind::appendixB) {
    // largest eta0 with 1-phi'' - eta0 { 4 (lap^2 phi + 4 d_r^2 lap phi)^2
    //   + (8d/(4+d))^{d/2} (d - lap phi)^{d/2} } >= 0 on a fine unit grid,
    // returned at half the sup with its slack
    double sup = 1e300;
    const double bcoef = std::pow(8.0 * d / (4.0 + d), d / 2.0);
    auto weight = [&](double x) {
      LapStack s = lap_stack_unit(pair.kind, x, d);
      const double a = s.bilap + 4.0 * s.lap2;
      return 4.0 * a * a + bcoef * std::pow(d_minus_lap_unit(pair.kind, x, d), d / 2.0);
    };
    for (int i = 1; i <= fine; ++i) {
      const double x = 1.0 + (cap - 1.0) * i / fine;
      const double M = weight(x);
      if (M > 1e-300) sup = std::min(sup, one_minus_phipp_unit(pair.kind, x) / M);
    }
    const double eta0 = std::min(1.0, 0.5 * sup);
    double slack = 1e300;
    for (int i = 1; i <= fine; ++i) {
      const double x = 1.0 + (cap - 1.0) * i / fine;
      slack = std::min(slack, one_minus_phipp_unit(pair.kind, x) - eta0 * weight(x));
    }
    v.eta0 = eta0;
    v.eta0_slack = slack;
    v.eta0_sup = sup;
  }
  v.ok = true;
  return v;
}

Eigen::VectorXd b_r_profile(const CutoffPair& pair, int d) {
  Eigen::VectorXd out(pair.grid->n);
  for (int k = 0; k < pair.grid->n; ++k)
    out(k) = (8.0 * d / (4.0 + d)) *
             d_minus_lap_unit(pair.kind, pair.grid->nodes(k) / pair.R, d);
  return out;
}

void export_cutoff_csv(const CutoffPair& pair, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("export_cutoff_csv: cannot open " + path);
  os << "r";
  for (int j = 0; j <= 6; ++j) os << ",phi" << j;
  for (int j = 0; j <= 6; ++j) os << ",psi" << j;
  os << "\n";
  os.precision(17);
  for (int k = 0; k < pair.grid->n; ++k) {
    os << pair.grid->nodes(k);
    for (int j = 0; j <= 6; ++j) os << "," << pair.phi(k, j);
    for (int j = 0; j <= 6; ++j) os << "," << (pair.complete() ? pair.psi(k, j) : 0.0);
    os << "\n";
  }
}

}  // namespace bnls
