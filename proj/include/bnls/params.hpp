#pragma once

#include <string>

namespace bnls {

enum class Criticality {
  mass_subcritical,
  mass_critical,
  mass_supercritical,
  energy_critical,
  energy_supercritical,
};

const char* to_string(Criticality c);

/// Problem parameters (d, sigma, mu) with derived criticality data.
struct Params {
  int d = 0;            // spatial dimension, >= 2
  double sigma = 0.0;   // nonlinearity exponent, > 0
  double mu = 0.0;      // lower-order dispersion coefficient
  double s_c = 0.0;     // d/2 - 2/sigma
  double delta = 0.0;   // d*sigma - 4
  Criticality criticality = Criticality::mass_subcritical;
};

// Rejects d < 2 and, for d >= 5, sigma past the energy-critical endpoint 4/(d-4).
// Classification boundaries are exact comparisons against 4/d and 4/(d-4).
Params make_params(int d, double sigma, double mu);

}  // namespace bnls
