#include "bnls/params.hpp"

#include <stdexcept>

namespace bnls {

const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::mass_subcritical: return "mass-subcritical";
    case Criticality::mass_critical: return "mass-critical";
    case Criticality::mass_supercritical: return "mass-supercritical";
    case Criticality::energy_critical: return "energy-critical";
    case Criticality::energy_supercritical: return "energy-supercritical";
  }
  return "?";
}

Params make_params(int d, double sigma, double mu) {
  if (d < 2) throw std::invalid_argument("make_params: d must be >= 2");
  if (!(sigma > 0.0)) throw std::invalid_argument("make_params: sigma must be > 0");
  if (d >= 5 && sigma > 4.0 / (d - 4)) {
    throw std::invalid_argument(
        "make_params: sigma exceeds the energy-critical endpoint 4/(d-4)");
  }
  Params p;
  p.d = d;
  p.sigma = sigma;
  p.mu = mu;
  p.s_c = d / 2.0 - 2.0 / sigma;
  p.delta = d * sigma - 4.0;
  if (sigma == 4.0 / d) {
    p.criticality = Criticality::mass_critical;
  } else if (d >= 5 && sigma == 4.0 / (d - 4)) {
    p.criticality = Criticality::energy_critical;
  } else if (p.s_c < 0.0) {
    p.criticality = Criticality::mass_subcritical;
  } else {
    p.criticality = Criticality::mass_supercritical;
  }
  return p;
}

}  // namespace bnls
