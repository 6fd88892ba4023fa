#include "bnls/field.hpp"

namespace bnls {

Field make_field(const GridPtr& g, const std::function<Cplx(double)>& f) {
  Field u(g);
  for (int k = 0; k < g->n; ++k) u.values(k) = f(g->nodes(k));
  return u;
}

Field zero_field(const GridPtr& g) { return Field(g); }

Field gaussian_field(const GridPtr& g, double amplitude, double width, double chirp) {
  Field u(g);
  for (int k = 0; k < g->n; ++k) {
    const double r2 = g->nodes(k) * g->nodes(k);
    u.values(k) = amplitude * std::exp(-r2 / (width * width)) *
                  std::exp(Cplx(0.0, chirp * r2));
  }
  return u;
}

}  // namespace bnls
