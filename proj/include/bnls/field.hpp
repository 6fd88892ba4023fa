#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>

#include "bnls/grid.hpp"

namespace bnls {

using Cplx = std::complex<double>;

/// Complex radial profile sampled at the grid nodes. Single-owner value type;
/// the grid itself is immutable and shared.
struct Field {
  GridPtr grid;
  Eigen::VectorXcd values;

  Field() = default;
  explicit Field(GridPtr g) : grid(std::move(g)), values(Eigen::VectorXcd::Zero(grid->n)) {}
  Field(GridPtr g, Eigen::VectorXcd v) : grid(std::move(g)), values(std::move(v)) {}

  int n() const { return static_cast<int>(values.size()); }
  bool is_finite() const { return values.allFinite(); }
};

Field make_field(const GridPtr& g, const std::function<Cplx(double)>& f);
Field zero_field(const GridPtr& g);

/// amplitude * exp(-(r/width)^2) * exp(i*chirp*r^2)
Field gaussian_field(const GridPtr& g, double amplitude, double width, double chirp = 0.0);

}  // namespace bnls
