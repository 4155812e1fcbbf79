#pragma once

#include <vector>

#include "sfeec/core.hpp"
#include "sfeec/mesh.hpp"

namespace sfeec {

// Reference-cell rule: triangle (0,0)-(1,0)-(0,1) with volume 1/2, cube
// [0,1]^3 with volume 1, segment [0,1] with volume 1. Weights sum to the
// reference volume and the rule integrates polynomials up to `order` exactly.
struct QuadratureRule {
  CellKind cell_kind = CellKind::Simplex;
  int order = 0;
  std::vector<Vec3> points;
  std::vector<double> weights;
};

QuadratureRule quadrature_rule(CellKind kind, int order);

// 1-D Gauss-Legendre on [0,1]; points returned in Vec3::x.
QuadratureRule segment_rule(int order);

}  // namespace sfeec
