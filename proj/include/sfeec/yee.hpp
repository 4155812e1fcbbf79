#pragma once

#include <cstdint>

#include "sfeec/dynamics.hpp"

namespace sfeec {

// Staggered-grid FDTD oracle, written directly from the classical index
// stencils. Deliberately independent of all finite element code so the
// reduction test is not circular.
struct YeeGrid {
  int n[3] = {0, 0, 0};
  double d[3] = {0, 0, 0};
  // component-major arrays of size nx*ny*nz; E_a lives at edge centers
  // (i+1/2 along a), B_a at face centers normal to a
  std::vector<double> e[3], b[3];

  YeeGrid(int nx, int ny, int nz, double dx, double dy, double dz);
  int idx(int i, int j, int k) const;
};

// One leapfrog cycle: E advanced a full step from B, then B a full step from
// the new E (B is staggered half a step ahead of E on entry).
void yee_fdtd_step(YeeGrid& g, double dt, const UnitSystem& units = {});

// B half-step used to stagger initial data.
void yee_advance_b(YeeGrid& g, double dt);

SparseOperator lumped_mass(const FormSpace& space);

// Runs the lumped-mass Strang splitting in (b, e) form against the FDTD
// oracle from the same random initial data and returns the max deviation
// across both fields after `steps` leapfrog cycles.
double yee_equivalence_check(int nx, int ny, int nz, double dx, double dy,
                             double dz, double dt, int steps,
                             std::uint64_t seed);

}  // namespace sfeec
