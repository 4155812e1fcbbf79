#include <cmath>

#include "sfeec/yee.hpp"

#include "sfeec/form_space.hpp"

namespace sfeec {

YeeGrid::YeeGrid(int nx, int ny, int nz, double dx, double dy, double dz) {
  n[0] = nx;
  n[1] = ny;
  n[2] = nz;
  d[0] = dx;
  d[1] = dy;
  d[2] = dz;
  for (int a = 0; a < 3; ++a) {
    e[a].assign((size_t)(nx * ny * nz), 0.0);
    b[a].assign((size_t)(nx * ny * nz), 0.0);
  }
}

int YeeGrid::idx(int i, int j, int k) const {
  i = ((i % n[0]) + n[0]) % n[0];
  j = ((j % n[1]) + n[1]) % n[1];
  k = ((k % n[2]) + n[2]) % n[2];
  return i + n[0] * (j + n[1] * k);
}

namespace {

void advance_e(YeeGrid& g, double dt, double c2) {
  const int step[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int a = 0; a < 3; ++a) {
    int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
    std::vector<double> next = g.e[a];
    for (int k = 0; k < g.n[2]; ++k)
      for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
          int here = g.idx(i, j, k);
          int m1 = g.idx(i - step[a1][0], j - step[a1][1], k - step[a1][2]);
          int m2 = g.idx(i - step[a2][0], j - step[a2][1], k - step[a2][2]);
          double curl = (g.b[a2][(size_t)here] - g.b[a2][(size_t)m1]) / g.d[a1] -
                        (g.b[a1][(size_t)here] - g.b[a1][(size_t)m2]) / g.d[a2];
          next[(size_t)here] = g.e[a][(size_t)here] + c2 * dt * curl;
        }
    g.e[a] = std::move(next);
  }
}

}  // namespace

void yee_advance_b(YeeGrid& g, double dt) {
  const int step[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int a = 0; a < 3; ++a) {
    int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
    std::vector<double> next = g.b[a];
    for (int k = 0; k < g.n[2]; ++k)
      for (int j = 0; j < g.n[1]; ++j)
        for (int i = 0; i < g.n[0]; ++i) {
          int here = g.idx(i, j, k);
          int p2 = g.idx(i + step[a2][0], j + step[a2][1], k + step[a2][2]);
          int p1 = g.idx(i + step[a1][0], j + step[a1][1], k + step[a1][2]);
          double curl = (g.e[a1][(size_t)p2] - g.e[a1][(size_t)here]) / g.d[a2] -
                        (g.e[a2][(size_t)p1] - g.e[a2][(size_t)here]) / g.d[a1];
          next[(size_t)here] = g.b[a][(size_t)here] + dt * curl;
        }
    g.b[a] = std::move(next);
  }
}

void yee_fdtd_step(YeeGrid& g, double dt, const UnitSystem& units) {
  advance_e(g, dt, units.c2());
  yee_advance_b(g, dt);
}

SparseOperator lumped_mass(const FormSpace& space) {
  if (space.family != Family::Q1)
    throw InvalidParameter("lumped_mass: Q1- cubical space required");
  const auto& sp = space.mesh->spacing;
  return scaled_identity(space.n_dofs, sp[0] * sp[1] * sp[2]);
}

double yee_equivalence_check(int nx, int ny, int nz, double dx, double dy,
                             double dz, double dt, int steps,
                             std::uint64_t seed) {
  PeriodicMesh mesh = generate_cubical_lattice(nx, ny, nz, dx, dy, dz);
  FormSpace sp1 = build_space(mesh, Family::Q1, 1);
  FormSpace sp2 = build_space(mesh, Family::Q1, 2);
  SparseOperator c = derivative_matrix(sp1, sp2);
  SparseOperator m1y = lumped_mass(sp1);
  SparseOperator m2y = lumped_mass(sp2);
  const double dv = dx * dy * dz;
  SparseOperator q = scaled_identity(sp1.n_dofs, 1.0 / dv);

  SplitScheme scheme(SplitKind::Strang, dt, q, c, m2y, UnitSystem{}, nullptr,
                     /*warn_cfl=*/false);

  // random initial data shared by both runs; the finite element b carries a
  // 1/dV unit factor relative to the staggered B
  Rng rng(seed);
  YeeGrid grid(nx, ny, nz, dx, dy, dz);
  const int nc = nx * ny * nz;
  std::vector<double> e0((size_t)sp1.n_dofs), b0((size_t)sp2.n_dofs);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < nc; ++i) {
      double v = rng.uniform(-1, 1);
      grid.e[a][(size_t)i] = v;
      e0[(size_t)(a * nc + i)] = v;
    }
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < nc; ++i) {
      double v = rng.uniform(-1, 1);
      grid.b[a][(size_t)i] = v;
      b0[(size_t)(a * nc + i)] = v / dv;
    }

  FieldState state = make_state(Formulation::BE, std::move(b0), std::move(e0));
  for (int s = 0; s < steps; ++s) state = scheme.step(state);
  // land b on the staggered half-step grid points
  FieldState staggered = state;
  scheme.flow_he(staggered, 0.5 * dt);

  yee_advance_b(grid, 0.5 * dt);  // half-step initialization
  for (int s = 0; s < steps; ++s) yee_fdtd_step(grid, dt);

  double dev = 0;
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < nc; ++i) {
      dev = std::max(dev, std::abs(state.e[(size_t)(a * nc + i)] -
                                   grid.e[a][(size_t)i]));
      dev = std::max(dev, std::abs(dv * staggered.first[(size_t)(a * nc + i)] -
                                   grid.b[a][(size_t)i]));
    }
  return dev;
}

}  // namespace sfeec
