#include <cmath>

#include "doctest.h"

#include "sfeec/spai.hpp"
#include "sfeec/yee.hpp"

using namespace sfeec;

namespace {

// hand-written update of one E_x entry, straight from the staggered index
// formula (kept independent of the YeeGrid loops)
double ex_update_by_hand(const YeeGrid& g, int i, int j, int k, double dt,
                         double c2) {
  double bz_hi = g.b[2][(size_t)g.idx(i, j, k)];
  double bz_lo = g.b[2][(size_t)g.idx(i, j - 1, k)];
  double by_hi = g.b[1][(size_t)g.idx(i, j, k)];
  double by_lo = g.b[1][(size_t)g.idx(i, j, k - 1)];
  return g.e[0][(size_t)g.idx(i, j, k)] +
         c2 * dt * ((bz_hi - bz_lo) / g.d[1] - (by_hi - by_lo) / g.d[2]);
}

double bx_update_by_hand(const YeeGrid& g, int i, int j, int k, double dt) {
  double ey_hi = g.e[1][(size_t)g.idx(i, j, k + 1)];
  double ey_lo = g.e[1][(size_t)g.idx(i, j, k)];
  double ez_hi = g.e[2][(size_t)g.idx(i, j + 1, k)];
  double ez_lo = g.e[2][(size_t)g.idx(i, j, k)];
  return g.b[0][(size_t)g.idx(i, j, k)] +
         dt * ((ey_hi - ey_lo) / g.d[2] - (ez_hi - ez_lo) / g.d[1]);
}

}  // namespace

TEST_CASE("zero fields stay zero") {
  YeeGrid g(4, 4, 4, 1, 1, 1);
  for (int s = 0; s < 10; ++s) yee_fdtd_step(g, 0.1);
  for (int a = 0; a < 3; ++a)
    for (double v : g.e[a]) CHECK(v == 0.0);
  for (int a = 0; a < 3; ++a)
    for (double v : g.b[a]) CHECK(v == 0.0);
}

TEST_CASE("uniform E_x leaves B unchanged") {
  YeeGrid g(4, 3, 5, 0.5, 1.0, 2.0);
  for (auto& v : g.e[0]) v = 3.25;
  yee_advance_b(g, 0.7);
  for (int a = 0; a < 3; ++a)
    for (double v : g.b[a]) CHECK(v == 0.0);
}

TEST_CASE("one step matches the hand-evaluated stencil") {
  YeeGrid g(4, 4, 4, 0.5, 1.0, 2.0);
  const double k = 2.0 * M_PI / 4.0;
  for (int kk = 0; kk < 4; ++kk)
    for (int jj = 0; jj < 4; ++jj)
      for (int ii = 0; ii < 4; ++ii) {
        int idx = g.idx(ii, jj, kk);
        // plane wave along y with E_x / B_z polarization
        g.e[0][(size_t)idx] = std::sin(k * jj * g.d[1]);
        g.b[2][(size_t)idx] = std::sin(k * (jj + 0.5) * g.d[1]);
      }
  YeeGrid before = g;
  const double dt = 0.1, c2 = 1.0;
  yee_fdtd_step(g, dt);
  for (int kk = 0; kk < 4; ++kk)
    for (int jj = 0; jj < 4; ++jj)
      for (int ii = 0; ii < 4; ++ii) {
        double ex = ex_update_by_hand(before, ii, jj, kk, dt, c2);
        CHECK(g.e[0][(size_t)g.idx(ii, jj, kk)] ==
              doctest::Approx(ex).epsilon(1e-15));
      }
  // B was advanced from the new E
  YeeGrid mid = before;
  mid.e[0] = g.e[0];
  mid.e[1] = g.e[1];
  mid.e[2] = g.e[2];
  for (int kk = 0; kk < 4; ++kk)
    for (int jj = 0; jj < 4; ++jj)
      for (int ii = 0; ii < 4; ++ii) {
        double bx = bx_update_by_hand(mid, ii, jj, kk, dt);
        CHECK(g.b[0][(size_t)g.idx(ii, jj, kk)] ==
              doctest::Approx(bx).epsilon(1e-15));
      }
}

TEST_CASE("curl matrix reproduces the oracle stencils entry by entry") {
  const int n = 3;
  const double dx = 0.5, dy = 1.0, dz = 2.0;
  auto mesh = generate_cubical_lattice(n, n, n, dx, dy, dz);
  auto s1 = build_space(mesh, Family::Q1, 1);
  auto s2 = build_space(mesh, Family::Q1, 2);
  auto c = derivative_matrix(s1, s2);
  const int nc = n * n * n;

  Rng rng(5);
  std::vector<double> e((size_t)s1.n_dofs);
  for (auto& v : e) v = rng.uniform(-1, 1);

  // B update: (B_after - B_before)/dt = -(C e) with B and b identified up to
  // the cell-volume unit factor (which cancels in the difference quotient)
  YeeGrid g(n, n, n, dx, dy, dz);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < nc; ++i) g.e[a][(size_t)i] = e[(size_t)(a * nc + i)];
  const double dt = 1.0;
  yee_advance_b(g, dt);
  auto ce = matvec(c, e);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < nc; ++i)
      CHECK(g.b[a][(size_t)i] ==
            doctest::Approx(-ce[(size_t)(a * nc + i)]).epsilon(1e-14).scale(1.0));

  // E update: dE/(c^2 dt) = C^T B
  YeeGrid h(n, n, n, dx, dy, dz);
  std::vector<double> b((size_t)s2.n_dofs);
  for (auto& v : b) v = rng.uniform(-1, 1);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < nc; ++i) h.b[a][(size_t)i] = b[(size_t)(a * nc + i)];
  YeeGrid h0 = h;
  yee_fdtd_step(h, dt);
  auto ctb = matvec(transpose(c), b);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < nc; ++i) {
      double de = h.e[a][(size_t)i] - h0.e[a][(size_t)i];
      CHECK(de == doctest::Approx(ctb[(size_t)(a * nc + i)])
                      .epsilon(1e-14)
                      .scale(1.0));
    }
}

TEST_CASE("lumped mass matrices") {
  auto unit = generate_cubical_lattice(2, 2, 2, 1, 1, 1);
  auto s1u = build_space(unit, Family::Q1, 1);
  auto m = lumped_mass(s1u);
  CHECK(m.nnz() == s1u.n_dofs);
  for (int i = 0; i < m.rows; ++i) CHECK(m.at(i, i) == 1.0);

  auto aniso = generate_cubical_lattice(2, 2, 2, 0.5, 0.5, 2.0);
  auto s1a = build_space(aniso, Family::Q1, 1);
  auto ma = lumped_mass(s1a);
  for (int i = 0; i < ma.rows; ++i) CHECK(ma.at(i, i) == 0.5);

  // lumping recovers the row sums of the consistent mass matrix
  auto m1 = mass_matrix(s1a);
  for (int r = 0; r < m1.rows; ++r) {
    double sum = 0;
    for (double v : m1.row_vals(r)) sum += v;
    CHECK(sum == doctest::Approx(ma.at(r, r)).epsilon(1e-13));
  }

  auto tri = generate_periodic_triangulation(16, 1, 1, 3,
                                             MeshMethod::StructuredJittered, 0.0);
  auto p1 = build_space(tri, Family::P1, 1);
  CHECK_THROWS_AS(lumped_mass(p1), InvalidParameter);
}

TEST_CASE("lumped-mass splitting reduces to the FDTD oracle") {
  // isotropic and anisotropic spacings, both below the stability limit
  CHECK(yee_equivalence_check(4, 4, 4, 1, 1, 1, 0.2, 100, 0) <= 1e-12);
  CHECK(yee_equivalence_check(4, 4, 4, 1.0, 0.5, 2.0, 0.15, 100, 0) <= 1e-12);
  CHECK(yee_equivalence_check(3, 4, 5, 1.0, 0.5, 2.0, 0.15, 60, 7) <= 1e-12);
  CHECK(yee_equivalence_check(4, 4, 4, 1, 1, 1, 0.0, 50, 1) == 0.0);
}
