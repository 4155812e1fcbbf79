// The OpenMP kernels must agree bit for bit with their serial reference
// paths, for any thread count.
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "doctest.h"

#include "sfeec/spai.hpp"

using namespace sfeec;

namespace {

struct Fixture {
  PeriodicMesh mesh;
  FormSpace s1;
  SparseOperator m1;
  Fixture() {
    mesh = generate_periodic_triangulation(96, 1, 1, 7,
                                           MeshMethod::DelaunayTiled);
    s1 = build_space(mesh, Family::P2, 1);
    s1.mesh = &mesh;
    m1 = mass_matrix(s1);
  }
};

}  // namespace

TEST_CASE("parallel and serial spmv agree bitwise") {
  Fixture f;
  Rng rng(3);
  std::vector<double> x((size_t)f.m1.cols);
  for (auto& v : x) v = rng.uniform(-1, 1);
  std::vector<double> yp((size_t)f.m1.rows), ys((size_t)f.m1.rows);
  spmv(f.m1, x.data(), yp.data());
  spmv_serial(f.m1, x.data(), ys.data());
  for (size_t i = 0; i < yp.size(); ++i) CHECK(yp[i] == ys[i]);
}

TEST_CASE("mass assembly is bitwise reproducible across execution modes") {
  Fixture f;
  auto serial = mass_matrix(f.s1, Exec::Serial);
  auto parallel = mass_matrix(f.s1, Exec::Parallel);
  REQUIRE(serial.nnz() == parallel.nnz());
  for (size_t i = 0; i < serial.val.size(); ++i)
    CHECK(serial.val[i] == parallel.val[i]);
  CHECK(serial.col_idx == parallel.col_idx);
  CHECK(serial.row_ptr == parallel.row_ptr);

#ifdef _OPENMP
  int saved = omp_get_max_threads();
  for (int t : {1, 2, 3}) {
    omp_set_num_threads(t);
    auto m = mass_matrix(f.s1, Exec::Parallel);
    omp_set_num_threads(saved);
    for (size_t i = 0; i < serial.val.size(); ++i) CHECK(serial.val[i] == m.val[i]);
  }
#endif
}

TEST_CASE("spai execution modes agree bitwise") {
  Fixture f;
  auto pat = make_pattern(f.m1, PatternKind::M1);
  SpaiOptions ser;
  ser.exec = Exec::Serial;
  auto qs = spai_approximate_inverse(f.m1, pat, ser).first;
  auto qp = spai_approximate_inverse(f.m1, pat).first;
  REQUIRE(qs.nnz() == qp.nnz());
  for (size_t i = 0; i < qs.val.size(); ++i) CHECK(qs.val[i] == qp.val[i]);
}

TEST_CASE("projection and error evaluation are reproducible") {
  Fixture f;
  AnalyticForm a;
  a.dim = 2;
  a.p = 1;
  a.comp = {[](const Vec3& x) { return std::sin(2 * M_PI * x.y); },
            [](const Vec3& x) { return std::cos(2 * M_PI * x.x); }};
  auto c1 = canonical_projection(f.s1, a);
  auto c2 = canonical_projection(f.s1, a);
  CHECK(c1.values == c2.values);

  auto es = l2_error(f.s1, c1, a, 6, Exec::Serial);
  auto ep = l2_error(f.s1, c1, a, 6, Exec::Parallel);
  CHECK(es.absolute == ep.absolute);
  CHECK(es.relative == ep.relative);
}
