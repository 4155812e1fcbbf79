// Timings of the OpenMP kernels against their serial reference paths:
// CSR mat-vec, mass assembly, SPAI column solves, canonical projection.
#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sfeec/convergence.hpp"

using namespace sfeec;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = clock_type::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-24s serial %9.4f ms   parallel %9.4f ms   speedup %5.2fx\n",
              name, serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  int nv = 2048;
  int reps = 5;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--vertices" && i + 1 < argc) nv = std::atoi(argv[++i]);
    if (a == "--reps" && i + 1 < argc) reps = std::atoi(argv[++i]);
  }
#ifdef _OPENMP
  std::printf("threads: %d, vertices: %d\n", omp_get_max_threads(), nv);
#else
  std::printf("threads: 1 (no OpenMP), vertices: %d\n", nv);
#endif

  PeriodicMesh mesh = generate_periodic_triangulation(
      nv, 1.0, 1.0, 7, MeshMethod::DelaunayTiled);
  FormSpace sp1 = build_space(mesh, Family::P2, 1);
  SparseOperator m1 = mass_matrix(sp1);
  std::printf("P2- 1-form dofs: %d, mass nnz: %d\n", sp1.n_dofs, m1.nnz());

  // spmv
  std::vector<double> x((size_t)m1.rows), y((size_t)m1.rows);
  Rng rng(1);
  for (auto& v : x) v = rng.uniform(-1, 1);
  double ts = time_best_of(reps, [&] {
    for (int i = 0; i < 50; ++i) spmv_serial(m1, x.data(), y.data());
  });
  double tp = time_best_of(reps, [&] {
    for (int i = 0; i < 50; ++i) spmv(m1, x.data(), y.data());
  });
  report("spmv x50", ts, tp);

  // mass assembly
  ts = time_best_of(reps, [&] { mass_matrix(sp1, Exec::Serial); });
  tp = time_best_of(reps, [&] { mass_matrix(sp1, Exec::Parallel); });
  report("mass assembly", ts, tp);

  // spai column solves on the m1 pattern
  auto pattern = make_pattern(m1, PatternKind::M1);
  SpaiOptions ser;
  ser.exec = Exec::Serial;
  ts = time_best_of(reps, [&] { spai_approximate_inverse(m1, pattern, ser); });
  tp = time_best_of(reps, [&] { spai_approximate_inverse(m1, pattern); });
  report("spai S(M1)", ts, tp);

  auto pattern2 = make_pattern(m1, PatternKind::M1Squared);
  ts = time_best_of(reps, [&] { spai_approximate_inverse(m1, pattern2, ser); });
  tp = time_best_of(reps, [&] { spai_approximate_inverse(m1, pattern2); });
  report("spai S(M1^2)", ts, tp);

  // canonical projection (parallel over dofs; serial via one thread is not
  // exposed, so time the parallel path only)
  AnalyticForm a;
  a.dim = 2;
  a.p = 1;
  a.comp = {[](const Vec3& p) { return std::sin(2 * M_PI * p.y); },
            [](const Vec3&) { return 0.0; }};
  auto t0 = clock_type::now();
  auto c = canonical_projection(sp1, a);
  std::printf("%-24s %9.4f ms (|c|_inf = %.3g)\n", "projection",
              seconds_since(t0) * 1e3,
              *std::max_element(c.values.begin(), c.values.end()));
  return 0;
}
