#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "sfeec/convergence.hpp"

using namespace sfeec;

namespace {

ConvergenceRecord synthetic(double h, double err, double lambda = 1.0) {
  ConvergenceRecord r;
  r.basis = "P1-";
  r.pattern = "dense";
  r.n_vertices = 0;
  r.h = h;
  r.cells_per_wavelength = lambda / h;
  r.relative_error = err;
  return r;
}

ConvergenceConfig tiny_config() {
  ConvergenceConfig cfg;
  cfg.vertex_ladder = {48, 96, 192};
  cfg.modes = {1};
  cfg.seeds = {1, 2};
  cfg.fit_window_lo = 1.0;
  cfg.fit_window_hi = 100.0;
  return cfg;
}

}  // namespace

TEST_CASE("power-law fit recovers synthetic exponents") {
  std::vector<ConvergenceRecord> recs;
  for (double h : {0.5, 0.25, 0.125, 0.0625})
    recs.push_back(synthetic(h, 3.0 * h * h));
  auto fit = fit_power_law(recs, 0.1, 100.0);
  CHECK(fit.exponent == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.n_points == 4);

  std::vector<ConvergenceRecord> flat;
  for (double h : {0.5, 0.25, 0.125}) flat.push_back(synthetic(h, 0.37));
  CHECK(fit_power_law(flat, 0.1, 100.0).exponent ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("power-law fit needs at least three points in the window") {
  std::vector<ConvergenceRecord> recs{synthetic(0.5, 1.0), synthetic(0.25, 0.5)};
  CHECK_THROWS_AS(fit_power_law(recs, 0.1, 100.0), InvalidParameter);
  recs.push_back(synthetic(0.125, 0.25));
  CHECK_NOTHROW(fit_power_law(recs, 0.1, 100.0));
  // window excludes everything
  CHECK_THROWS_AS(fit_power_law(recs, 50.0, 100.0), InvalidParameter);
}

TEST_CASE("the fit window selects by cells per wavelength") {
  std::vector<ConvergenceRecord> recs;
  // clean h^2 inside [2, 16], garbage outside
  for (double h : {0.5, 0.25, 0.125, 0.0625, 0.03125})
    recs.push_back(synthetic(h, h * h));
  recs.push_back(synthetic(1.0, 17.0));    // resolution 1, out of window
  recs.push_back(synthetic(0.01, 0.5));    // resolution 100, out of window
  auto fit = fit_power_law(recs, 2.0, 32.0);
  CHECK(fit.exponent == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.n_points == 5);
}

TEST_CASE("saturation detection") {
  // monotone decay: no saturation
  std::vector<ConvergenceRecord> clean;
  for (int k = 0; k < 8; ++k) {
    double h = 0.5 / std::exp2((double)k * 0.5);
    clean.push_back(synthetic(h, h * h));
  }
  CHECK(!detect_saturation(clean));

  // decaying then flat: knee where the floor takes over
  std::vector<ConvergenceRecord> knee;
  for (int k = 0; k < 14; ++k) {
    double r = 1.5 * std::pow(1.35, (double)k);
    double err = std::max(0.05, 1.0 / (r * r));
    knee.push_back(synthetic(1.0 / r, err));
  }
  auto sat = detect_saturation(knee);
  REQUIRE(sat.has_value());
  // true knee at r = sqrt(1 / 0.05) ~ 4.5
  CHECK(*sat >= 2.5);
  CHECK(*sat <= 8.0);

  // flat from the very start: the first resolution is returned
  std::vector<ConvergenceRecord> flat;
  for (int k = 0; k < 6; ++k)
    flat.push_back(synthetic(0.5 / std::exp2((double)k), 0.4));
  auto s2 = detect_saturation(flat);
  REQUIRE(s2.has_value());
  CHECK(*s2 == doctest::Approx(2.0).epsilon(0.5));

  CHECK(!detect_saturation({synthetic(0.5, 1.0)}));
}

TEST_CASE("records serialize with the declared column order") {
  std::vector<ConvergenceRecord> recs{synthetic(0.5, 0.25)};
  recs[0].n_vertices = 64;
  recs[0].seed = 9;
  recs[0].mode = 2;
  auto csv = records_to_csv(recs);
  CHECK(csv.rfind("basis,pattern,n_vertices,h,cells_per_wavelength,"
                  "relative_error,seed,mode,skipped,reason\n",
                  0) == 0);
  CHECK(csv.find("P1-,dense,64,0.5,2,0.25,9,2,0,\n") != std::string::npos);

  auto empty = records_to_csv({});
  CHECK(empty ==
        "basis,pattern,n_vertices,h,cells_per_wavelength,relative_error,seed,"
        "mode,skipped,reason\n");
}

TEST_CASE("zero modes are recorded as skipped") {
  ConvergenceConfig cfg = tiny_config();
  cfg.vertex_ladder = {48};
  cfg.seeds = {1};
  cfg.modes = {0, 1};
  cfg.bases = {Family::P1};
  cfg.patterns = {PatternKind::Dense};
  auto result = run_convergence(cfg);
  int skipped = 0, kept = 0;
  for (const auto& r : result.records) {
    if (r.skipped) {
      ++skipped;
      CHECK(r.mode == 0);
      CHECK(!r.reason.empty());
    } else {
      ++kept;
      CHECK(r.relative_error > 0);
    }
  }
  CHECK(skipped == 1);
  CHECK(kept == 1);
}

TEST_CASE("the sweep is deterministic and emits byte-stable files") {
  ConvergenceConfig cfg = tiny_config();
  auto r1 = run_convergence(cfg);
  auto r2 = run_convergence(cfg);
  REQUIRE(r1.records.size() == r2.records.size());
  for (size_t i = 0; i < r1.records.size(); ++i) {
    CHECK(r1.records[i].relative_error == r2.records[i].relative_error);
    CHECK(r1.records[i].h == r2.records[i].h);
  }

  auto fits1 = summarize(r1, cfg);
  auto fits2 = summarize(r2, cfg);
  CHECK(records_to_csv(r1.records) == records_to_csv(r2.records));
  CHECK(summaries_to_json(fits1) == summaries_to_json(fits2));

  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "sfeec_conv_test";
  fs::create_directories(dir);
  emit_results(r1.records, fits1, (dir / "records.csv").string(),
               (dir / "summary.json").string());
  std::ifstream csv(dir / "records.csv", std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(csv)),
                   std::istreambuf_iterator<char>());
  CHECK(text == records_to_csv(r1.records));
}

TEST_CASE("small sweep satisfies the structural claims") {
  ConvergenceConfig cfg = tiny_config();
  auto result = run_convergence(cfg);

  // one record per (basis, pattern, rung, seed, mode)
  CHECK(result.records.size() == 2 * 4 * 3 * 2 * 1);

  // Frobenius residuals are strictly monotone over nested patterns
  for (int nv : cfg.vertex_ladder)
    for (std::uint64_t seed : cfg.seeds)
      for (const char* basis : {"P1-", "P2-"}) {
        double diag = -1, m1 = -1, m1sq = -1;
        for (const auto& s : result.spai_residuals) {
          if (s.n_vertices != nv || s.seed != seed || s.basis != basis)
            continue;
          if (s.pattern == "diagonal") diag = s.frobenius_residual;
          if (s.pattern == "m1") m1 = s.frobenius_residual;
          if (s.pattern == "m1sq") m1sq = s.frobenius_residual;
        }
        REQUIRE(diag >= 0);
        REQUIRE(m1 >= 0);
        REQUIRE(m1sq >= 0);
        CHECK(diag > m1);
        CHECK(m1 > m1sq);
      }

  // the dense route equals the exact operator no matter how M1 is inverted:
  // re-run one point with the iterative solve and compare
  auto mesh = generate_periodic_triangulation(48, 1, 1, 1,
                                              MeshMethod::DelaunayTiled);
  auto s1 = build_space(mesh, Family::P1, 1);
  auto s2 = build_space(mesh, Family::P1, 2);
  auto c = derivative_matrix(s1, s2);
  auto ct = transpose(c);
  auto m1 = mass_matrix(s1);
  auto m2 = mass_matrix(s2);
  const double k = 2.0 * M_PI;
  AnalyticForm pot, exact;
  pot.dim = exact.dim = 2;
  pot.p = exact.p = 1;
  pot.comp = {[k](const Vec3& x) { return std::sin(k * x.y); },
              [](const Vec3&) { return 0.0; }};
  exact.comp = {[k](const Vec3& x) { return k * k * std::sin(k * x.y); },
                [](const Vec3&) { return 0.0; }};
  auto a = canonical_projection(s1, pot);
  LinearSolveOperator direct(m1);
  auto w1 = apply_curl_of_curl(direct.as_fn(), c, ct, m2, a);
  auto w2 = apply_curl_of_curl(
      [&](const std::vector<double>& rhs) {
        return conjugate_gradient(m1, rhs, 1e-13);
      },
      c, ct, m2, a);
  double e1 = l2_error(s1, w1, exact).relative;
  double e2 = l2_error(s1, w2, exact).relative;
  CHECK(e1 == doctest::Approx(e2).epsilon(1e-10));
}
