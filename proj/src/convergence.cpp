#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sfeec/convergence.hpp"

#include "json.hpp"

namespace sfeec {

namespace {

AnalyticForm sine_potential(double k) {
  AnalyticForm a;
  a.dim = 2;
  a.p = 1;
  a.comp = {[k](const Vec3& x) { return std::sin(k * x.y); },
            [](const Vec3&) { return 0.0; }};
  return a;
}

AnalyticForm sine_curl_curl(double k) {
  AnalyticForm a;
  a.dim = 2;
  a.p = 1;
  a.comp = {[k](const Vec3& x) { return k * k * std::sin(k * x.y); },
            [](const Vec3&) { return 0.0; }};
  return a;
}

// pattern order from coarsest to finest approximation of the inverse
int pattern_rank(const std::string& p) {
  if (p == "diagonal") return 0;
  if (p == "m1") return 1;
  if (p == "m1sq") return 2;
  if (p == "dense") return 3;
  return 4;
}

}  // namespace

ConvergenceResult run_convergence(const ConvergenceConfig& config) {
  ConvergenceResult out;

  for (int nv : config.vertex_ladder) {
    for (std::uint64_t seed : config.seeds) {
      PeriodicMesh mesh;
      try {
        mesh = generate_periodic_triangulation(nv, config.Lx, config.Ly, seed,
                                               config.mesh_method);
      } catch (const std::exception& e) {
        throw MeshGenerationError("convergence sweep (V=" +
                                  std::to_string(nv) + ", seed=" +
                                  std::to_string(seed) + "): " + e.what());
      }
      const double h = mesh_diameter(mesh);
      // resolution axis uses the representative cell size; the max-diameter h
      // is tail-dominated on random ensembles
      const double h_typ = typical_cell_diameter(mesh);

      for (Family basis : config.bases) {
        FormSpace sp1 = build_space(mesh, basis, 1);
        FormSpace sp2 = build_space(mesh, basis, 2);
        SparseOperator c = derivative_matrix(sp1, sp2);
        SparseOperator ct = transpose(c);
        SparseOperator m1 = mass_matrix(sp1);
        SparseOperator m2 = mass_matrix(sp2);

        // one inverse approximation per pattern, reused across modes
        std::vector<std::pair<PatternKind, VectorFn>> inverses;
        for (PatternKind pk : config.patterns) {
          if (pk == PatternKind::Dense) {
            LinearSolveOperator solver(m1);
            inverses.emplace_back(pk, solver.as_fn());
          } else {
            auto pattern = make_pattern(m1, pk);
            auto [q, rep] = spai_approximate_inverse(m1, pattern);
            out.spai_residuals.push_back({family_name(basis), pattern_name(pk),
                                          nv, seed, rep.frobenius_residual});
            auto qp = std::make_shared<SparseOperator>(std::move(q));
            inverses.emplace_back(
                pk, [qp](const std::vector<double>& x) { return matvec(*qp, x); });
          }
        }

        for (int n : config.modes) {
          if (n == 0) {
            for (auto& [pk, fn] : inverses) {
              ConvergenceRecord r;
              r.basis = family_name(basis);
              r.pattern = pattern_name(pk);
              r.n_vertices = nv;
              r.h = h;
              r.seed = seed;
              r.mode = 0;
              r.skipped = true;
              r.reason = "zero mode: exact curl-of-curl vanishes";
              out.records.push_back(std::move(r));
            }
            continue;
          }
          const double k = 2.0 * M_PI * n / config.Ly;
          const double lambda = 2.0 * M_PI / k;
          Cochain a =
              canonical_projection(sp1, sine_potential(k), config.quadrature_order);
          auto rhs = matvec(ct, matvec(m2, matvec(c, a.values)));
          AnalyticForm exact = sine_curl_curl(k);
          for (auto& [pk, fn] : inverses) {
            Cochain w;
            w.space = &sp1;
            w.rep = Cochain::Rep::Plain;
            w.values = fn(rhs);
            auto err =
                l2_error(sp1, w, exact, config.quadrature_order);
            ConvergenceRecord r;
            r.basis = family_name(basis);
            r.pattern = pattern_name(pk);
            r.n_vertices = nv;
            r.h = h;
            r.cells_per_wavelength = lambda / h_typ;
            r.relative_error = err.relative;
            r.seed = seed;
            r.mode = n;
            out.records.push_back(std::move(r));
          }
        }
      }
    }
  }
  return out;
}

PowerLawFit fit_power_law(const std::vector<ConvergenceRecord>& records,
                          double window_lo, double window_hi) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records) {
    if (r.skipped) continue;
    if (r.cells_per_wavelength < window_lo ||
        r.cells_per_wavelength > window_hi)
      continue;
    if (!(r.relative_error > 0)) continue;
    pts.emplace_back(-std::log(r.cells_per_wavelength),
                     std::log(r.relative_error));
  }
  if (pts.size() < 3)
    throw InvalidParameter("fit_power_law: fewer than 3 records in window");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double n = (double)pts.size();
  double vxx = sxx - sx * sx / n;
  double vxy = sxy - sx * sy / n;
  double vyy = syy - sy * sy / n;
  PowerLawFit f;
  f.exponent = vxy / vxx;
  f.intercept = (sy - f.exponent * sx) / n;
  f.r2 = vyy > 0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  f.n_points = (int)pts.size();
  return f;
}

namespace {

// pooled resolutions log-binned at 4 bins per octave, median error per bin
std::vector<std::pair<double, double>> binned_medians(
    const std::vector<ConvergenceRecord>& records) {
  std::map<int, std::vector<double>> bins;
  const double per_octave = 4.0;
  for (const auto& r : records) {
    if (r.skipped || !(r.relative_error > 0) || !(r.cells_per_wavelength > 0))
      continue;
    bins[(int)std::lround(std::log2(r.cells_per_wavelength) * per_octave)]
        .push_back(r.relative_error);
  }
  std::vector<std::pair<double, double>> series;
  for (auto& [b, v] : bins) {
    std::sort(v.begin(), v.end());
    double med = v[v.size() / 2];
    if (v.size() % 2 == 0) med = 0.5 * (med + v[v.size() / 2 - 1]);
    series.emplace_back(std::exp2((double)b / per_octave), med);
  }
  return series;
}

}  // namespace

std::optional<double> detect_saturation(
    std::vector<ConvergenceRecord> records) {
  // Estimator for the "improves by less than 5% per doubling" onset: the
  // curve has stalled once it comes within 35% of its own floor, provided the
  // tail past that point is genuinely flat (average improvement below 10% per
  // doubling screens out plain shallow power laws).
  auto series = binned_medians(records);
  if (series.size() < 3) return std::nullopt;

  double floor_err = series[0].second, peak = series[0].second;
  for (auto& [r, e] : series) {
    floor_err = std::min(floor_err, e);
    peak = std::max(peak, e);
  }
  const double near_floor = 1.35 * floor_err;
  if (peak < near_floor) return series.front().first;  // flat from the start

  size_t cross = series.size();
  for (size_t i = 0; i < series.size(); ++i)
    if (series[i].second < near_floor) {
      cross = i;
      break;
    }
  if (cross + 2 >= series.size()) return std::nullopt;  // plateau not observed

  double octaves = std::log2(series.back().first / series[cross].first);
  double tail_slope =
      std::log2(series.back().second / series[cross].second) / octaves;
  if (tail_slope <= std::log2(0.90)) return std::nullopt;  // still decaying
  return series[cross].first;
}

std::vector<ConvergenceRecord> median_aggregate(
    const std::vector<ConvergenceRecord>& records) {
  using GroupKey = std::tuple<std::string, std::string, int, int>;
  std::map<GroupKey, std::vector<const ConvergenceRecord*>> groups;
  for (const auto& r : records) {
    if (r.skipped) continue;
    groups[{r.basis, r.pattern, r.n_vertices, r.mode}].push_back(&r);
  }
  std::vector<ConvergenceRecord> out;
  for (auto& [key, v] : groups) {
    std::sort(v.begin(), v.end(),
              [](const ConvergenceRecord* a, const ConvergenceRecord* b) {
                return a->relative_error < b->relative_error;
              });
    ConvergenceRecord r = *v[v.size() / 2];
    r.seed = 0;  // aggregated
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CurveSummary> summarize(const ConvergenceResult& result,
                                    const ConvergenceConfig& config) {
  auto agg = median_aggregate(result.records);
  std::map<std::pair<std::string, std::string>, std::vector<ConvergenceRecord>>
      curves;
  for (const auto& r : agg) curves[{r.basis, r.pattern}].push_back(r);

  std::vector<CurveSummary> out;
  for (auto& [key, recs] : curves) {
    CurveSummary s;
    s.basis = key.first;
    s.pattern = key.second;
    s.saturation = detect_saturation(recs);
    // fit in the configured window, clipped to the decaying part of the
    // curve: drop resolutions where the error sits within 35% of the
    // curve's own plateau floor
    double hi = config.fit_window_hi;
    auto series = binned_medians(recs);
    if (series.size() >= 3) {
      double floor_err = series[0].second;
      for (auto& [r, e] : series) floor_err = std::min(floor_err, e);
      double cut = 0;
      for (auto& [r, e] : series)
        if (e >= 1.35 * floor_err) cut = std::max(cut, r);
      if (cut > 0) hi = std::min(hi, cut * std::exp2(1.0 / 8.0));
    }
    for (double attempt_hi : {hi, config.fit_window_hi}) {
      try {
        PowerLawFit fit = fit_power_law(recs, config.fit_window_lo, attempt_hi);
        s.has_fit = true;
        s.exponent = fit.exponent;
        s.r2 = fit.r2;
        s.n_points = fit.n_points;
        break;
      } catch (const InvalidParameter&) {
      }
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const CurveSummary& a,
                                       const CurveSummary& b) {
    if (a.basis != b.basis) return a.basis < b.basis;
    return pattern_rank(a.pattern) < pattern_rank(b.pattern);
  });
  return out;
}

std::string records_to_csv(const std::vector<ConvergenceRecord>& records) {
  std::ostringstream os;
  os << "basis,pattern,n_vertices,h,cells_per_wavelength,relative_error,seed,"
        "mode,skipped,reason\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.17g,%.17g,%.17g,%llu,%d,%d,%s\n",
                  r.basis.c_str(), r.pattern.c_str(), r.n_vertices, r.h,
                  r.cells_per_wavelength, r.relative_error,
                  (unsigned long long)r.seed, r.mode, r.skipped ? 1 : 0,
                  r.reason.c_str());
    os << buf;
  }
  return os.str();
}

std::string summaries_to_json(const std::vector<CurveSummary>& fits) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& s : fits) {
    nlohmann::ordered_json e;
    e["basis"] = s.basis;
    e["pattern"] = s.pattern;
    if (s.has_fit) {
      e["exponent"] = s.exponent;
      e["r2"] = s.r2;
    } else {
      e["exponent"] = nullptr;
      e["r2"] = nullptr;
    }
    if (s.saturation)
      e["saturation"] = *s.saturation;
    else
      e["saturation"] = nullptr;
    e["n_points"] = s.n_points;
    j.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

void emit_results(const std::vector<ConvergenceRecord>& records,
                  const std::vector<CurveSummary>& fits,
                  const std::string& csv_path, const std::string& json_path) {
  {
    std::ofstream os(csv_path, std::ios::binary);
    if (!os) throw std::runtime_error("emit_results: cannot open " + csv_path);
    os << records_to_csv(records);
  }
  {
    std::ofstream os(json_path, std::ios::binary);
    if (!os) throw std::runtime_error("emit_results: cannot open " + json_path);
    os << summaries_to_json(fits);
  }
}

std::vector<CheckResult> check_convergence_claims(
    const ConvergenceResult& result, const ConvergenceConfig& config) {
  std::vector<CheckResult> checks;
  auto summaries = summarize(result, config);
  auto find = [&](const std::string& basis,
                  const std::string& pattern) -> const CurveSummary* {
    for (const auto& s : summaries)
      if (s.basis == basis && s.pattern == pattern) return &s;
    return nullptr;
  };
  char buf[256];

  const struct {
    const char* basis;
    const char* pattern;
    double expected;
  } bands[] = {{"P1-", "diagonal", 0.56},
               {"P1-", "m1", 0.73},
               {"P1-", "dense", 0.82},
               {"P2-", "m1sq", 1.70},
               {"P2-", "dense", 1.98}};
  for (const auto& b : bands) {
    const CurveSummary* s = find(b.basis, b.pattern);
    if (!s) continue;
    bool ok = s->has_fit && std::abs(s->exponent - b.expected) <= 0.2;
    std::snprintf(buf, sizeof(buf), "%s/%s exponent %.3f (expected %.2f +- 0.2)",
                  b.basis, b.pattern, s->exponent, b.expected);
    checks.push_back({std::string("exponent ") + b.basis + b.pattern, ok, buf});
  }

  // error ordering with 2% slack at every (basis, resolution, mode)
  {
    auto agg = median_aggregate(result.records);
    std::map<std::tuple<std::string, int, int>,
             std::vector<std::pair<int, double>>>
        rows;
    for (const auto& r : agg)
      rows[{r.basis, r.n_vertices, r.mode}].emplace_back(
          pattern_rank(r.pattern), r.relative_error);
    bool ok = true;
    std::string detail = "error(dense) <= error(m1sq) <= error(m1) <= "
                         "error(diagonal) with 2% slack";
    for (auto& [key, v] : rows) {
      std::sort(v.begin(), v.end());  // coarse -> fine pattern rank
      for (size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1].first > v[i].first &&
            v[i + 1].second > v[i].second * 1.02) {
          ok = false;
          std::snprintf(buf, sizeof(buf),
                        "%s V=%d mode=%d: rank %d error %.3g > rank %d error "
                        "%.3g * 1.02",
                        std::get<0>(key).c_str(), std::get<1>(key),
                        std::get<2>(key), v[i + 1].first, v[i + 1].second,
                        v[i].first, v[i].second);
          detail = buf;
        }
    }
    checks.push_back({"pattern error ordering", ok, detail});
  }

  // strict Frobenius-residual monotonicity across nested patterns
  {
    std::map<std::tuple<std::string, int, std::uint64_t>,
             std::vector<std::pair<int, double>>>
        rows;
    for (const auto& r : result.spai_residuals)
      rows[{r.basis, r.n_vertices, r.seed}].emplace_back(
          pattern_rank(r.pattern), r.frobenius_residual);
    bool ok = true;
    std::string detail = "Frobenius residual non-increasing across nested patterns";
    for (auto& [key, v] : rows) {
      std::sort(v.begin(), v.end());
      for (size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1].second > v[i].second) {
          ok = false;
          detail = "residual increased from pattern rank " +
                   std::to_string(v[i].first) + " to " +
                   std::to_string(v[i + 1].first);
        }
    }
    checks.push_back({"Frobenius residual monotonicity", ok, detail});
  }

  // diagonal-pattern saturation onset and m1 persistence
  if (const CurveSummary* s = find("P1-", "diagonal")) {
    bool ok = s->saturation && *s->saturation >= 4.0 && *s->saturation <= 8.0;
    std::snprintf(buf, sizeof(buf), "P1-/diagonal saturation at %.2f (expect [4, 8])",
                  s->saturation ? *s->saturation : -1.0);
    checks.push_back({"diagonal saturation onset", ok, buf});
  }
  if (const CurveSummary* s = find("P1-", "m1")) {
    double max_res = 0;
    for (const auto& r : result.records)
      if (!r.skipped && r.basis == "P1-" && r.pattern == "m1")
        max_res = std::max(max_res, r.cells_per_wavelength);
    bool ok = (!s->saturation || *s->saturation >= 15.0) && max_res >= 18.0;
    std::snprintf(buf, sizeof(buf),
                  "P1-/m1 scaling persists to %.1f cells/wavelength%s", max_res,
                  s->saturation ? " (saturation detected)" : "");
    checks.push_back({"m1 scaling persistence", ok, buf});
  }
  return checks;
}

}  // namespace sfeec
