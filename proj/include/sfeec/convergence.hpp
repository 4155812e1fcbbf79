#pragma once

#include <optional>
#include <string>

#include "sfeec/dynamics.hpp"
#include "sfeec/spai.hpp"
#include "sfeec/yee.hpp"

namespace sfeec {

struct ConvergenceConfig {
  std::vector<Family> bases = {Family::P1, Family::P2};
  std::vector<PatternKind> patterns = {PatternKind::Diagonal, PatternKind::M1,
                                       PatternKind::M1Squared,
                                       PatternKind::Dense};
  double Lx = 1.0, Ly = 1.0;
  std::vector<int> modes = {1, 2, 4};  // k_n = 2 pi n / Ly
  std::vector<int> vertex_ladder = {64,   128,  256,  512,
                                    1024, 2048, 4096, 8192};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  MeshMethod mesh_method = MeshMethod::DelaunayTiled;
  int quadrature_order = 6;
  // resolution window (in cells per wavelength) used for the exponent fits;
  // each curve is additionally clipped to its pre-saturation range
  double fit_window_lo = 1.0, fit_window_hi = 20.0;
};

struct ConvergenceRecord {
  std::string basis;
  std::string pattern;
  int n_vertices = 0;
  double h = 0;
  double cells_per_wavelength = 0;
  double relative_error = 0;
  std::uint64_t seed = 0;
  int mode = 0;
  bool skipped = false;
  std::string reason;
};

struct SpaiResidualRecord {
  std::string basis;
  std::string pattern;
  int n_vertices = 0;
  std::uint64_t seed = 0;
  double frobenius_residual = 0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRecord> records;
  std::vector<SpaiResidualRecord> spai_residuals;
};

ConvergenceResult run_convergence(const ConvergenceConfig& config);

struct PowerLawFit {
  double exponent = 0;
  double intercept = 0;
  double r2 = 0;
  int n_points = 0;
};

// Ordinary least squares of log(error) against log(h / lambda) over records
// whose cells-per-wavelength lies in [window_lo, window_hi].
PowerLawFit fit_power_law(const std::vector<ConvergenceRecord>& records,
                          double window_lo, double window_hi);

// Smallest resolution (cells per wavelength) beyond which the error improves
// by less than 5% per doubling of resolution; nullopt when the decay never
// stalls.
std::optional<double> detect_saturation(
    std::vector<ConvergenceRecord> records);

struct CurveSummary {
  std::string basis;
  std::string pattern;
  bool has_fit = false;  // a window can hold fewer than 3 aggregated points
  double exponent = 0;
  double r2 = 0;
  std::optional<double> saturation;
  int n_points = 0;
};

// Median-aggregates over seeds, then fits each (basis, pattern) curve inside
// the configured window clipped to the pre-saturation range.
std::vector<ConvergenceRecord> median_aggregate(
    const std::vector<ConvergenceRecord>& records);
std::vector<CurveSummary> summarize(const ConvergenceResult& result,
                                    const ConvergenceConfig& config);

void emit_results(const std::vector<ConvergenceRecord>& records,
                  const std::vector<CurveSummary>& fits,
                  const std::string& csv_path, const std::string& json_path);
std::string records_to_csv(const std::vector<ConvergenceRecord>& records);
std::string summaries_to_json(const std::vector<CurveSummary>& fits);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// The Fig.-3-style claims: exponent bands, pattern error ordering with 2%
// slack, strict Frobenius-residual monotonicity, saturation onsets.
std::vector<CheckResult> check_convergence_claims(
    const ConvergenceResult& result, const ConvergenceConfig& config);

}  // namespace sfeec
