#pragma once

#include <utility>
#include <vector>

#include "sfeec/operators.hpp"
#include "sfeec/sparse.hpp"

namespace sfeec {

enum class PatternKind { Diagonal, M1, M1Squared, Dense, Custom };

const char* pattern_name(PatternKind k);
PatternKind pattern_from_name(const std::string& s);

// Per-column index sets of admissible nonzeros for the approximate inverse.
struct SparsityPattern {
  int n = 0;
  PatternKind kind = PatternKind::Custom;
  std::vector<std::vector<int>> cols;  // sorted index sets I_l
};

struct SpaiReport {
  double frobenius_residual = 0;  // ||M Q - I||_F
  double avg_nnz_per_row = 0;
  double max_column_residual = 0;
  double wall_time_seconds = 0;
  int fallback_columns = 0;  // columns solved by the eigenvalue-thresholded path
};

struct SpaiOptions {
  bool use_cg = false;  // solve normal equations by conjugate gradients
  double cg_tol = 1e-13;
  Exec exec = Exec::Parallel;
};

SparsityPattern make_pattern(const SparseOperator& m, PatternKind kind);

// Frobenius-optimal approximate inverse on the pattern, one least-squares
// problem per column solved through the normal equations.
std::pair<SparseOperator, SpaiReport> spai_approximate_inverse(
    const SparseOperator& m, const SparsityPattern& pattern,
    const SpaiOptions& opts = {});

struct StencilStats {
  double avg_nnz_per_row = 0;
  int max_nnz_per_row = 0;
  double data_volume_ratio_vs_diagonal = 0;
};

StencilStats stencil_stats(const SparsityPattern& pattern);

}  // namespace sfeec
