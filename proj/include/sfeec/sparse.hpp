#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sfeec/core.hpp"

namespace sfeec {

// Row-compressed real matrix. Entries within a row are sorted by column and
// explicit zeros are never stored.
struct SparseOperator {
  int rows = 0, cols = 0;
  bool symmetric = false;
  std::vector<int> row_ptr;  // size rows + 1
  std::vector<int> col_idx;
  std::vector<double> val;

  int nnz() const { return (int)col_idx.size(); }

  std::span<const int> row_cols(int r) const {
    return {col_idx.data() + row_ptr[(size_t)r],
            col_idx.data() + row_ptr[(size_t)r + 1]};
  }
  std::span<const double> row_vals(int r) const {
    return {val.data() + row_ptr[(size_t)r],
            val.data() + row_ptr[(size_t)r + 1]};
  }

  double at(int r, int c) const;
};

struct Triplet {
  int r, c;
  double v;
};

// Deterministic COO -> CSR: duplicates are summed in input order, so the
// result is bitwise independent of how the triplets were produced in
// parallel (as long as their order is fixed).
SparseOperator operator_from_triplets(int rows, int cols,
                                      std::vector<Triplet> triplets,
                                      bool symmetric = false);

SparseOperator scaled_identity(int n, double s);
SparseOperator transpose(const SparseOperator& a);

// y = A x
void spmv(const SparseOperator& a, const double* x, double* y);
void spmv_serial(const SparseOperator& a, const double* x, double* y);

std::vector<double> matvec(const SparseOperator& a,
                          const std::vector<double>& x);

double max_abs(const SparseOperator& a);
double max_asymmetry(const SparseOperator& a);

// "row col value" triples, one per line, sorted by (row, col).
void write_coordinate_list(std::ostream& os, const SparseOperator& a);
std::string to_coordinate_list(const SparseOperator& a);
SparseOperator read_coordinate_list(std::istream& is, int rows = -1,
                                    int cols = -1);

std::vector<double> to_dense(const SparseOperator& a);  // row-major

}  // namespace sfeec
