#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sfeec/sparse.hpp"

namespace sfeec {

double SparseOperator::at(int r, int c) const {
  auto cols_r = row_cols(r);
  auto it = std::lower_bound(cols_r.begin(), cols_r.end(), c);
  if (it == cols_r.end() || *it != c) return 0.0;
  return row_vals(r)[(size_t)(it - cols_r.begin())];
}

SparseOperator operator_from_triplets(int rows, int cols,
                                      std::vector<Triplet> triplets,
                                      bool symmetric) {
  std::vector<int> order(triplets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Triplet& ta = triplets[(size_t)a];
    const Triplet& tb = triplets[(size_t)b];
    if (ta.r != tb.r) return ta.r < tb.r;
    if (ta.c != tb.c) return ta.c < tb.c;
    return a < b;  // stable within a slot so duplicates sum in input order
  });

  SparseOperator m;
  m.rows = rows;
  m.cols = cols;
  m.symmetric = symmetric;
  m.row_ptr.assign((size_t)rows + 1, 0);

  size_t i = 0;
  while (i < order.size()) {
    const Triplet& t0 = triplets[(size_t)order[i]];
    if (t0.r < 0 || t0.r >= rows || t0.c < 0 || t0.c >= cols)
      throw InvalidParameter("triplet index out of range");
    double sum = 0;
    size_t j = i;
    while (j < order.size()) {
      const Triplet& t = triplets[(size_t)order[j]];
      if (t.r != t0.r || t.c != t0.c) break;
      sum += t.v;
      ++j;
    }
    if (sum != 0.0) {
      m.col_idx.push_back(t0.c);
      m.val.push_back(sum);
      m.row_ptr[(size_t)t0.r + 1] += 1;
    }
    i = j;
  }
  for (int r = 0; r < rows; ++r) m.row_ptr[(size_t)r + 1] += m.row_ptr[(size_t)r];
  return m;
}

SparseOperator scaled_identity(int n, double s) {
  SparseOperator m;
  m.rows = m.cols = n;
  m.symmetric = true;
  m.row_ptr.resize((size_t)n + 1);
  m.col_idx.resize((size_t)n);
  m.val.assign((size_t)n, s);
  for (int i = 0; i <= n; ++i) m.row_ptr[(size_t)i] = i;
  for (int i = 0; i < n; ++i) m.col_idx[(size_t)i] = i;
  return m;
}

SparseOperator transpose(const SparseOperator& a) {
  SparseOperator t;
  t.rows = a.cols;
  t.cols = a.rows;
  t.symmetric = a.symmetric;
  t.row_ptr.assign((size_t)a.cols + 1, 0);
  for (int c : a.col_idx) t.row_ptr[(size_t)c + 1] += 1;
  for (int i = 0; i < a.cols; ++i) t.row_ptr[(size_t)i + 1] += t.row_ptr[(size_t)i];
  t.col_idx.resize(a.col_idx.size());
  t.val.resize(a.val.size());
  std::vector<int> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (int r = 0; r < a.rows; ++r)
    for (int k = a.row_ptr[(size_t)r]; k < a.row_ptr[(size_t)r + 1]; ++k) {
      int c = a.col_idx[(size_t)k];
      int slot = cursor[(size_t)c]++;
      t.col_idx[(size_t)slot] = r;
      t.val[(size_t)slot] = a.val[(size_t)k];
    }
  return t;
}

void spmv(const SparseOperator& a, const double* x, double* y) {
#pragma omp parallel for schedule(static)
  for (int r = 0; r < a.rows; ++r) {
    double acc = 0;
    for (int k = a.row_ptr[(size_t)r]; k < a.row_ptr[(size_t)r + 1]; ++k)
      acc += a.val[(size_t)k] * x[a.col_idx[(size_t)k]];
    y[r] = acc;
  }
}

void spmv_serial(const SparseOperator& a, const double* x, double* y) {
  for (int r = 0; r < a.rows; ++r) {
    double acc = 0;
    for (int k = a.row_ptr[(size_t)r]; k < a.row_ptr[(size_t)r + 1]; ++k)
      acc += a.val[(size_t)k] * x[a.col_idx[(size_t)k]];
    y[r] = acc;
  }
}

std::vector<double> matvec(const SparseOperator& a,
                          const std::vector<double>& x) {
  if ((int)x.size() != a.cols)
    throw InvalidParameter("spmv: dimension mismatch");
  std::vector<double> y((size_t)a.rows);
  spmv(a, x.data(), y.data());
  return y;
}

double max_abs(const SparseOperator& a) {
  double m = 0;
  for (double v : a.val) m = std::max(m, std::abs(v));
  return m;
}

double max_asymmetry(const SparseOperator& a) {
  if (a.rows != a.cols) throw InvalidParameter("max_asymmetry: square only");
  double m = 0;
  for (int r = 0; r < a.rows; ++r) {
    auto cs = a.row_cols(r);
    auto vs = a.row_vals(r);
    for (size_t k = 0; k < cs.size(); ++k)
      m = std::max(m, std::abs(vs[k] - a.at(cs[k], r)));
  }
  return m;
}

void write_coordinate_list(std::ostream& os, const SparseOperator& a) {
  char buf[64];
  for (int r = 0; r < a.rows; ++r) {
    auto cs = a.row_cols(r);
    auto vs = a.row_vals(r);
    for (size_t k = 0; k < cs.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", r, cs[k], vs[k]);
      os << buf;
    }
  }
}

std::string to_coordinate_list(const SparseOperator& a) {
  std::ostringstream os;
  write_coordinate_list(os, a);
  return os.str();
}

SparseOperator read_coordinate_list(std::istream& is, int rows, int cols) {
  std::vector<Triplet> tri;
  int r, c;
  double v;
  int max_r = -1, max_c = -1;
  while (is >> r >> c >> v) {
    tri.push_back({r, c, v});
    max_r = std::max(max_r, r);
    max_c = std::max(max_c, c);
  }
  if (rows < 0) rows = max_r + 1;
  if (cols < 0) cols = max_c + 1;
  auto m = operator_from_triplets(rows, cols, std::move(tri));
  m.symmetric = (rows == cols) && max_asymmetry(m) == 0.0;
  return m;
}

std::vector<double> to_dense(const SparseOperator& a) {
  std::vector<double> d((size_t)a.rows * (size_t)a.cols, 0.0);
  for (int r = 0; r < a.rows; ++r) {
    auto cs = a.row_cols(r);
    auto vs = a.row_vals(r);
    for (size_t k = 0; k < cs.size(); ++k)
      d[(size_t)r * (size_t)a.cols + (size_t)cs[k]] = vs[k];
  }
  return d;
}

}  // namespace sfeec
