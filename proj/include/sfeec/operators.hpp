#pragma once

#include <functional>
#include <memory>

#include "sfeec/form_space.hpp"
#include "sfeec/sparse.hpp"

namespace sfeec {

enum class Exec { Serial, Parallel };

// Exterior derivative in the degree-of-freedom bases. Entries are exact small
// rationals (signed incidence for P1-, +-1/spacing for Q1-, dyadic rationals
// for P2-), so d of d cancels identically in floating point.
SparseOperator derivative_matrix(const FormSpace& from, const FormSpace& to);

SparseOperator mass_matrix(const FormSpace& space,
                           Exec exec = Exec::Parallel);

struct L2Error {
  double absolute = 0;
  double relative = 0;
};

L2Error l2_error(const FormSpace& space, const Cochain& c,
                 const AnalyticForm& exact, int quad_order = 6,
                 Exec exec = Exec::Parallel);

double l2_norm(const FormSpace& space, const AnalyticForm& form,
               int quad_order = 6);

using VectorFn = std::function<std::vector<double>(const std::vector<double>&)>;

// Q * C^T * M2 * C * a, evaluated right to left; Q may be any approximation of
// the inverse 1-form mass matrix, including an exact factor-and-solve.
Cochain apply_curl_of_curl(const VectorFn& apply_q, const SparseOperator& C,
                           const SparseOperator& CT, const SparseOperator& M2,
                           const Cochain& a);
Cochain apply_curl_of_curl(const SparseOperator& Q, const SparseOperator& C,
                           const SparseOperator& M2, const Cochain& a);

// Exact inverse reference: sparse LDLT factor-and-solve.
class LinearSolveOperator {
 public:
  explicit LinearSolveOperator(const SparseOperator& m);
  std::vector<double> solve(const std::vector<double>& rhs) const;
  VectorFn as_fn() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

std::vector<double> conjugate_gradient(const SparseOperator& a,
                                       const std::vector<double>& b,
                                       double tol = 1e-12, int max_iter = -1);

}  // namespace sfeec
