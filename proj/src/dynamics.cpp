#include <cmath>
#include <cstdio>

#include "sfeec/dynamics.hpp"

namespace sfeec {

namespace {

SparseOperator symmetric_part(const SparseOperator& q) {
  if (q.rows != q.cols)
    throw InvalidParameter("SplitScheme: Q must be square");
  std::vector<Triplet> tri;
  tri.reserve((size_t)q.nnz() * 2);
  for (int r = 0; r < q.rows; ++r) {
    auto cs = q.row_cols(r);
    auto vs = q.row_vals(r);
    for (size_t k = 0; k < cs.size(); ++k) {
      tri.push_back({r, cs[k], 0.5 * vs[k]});
      tri.push_back({cs[k], r, 0.5 * vs[k]});
    }
  }
  auto s = operator_from_triplets(q.rows, q.cols, std::move(tri), true);
  return s;
}

}  // namespace

SplitScheme::SplitScheme(SplitKind kind, double dt, const SparseOperator& q,
                         const SparseOperator& c, const SparseOperator& m2,
                         UnitSystem units, const SparseOperator* div,
                         bool warn_cfl)
    : kind_(kind),
      dt_(dt),
      units_(units),
      q_sym_(symmetric_part(q)),
      c_(c),
      ct_(transpose(c)),
      m2_(m2),
      warn_cfl_(warn_cfl) {
  if (!(dt >= 0)) throw InvalidParameter("SplitScheme: dt must be >= 0");
  if (m2_.rows != c_.rows || q_sym_.rows != c_.cols)
    throw InvalidParameter("SplitScheme: operator dimensions inconsistent");
  if (div) div_ = *div;
}

void SplitScheme::flow_he(FieldState& s, double dt) const {
  auto qe = matvec(q_sym_, s.e);
  if (s.formulation == Formulation::AE) {
    for (size_t i = 0; i < s.first.size(); ++i) s.first[i] -= dt * qe[i];
  } else {
    auto cqe = matvec(c_, qe);
    for (size_t i = 0; i < s.first.size(); ++i) s.first[i] -= dt * cqe[i];
  }
}

void SplitScheme::flow_ha(FieldState& s, double dt) const {
  const double f = dt * units_.c2();
  std::vector<double> ctm;
  if (s.formulation == Formulation::AE) {
    auto ca = matvec(c_, s.first);
    ctm = matvec(ct_, matvec(m2_, ca));
  } else {
    ctm = matvec(ct_, matvec(m2_, s.first));
  }
  for (size_t i = 0; i < s.e.size(); ++i) s.e[i] += f * ctm[i];
}

FieldState SplitScheme::step(const FieldState& s) const {
  if (warn_cfl_ && !warned_) {
    warned_ = true;
    double nu = cfl_number();
    if (nu > 2.0)
      std::fprintf(stderr,
                   "sfeec: warning: CFL number %.3g > 2; the splitting is "
                   "likely unstable at dt = %.3g\n",
                   nu, dt_);
  }
  FieldState out = s;
  if (kind_ == SplitKind::Strang) {
    flow_he(out, 0.5 * dt_);
    flow_ha(out, dt_);
    flow_he(out, 0.5 * dt_);
  } else {
    flow_he(out, dt_);
    flow_ha(out, dt_);
  }
  out.time = s.time + dt_;
  return out;
}

double SplitScheme::energy(const FieldState& s) const {
  auto qe = matvec(q_sym_, s.e);
  double he = 0;
  for (size_t i = 0; i < s.e.size(); ++i) he += s.e[i] * qe[i];
  std::vector<double> b =
      s.formulation == Formulation::AE ? matvec(c_, s.first) : s.first;
  auto mb = matvec(m2_, b);
  double ha = 0;
  for (size_t i = 0; i < b.size(); ++i) ha += b[i] * mb[i];
  return 0.5 * (units_.eps0 * he + ha / units_.mu0);
}

double SplitScheme::gauss_residual(const FieldState& s) const {
  if (s.formulation != Formulation::BE)
    throw InvalidParameter("gauss_residual: (b, e) formulation required");
  if (!div_) return 0.0;  // b is a top-degree form; d b vanishes identically
  auto db = matvec(*div_, s.first);
  double m = 0;
  for (double v : db) m = std::max(m, std::abs(v));
  return m;
}

double SplitScheme::cfl_number() const {
  if (cfl_cache_ >= 0) return cfl_cache_;
  // power iteration on Q C^T M2 C
  const int n = q_sym_.rows;
  std::vector<double> x((size_t)n);
  Rng rng(0x5fec5fec);
  for (auto& v : x) v = rng.uniform(-1, 1);
  double lambda = 0;
  for (int it = 0; it < 40; ++it) {
    auto y = matvec(q_sym_, matvec(ct_, matvec(m2_, matvec(c_, x))));
    double nrm = 0;
    for (double v : y) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (nrm == 0) break;
    lambda = nrm;
    for (int i = 0; i < n; ++i) x[(size_t)i] = y[(size_t)i] / nrm;
  }
  cfl_cache_ = dt_ * std::sqrt(units_.c2() * lambda);
  return cfl_cache_;
}

FieldState make_state(Formulation f, std::vector<double> first,
                      std::vector<double> e, double time) {
  FieldState s;
  s.formulation = f;
  s.first = std::move(first);
  s.e = std::move(e);
  s.time = time;
  return s;
}

double symplectic_check(const SplitScheme& scheme, int n1, int max_dofs) {
  if (2 * n1 > max_dofs)
    throw InvalidParameter(
        "symplectic_check: system too large for the dense check");
  const int n2 = 2 * n1;
  std::vector<std::vector<double>> phi((size_t)n2);
  for (int j = 0; j < n2; ++j) {
    FieldState s;
    s.formulation = Formulation::AE;
    s.first.assign((size_t)n1, 0.0);
    s.e.assign((size_t)n1, 0.0);
    if (j < n1)
      s.first[(size_t)j] = 1.0;
    else
      s.e[(size_t)(j - n1)] = 1.0;
    FieldState t = scheme.step(s);
    auto& col = phi[(size_t)j];
    col.resize((size_t)n2);
    for (int i = 0; i < n1; ++i) col[(size_t)i] = t.first[(size_t)i];
    for (int i = 0; i < n1; ++i) col[(size_t)(n1 + i)] = t.e[(size_t)i];
  }
  // J = (1/eps0) [[0, -I], [I, 0]]; deviation = max |Phi^T J Phi - J|
  const double se = 1.0 / scheme.units().eps0;
  double dev = 0;
  for (int i = 0; i < n2; ++i) {
    const auto& ci = phi[(size_t)i];
    for (int j = 0; j < n2; ++j) {
      const auto& cj = phi[(size_t)j];
      // (J cj) then dot with ci
      double acc = 0;
      for (int k = 0; k < n1; ++k)
        acc += ci[(size_t)k] * (-se * cj[(size_t)(n1 + k)]) +
               ci[(size_t)(n1 + k)] * (se * cj[(size_t)k]);
      double target = 0;
      if (j == i + n1) target = -se;
      if (i == j + n1) target = se;
      dev = std::max(dev, std::abs(acc - target));
    }
  }
  return dev;
}

}  // namespace sfeec
