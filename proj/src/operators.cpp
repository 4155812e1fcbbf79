#include <cmath>
#include <cstring>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "sfeec/operators.hpp"

namespace sfeec {

namespace {

double face_volume(const PeriodicMesh& m, int p, int id) {
  const auto& xs = m.face_coords[(size_t)p][(size_t)id];
  switch (p) {
    case 0: return 1.0;
    case 1: return (xs[1] - xs[0]).norm();
    case 2:
      if (m.kind == CellKind::Cube)
        return (xs[1] - xs[0]).norm() * (xs[3] - xs[0]).norm();
      else {
        Vec3 u = xs[1] - xs[0], v = xs[2] - xs[0];
        return 0.5 * std::abs(u.x * v.y - u.y * v.x);
      }
    default: return m.cell_volume(id);
  }
}

SparseOperator derivative_q1_p1(const FormSpace& from, const FormSpace& to) {
  const PeriodicMesh& m = *from.mesh;
  const int p1 = to.p;
  std::vector<Triplet> tri;
  for (int f = 0; f < m.n_faces(p1); ++f) {
    double vol_f = from.family == Family::Q1 ? face_volume(m, p1, f) : 1.0;
    for (auto [sub, sign] : m.boundary[(size_t)p1][(size_t)f]) {
      double v = sign;
      if (from.family == Family::Q1) v *= face_volume(m, p1 - 1, sub) / vol_f;
      tri.push_back({f, sub, v});
    }
  }
  return operator_from_triplets(to.n_dofs, from.n_dofs, std::move(tri));
}

SparseOperator derivative_p2(const FormSpace& from, const FormSpace& to) {
  const PeriodicMesh& m = *from.mesh;
  const int V = m.n_faces(0);
  const int E = m.n_faces(1);
  const int T = m.n_faces(2);
  std::vector<Triplet> tri;

  // local edges of a triangle: endpoints in local vertex order, boundary sign
  const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
  const int bsign[3] = {+1, +1, -1};

  if (from.p == 0) {
    // rows: edge moments, then per-cell interior moments
    for (int e = 0; e < E; ++e) {
      int tail = m.boundary[1][(size_t)e][1].first;
      int head = m.boundary[1][(size_t)e][0].first;
      tri.push_back({2 * e, head, +1});
      tri.push_back({2 * e, tail, -1});
      tri.push_back({2 * e + 1, head, +1});
      tri.push_back({2 * e + 1, tail, +1});
      tri.push_back({2 * e + 1, V + e, -2});
    }
    for (int c = 0; c < T; ++c) {
      for (int i = 1; i <= 2; ++i) {
        int row = 2 * E + 2 * c + (i - 1);
        for (int l = 0; l < 3; ++l) {
          int la = pairs[l][0], lb = pairs[l][1];
          int ge = m.cell_faces[1][(size_t)c][(size_t)l].first;
          int va = m.cell_faces[0][(size_t)c][(size_t)la].first;
          int vb = m.cell_faces[0][(size_t)c][(size_t)lb].first;
          double s = bsign[l];
          if (i == lb) tri.push_back({row, vb, s});
          if (i == la) tri.push_back({row, va, -s});
          double d = (i == lb ? 1.0 : 0.0) - (i == la ? 1.0 : 0.0);
          if (d != 0.0) tri.push_back({row, V + ge, -s * d});
        }
      }
    }
    return operator_from_triplets(to.n_dofs, from.n_dofs, std::move(tri));
  }

  // from.p == 1: rows are the three cell moments of the 2-form space
  for (int c = 0; c < T; ++c) {
    for (int i = 0; i < 3; ++i) {
      int row = 3 * c + i;
      for (int l = 0; l < 3; ++l) {
        int la = pairs[l][0], lb = pairs[l][1];
        int ge = m.cell_faces[1][(size_t)c][(size_t)l].first;
        double s = bsign[l];
        double sum = (i == la ? 1.0 : 0.0) + (i == lb ? 1.0 : 0.0);
        double dif = (i == lb ? 1.0 : 0.0) - (i == la ? 1.0 : 0.0);
        if (sum != 0.0) tri.push_back({row, 2 * ge, s * sum * 0.5});
        if (dif != 0.0) tri.push_back({row, 2 * ge + 1, s * dif * 0.5});
      }
      if (i == 0) {
        tri.push_back({row, 2 * E + 2 * c, +1});
        tri.push_back({row, 2 * E + 2 * c + 1, +1});
      } else {
        tri.push_back({row, 2 * E + 2 * c + (i - 1), -1});
      }
    }
  }
  return operator_from_triplets(to.n_dofs, from.n_dofs, std::move(tri));
}

}  // namespace

SparseOperator derivative_matrix(const FormSpace& from, const FormSpace& to) {
  if (from.mesh != to.mesh || from.family != to.family)
    throw InvalidParameter("derivative_matrix: incompatible spaces");
  if (to.p != from.p + 1)
    throw InvalidParameter("derivative_matrix: degree must increase by one");
  if (from.family == Family::P2) return derivative_p2(from, to);
  return derivative_q1_p1(from, to);
}

namespace {

int mass_quadrature_order(Family f) {
  switch (f) {
    case Family::Q1: return 3;
    case Family::P1: return 2;
    case Family::P2: return 4;
  }
  return 4;
}

}  // namespace

SparseOperator mass_matrix(const FormSpace& space, Exec exec) {
  const PeriodicMesh& m = *space.mesh;
  const int n_cells = m.n_cells();
  const int nl = space.local_dofs;
  const int nc = space.components;

  auto rule = quadrature_rule(m.kind, mass_quadrature_order(space.family));
  const int nq = (int)rule.points.size();

  // reference basis values at quadrature points, shared by all cells
  std::vector<double> ref((size_t)nq * (size_t)nl * (size_t)nc);
  for (int q = 0; q < nq; ++q)
    space.eval_basis_ref(rule.points[(size_t)q],
                         ref.data() + (size_t)q * (size_t)nl * (size_t)nc);

  std::vector<Triplet> tri((size_t)n_cells * (size_t)nl * (size_t)nl);

#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int c = 0; c < n_cells; ++c) {
    std::vector<double> phys((size_t)nq * (size_t)nl * (size_t)nc);
    std::memcpy(phys.data(), ref.data(), phys.size() * sizeof(double));
    for (int q = 0; q < nq; ++q)
      space.to_physical(c, phys.data() + (size_t)q * (size_t)nl * (size_t)nc,
                        nl);
    double scale = space.jac_abs(c);
    const int* dofs = space.cell_dof_ids(c);
    Triplet* slot = tri.data() + (size_t)c * (size_t)nl * (size_t)nl;
    for (int i = 0; i < nl; ++i)
      for (int j = i; j < nl; ++j) {
        double acc = 0;
        for (int q = 0; q < nq; ++q) {
          const double* vi =
              phys.data() + ((size_t)q * (size_t)nl + (size_t)i) * (size_t)nc;
          const double* vj =
              phys.data() + ((size_t)q * (size_t)nl + (size_t)j) * (size_t)nc;
          double dot = 0;
          for (int k = 0; k < nc; ++k) dot += vi[k] * vj[k];
          acc += rule.weights[(size_t)q] * dot;
        }
        acc *= scale;
        slot[i * nl + j] = {dofs[i], dofs[j], acc};
        slot[j * nl + i] = {dofs[j], dofs[i], acc};  // exact symmetric mirror
      }
  }
  return operator_from_triplets(space.n_dofs, space.n_dofs, std::move(tri),
                                /*symmetric=*/true);
}

L2Error l2_error(const FormSpace& space, const Cochain& c,
                 const AnalyticForm& exact, int quad_order, Exec exec) {
  if (c.rep != Cochain::Rep::Plain)
    throw InvalidParameter("l2_error: plain-representation cochain required");
  if ((int)c.values.size() != space.n_dofs)
    throw InvalidParameter("l2_error: cochain length mismatch");
  const PeriodicMesh& m = *space.mesh;
  const int n_cells = m.n_cells();
  const int nl = space.local_dofs;
  const int nc = space.components;

  auto rule = quadrature_rule(
      m.kind, m.kind == CellKind::Simplex ? std::min(quad_order, 6) : quad_order);
  const int nq = (int)rule.points.size();
  std::vector<double> ref((size_t)nq * (size_t)nl * (size_t)nc);
  for (int q = 0; q < nq; ++q)
    space.eval_basis_ref(rule.points[(size_t)q],
                         ref.data() + (size_t)q * (size_t)nl * (size_t)nc);

  std::vector<double> err2((size_t)n_cells, 0.0), ex2((size_t)n_cells, 0.0);

#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int cell = 0; cell < n_cells; ++cell) {
    std::vector<double> phys((size_t)nq * (size_t)nl * (size_t)nc);
    std::memcpy(phys.data(), ref.data(), phys.size() * sizeof(double));
    for (int q = 0; q < nq; ++q)
      space.to_physical(cell,
                        phys.data() + (size_t)q * (size_t)nl * (size_t)nc, nl);
    const int* dofs = space.cell_dof_ids(cell);
    const auto& xs = m.face_coords[(size_t)m.dim][(size_t)cell];
    double scale = space.jac_abs(cell);
    double e2 = 0, x2 = 0;
    double fx[3], disc[3];
    for (int q = 0; q < nq; ++q) {
      const Vec3& r = rule.points[(size_t)q];
      Vec3 x;
      if (m.kind == CellKind::Cube) {
        x = {xs[0].x + r.x * (xs[1].x - xs[0].x),
             xs[0].y + r.y * (xs[2].y - xs[0].y),
             xs[0].z + r.z * (xs[4].z - xs[0].z)};
      } else {
        x = {xs[0].x + (xs[1].x - xs[0].x) * r.x + (xs[2].x - xs[0].x) * r.y,
             xs[0].y + (xs[1].y - xs[0].y) * r.x + (xs[2].y - xs[0].y) * r.y,
             0};
      }
      exact.eval(x, fx);
      for (int k = 0; k < nc; ++k) disc[k] = 0;
      const double* pv = phys.data() + (size_t)q * (size_t)nl * (size_t)nc;
      for (int l = 0; l < nl; ++l) {
        double coef = c.values[(size_t)dofs[l]];
        for (int k = 0; k < nc; ++k) disc[k] += coef * pv[l * nc + k];
      }
      double d2 = 0, f2 = 0;
      for (int k = 0; k < nc; ++k) {
        double d = disc[k] - fx[k];
        d2 += d * d;
        f2 += fx[k] * fx[k];
      }
      e2 += rule.weights[(size_t)q] * d2;
      x2 += rule.weights[(size_t)q] * f2;
    }
    err2[(size_t)cell] = e2 * scale;
    ex2[(size_t)cell] = x2 * scale;
  }

  double se = 0, sx = 0;
  for (int i = 0; i < n_cells; ++i) {
    se += err2[(size_t)i];
    sx += ex2[(size_t)i];
  }
  if (sx <= 0.0)
    throw std::domain_error("l2_error: exact form has zero norm");
  L2Error out;
  out.absolute = std::sqrt(se);
  out.relative = out.absolute / std::sqrt(sx);
  return out;
}

double l2_norm(const FormSpace& space, const AnalyticForm& form,
               int quad_order) {
  Cochain zero;
  zero.space = &space;
  zero.values.assign((size_t)space.n_dofs, 0.0);
  auto e = l2_error(space, zero, form, quad_order);
  return e.absolute;
}

Cochain apply_curl_of_curl(const VectorFn& apply_q, const SparseOperator& C,
                           const SparseOperator& CT, const SparseOperator& M2,
                           const Cochain& a) {
  if (C.cols != (int)a.values.size() || M2.rows != C.rows ||
      CT.rows != C.cols || CT.cols != M2.rows)
    throw InvalidParameter("apply_curl_of_curl: dimension mismatch");
  auto ca = matvec(C, a.values);
  auto mca = matvec(M2, ca);
  auto ctmca = matvec(CT, mca);
  Cochain out;
  out.space = a.space;
  out.rep = Cochain::Rep::Plain;
  out.values = apply_q(ctmca);
  return out;
}

Cochain apply_curl_of_curl(const SparseOperator& Q, const SparseOperator& C,
                           const SparseOperator& M2, const Cochain& a) {
  auto ct = transpose(C);
  return apply_curl_of_curl(
      [&Q](const std::vector<double>& x) { return matvec(Q, x); }, C, ct, M2,
      a);
}

struct LinearSolveOperator::Impl {
  Eigen::SparseMatrix<double> mat;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

LinearSolveOperator::LinearSolveOperator(const SparseOperator& m)
    : impl_(std::make_shared<Impl>()) {
  std::vector<Eigen::Triplet<double>> tri;
  tri.reserve((size_t)m.nnz());
  for (int r = 0; r < m.rows; ++r) {
    auto cs = m.row_cols(r);
    auto vs = m.row_vals(r);
    for (size_t k = 0; k < cs.size(); ++k)
      tri.emplace_back(r, cs[k], vs[k]);
  }
  impl_->mat.resize(m.rows, m.cols);
  impl_->mat.setFromTriplets(tri.begin(), tri.end());
  impl_->ldlt.compute(impl_->mat);
  if (impl_->ldlt.info() != Eigen::Success)
    throw std::runtime_error("LinearSolveOperator: factorization failed");
}

std::vector<double> LinearSolveOperator::solve(
    const std::vector<double>& rhs) const {
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), (Eigen::Index)rhs.size());
  Eigen::VectorXd x = impl_->ldlt.solve(b);
  return {x.data(), x.data() + x.size()};
}

VectorFn LinearSolveOperator::as_fn() const {
  auto impl = impl_;
  return [impl](const std::vector<double>& rhs) {
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), (Eigen::Index)rhs.size());
    Eigen::VectorXd x = impl->ldlt.solve(b);
    return std::vector<double>{x.data(), x.data() + x.size()};
  };
}

std::vector<double> conjugate_gradient(const SparseOperator& a,
                                       const std::vector<double>& b,
                                       double tol, int max_iter) {
  const int n = a.rows;
  if (max_iter < 0) max_iter = 4 * n;
  std::vector<double> x((size_t)n, 0.0), r = b, p = b, ap((size_t)n);
  double rr = 0, bb = 0;
  for (double v : b) bb += v * v;
  if (bb == 0) return x;
  for (double v : r) rr += v * v;
  for (int it = 0; it < max_iter; ++it) {
    spmv(a, p.data(), ap.data());
    double pap = 0;
    for (int i = 0; i < n; ++i) pap += p[(size_t)i] * ap[(size_t)i];
    double alpha = rr / pap;
    for (int i = 0; i < n; ++i) {
      x[(size_t)i] += alpha * p[(size_t)i];
      r[(size_t)i] -= alpha * ap[(size_t)i];
    }
    double rr_new = 0;
    for (double v : r) rr_new += v * v;
    if (rr_new <= tol * tol * bb) break;
    double beta = rr_new / rr;
    rr = rr_new;
    for (int i = 0; i < n; ++i) p[(size_t)i] = r[(size_t)i] + beta * p[(size_t)i];
  }
  return x;
}

}  // namespace sfeec
