#include <algorithm>
#include <array>
#include <cstring>

#include <Eigen/Dense>

#include "sfeec/form_space.hpp"

namespace sfeec {

const char* family_name(Family f) {
  switch (f) {
    case Family::Q1: return "Q1-";
    case Family::P1: return "P1-";
    case Family::P2: return "P2-";
  }
  return "?";
}

Family family_from_name(const std::string& s) {
  if (s == "Q1-" || s == "q1" || s == "Q1") return Family::Q1;
  if (s == "P1-" || s == "p1" || s == "P1") return Family::P1;
  if (s == "P2-" || s == "p2" || s == "P2") return Family::P2;
  throw InvalidParameter("unknown family: " + s);
}

int form_components(int dim, int p) {
  if (p < 0 || p > dim) throw InvalidParameter("form degree out of range");
  int n = 1, k = 1;
  for (int i = 0; i < p; ++i) {
    n *= dim - i;
    k *= i + 1;
  }
  return n / k;
}

namespace {

inline double lshape(int b, double t) { return b ? t : 1.0 - t; }

// ---- P2 reference elements -------------------------------------------------

// generators of P2 Lambda^0: values at (u, v)
void p2l0_generators(double u, double v, double* out) {
  double l0 = 1 - u - v, l1 = u, l2 = v;
  out[0] = l0;
  out[1] = l1;
  out[2] = l2;
  out[3] = l0 * l1;
  out[4] = l1 * l2;
  out[5] = l0 * l2;
}

// generators of P2^- Lambda^1: (du, dv) components, out[8][2]
void p2l1_generators(double u, double v, double out[8][2]) {
  double l0 = 1 - u - v, l1 = u, l2 = v;
  out[0][0] = l0 + l1;  out[0][1] = l1;        // W01
  out[1][0] = -l2;      out[1][1] = l1;        // W12
  out[2][0] = l2;       out[2][1] = l0 + l2;   // W02
  out[3][0] = l0 - l1;  out[3][1] = -l1;       // S01
  out[4][0] = l2;       out[4][1] = l1;        // S12
  out[5][0] = -l2;      out[5][1] = l0 - l2;   // S02
  out[6][0] = -u * v;   out[6][1] = u * u;     // u (u dv - v du)
  out[7][0] = -v * v;   out[7][1] = u * v;     // v (u dv - v du)
}

// generators of P2^- Lambda^2 = P1 Lambda^2: du^dv coefficients
void p2l2_generators(double u, double v, double* out) {
  out[0] = 1 - u - v;
  out[1] = u;
  out[2] = v;
}

// reference edges in local order (0,1), (1,2), (0,2): start point + direction
const double kEdgeStart[3][2] = {{0, 0}, {1, 0}, {0, 0}};
const double kEdgeDir[3][2] = {{1, 0}, {-1, 1}, {0, 1}};

// Dual-basis coefficient matrices: basis_i = sum_j coef[i][j] * generator_j.
struct P2Tables {
  Eigen::MatrixXd l0;  // 6 x 6
  Eigen::MatrixXd l1;  // 8 x 8
  Eigen::MatrixXd l2;  // 3 x 3
};

P2Tables build_p2_tables() {
  auto seg = segment_rule(7);
  auto tri = quadrature_rule(CellKind::Simplex, 6);

  Eigen::MatrixXd v0(6, 6), v1(8, 8), v2(3, 3);

  // Lambda^0 dofs: vertex values, then parametric edge averages
  {
    const double verts[3][2] = {{0, 0}, {1, 0}, {0, 1}};
    for (int j = 0; j < 6; ++j) {
      double g[6];
      for (int i = 0; i < 3; ++i) {
        p2l0_generators(verts[i][0], verts[i][1], g);
        v0(i, j) = g[j];
      }
      for (int e = 0; e < 3; ++e) {
        double acc = 0;
        for (size_t q = 0; q < seg.points.size(); ++q) {
          double t = seg.points[q].x;
          double u = kEdgeStart[e][0] + t * kEdgeDir[e][0];
          double v = kEdgeStart[e][1] + t * kEdgeDir[e][1];
          p2l0_generators(u, v, g);
          acc += seg.weights[q] * g[j];
        }
        v0(3 + e, j) = acc;
      }
    }
  }

  // Lambda^1 dofs: two moments per edge (against 1 and 2t-1), then the two
  // interior moments int dl1 ^ u and int dl2 ^ u
  {
    for (int j = 0; j < 8; ++j) {
      double g[8][2];
      for (int e = 0; e < 3; ++e) {
        double m0 = 0, m1 = 0;
        for (size_t q = 0; q < seg.points.size(); ++q) {
          double t = seg.points[q].x;
          double u = kEdgeStart[e][0] + t * kEdgeDir[e][0];
          double v = kEdgeStart[e][1] + t * kEdgeDir[e][1];
          p2l1_generators(u, v, g);
          double tang = g[j][0] * kEdgeDir[e][0] + g[j][1] * kEdgeDir[e][1];
          m0 += seg.weights[q] * tang;
          m1 += seg.weights[q] * tang * (2 * t - 1);
        }
        v1(2 * e, j) = m0;
        v1(2 * e + 1, j) = m1;
      }
      double i1 = 0, i2 = 0;  // int u_v and -int u_u over the reference cell
      for (size_t q = 0; q < tri.points.size(); ++q) {
        p2l1_generators(tri.points[q].x, tri.points[q].y, g);
        i1 += tri.weights[q] * g[j][1];
        i2 -= tri.weights[q] * g[j][0];
      }
      v1(6, j) = i1;
      v1(7, j) = i2;
    }
  }

  // Lambda^2 dofs: moments against barycentric coordinates
  {
    for (int j = 0; j < 3; ++j) {
      double g[3];
      for (int i = 0; i < 3; ++i) {
        double acc = 0;
        for (size_t q = 0; q < tri.points.size(); ++q) {
          double lam[3] = {1 - tri.points[q].x - tri.points[q].y,
                           tri.points[q].x, tri.points[q].y};
          p2l2_generators(tri.points[q].x, tri.points[q].y, g);
          acc += tri.weights[q] * lam[i] * g[j];
        }
        v2(i, j) = acc;
      }
    }
  }

  P2Tables t;
  t.l0 = v0.inverse().transpose();
  t.l1 = v1.inverse().transpose();
  t.l2 = v2.inverse().transpose();
  return t;
}

const P2Tables& p2_tables() {
  static const P2Tables t = build_p2_tables();
  return t;
}

}  // namespace

// ---- build_space ------------------------------------------------------------

FormSpace build_space(const PeriodicMesh& mesh, Family family, int p) {
  if (family == Family::Q1 && mesh.kind != CellKind::Cube)
    throw InvalidParameter("Q1- requires a cubical mesh");
  if (family != Family::Q1 && mesh.kind != CellKind::Simplex)
    throw InvalidParameter("P1-/P2- require a simplicial mesh");
  if (p < 0 || p > mesh.dim)
    throw InvalidParameter("form degree out of range for mesh dimension");

  FormSpace s;
  s.mesh = &mesh;
  s.family = family;
  s.p = p;
  s.components = form_components(mesh.dim, p);
  s.build_tables();
  return s;
}

void FormSpace::build_tables() {
  const PeriodicMesh& m = *mesh;
  const int n_cells = m.n_cells();

  if (m.kind == CellKind::Simplex) {
    cell_invjt_.resize((size_t)n_cells * 4);
    cell_det_.resize((size_t)n_cells);
    for (int c = 0; c < n_cells; ++c) {
      const auto& xs = m.face_coords[2][(size_t)c];
      double j00 = xs[1].x - xs[0].x, j01 = xs[2].x - xs[0].x;
      double j10 = xs[1].y - xs[0].y, j11 = xs[2].y - xs[0].y;
      double det = j00 * j11 - j01 * j10;
      cell_det_[(size_t)c] = det;
      double* it = &cell_invjt_[(size_t)c * 4];
      it[0] = j11 / det;
      it[1] = -j10 / det;
      it[2] = -j01 / det;
      it[3] = j00 / det;
    }
  } else {
    cell_det_.assign((size_t)n_cells,
                     m.spacing[0] * m.spacing[1] * m.spacing[2]);
  }

  auto push_identity_dofs = [&](int pp) {
    n_dofs = m.n_faces(pp);
    dof_table.resize((size_t)n_dofs);
    for (int i = 0; i < n_dofs; ++i) dof_table[(size_t)i] = {pp, i, 0};
    const auto& cf = m.cell_faces[(size_t)pp];
    local_dofs = (int)cf[0].size();
    cell_dofs.resize((size_t)n_cells * (size_t)local_dofs);
    for (int c = 0; c < n_cells; ++c)
      for (int l = 0; l < local_dofs; ++l) {
        auto [id, sign] = cf[(size_t)c][(size_t)l];
        if (sign != +1)
          throw InvalidParameter("unexpected local orientation flip");
        cell_dofs[(size_t)c * (size_t)local_dofs + (size_t)l] = id;
      }
  };

  if (family == Family::Q1 || family == Family::P1) {
    push_identity_dofs(p);
    return;
  }

  // P2 family
  const int V = m.n_faces(0);
  const int E = m.n_faces(1);
  const int T = m.n_faces(2);
  if (p == 0) {
    n_dofs = V + E;
    local_dofs = 6;
    dof_table.resize((size_t)n_dofs);
    for (int v = 0; v < V; ++v) dof_table[(size_t)v] = {0, v, 0};
    for (int e = 0; e < E; ++e) dof_table[(size_t)(V + e)] = {1, e, 0};
    cell_dofs.resize((size_t)n_cells * 6);
    for (int c = 0; c < T; ++c) {
      int* d = cell_dofs.data() + (size_t)c * 6;
      for (int l = 0; l < 3; ++l) d[l] = m.cell_faces[0][(size_t)c][(size_t)l].first;
      for (int l = 0; l < 3; ++l)
        d[3 + l] = V + m.cell_faces[1][(size_t)c][(size_t)l].first;
    }
  } else if (p == 1) {
    n_dofs = 2 * E + 2 * T;
    local_dofs = 8;
    dof_table.resize((size_t)n_dofs);
    for (int e = 0; e < E; ++e) {
      dof_table[(size_t)(2 * e)] = {1, e, 0};
      dof_table[(size_t)(2 * e + 1)] = {1, e, 1};
    }
    for (int c = 0; c < T; ++c) {
      dof_table[(size_t)(2 * E + 2 * c)] = {2, c, 0};
      dof_table[(size_t)(2 * E + 2 * c + 1)] = {2, c, 1};
    }
    cell_dofs.resize((size_t)n_cells * 8);
    for (int c = 0; c < T; ++c) {
      int* d = cell_dofs.data() + (size_t)c * 8;
      for (int l = 0; l < 3; ++l) {
        int e = m.cell_faces[1][(size_t)c][(size_t)l].first;
        d[2 * l] = 2 * e;
        d[2 * l + 1] = 2 * e + 1;
      }
      d[6] = 2 * E + 2 * c;
      d[7] = 2 * E + 2 * c + 1;
    }
  } else if (p == 2) {
    n_dofs = 3 * T;
    local_dofs = 3;
    dof_table.resize((size_t)n_dofs);
    for (int c = 0; c < T; ++c)
      for (int i = 0; i < 3; ++i) dof_table[(size_t)(3 * c + i)] = {2, c, i};
    cell_dofs.resize((size_t)n_cells * 3);
    for (int c = 0; c < T; ++c)
      for (int i = 0; i < 3; ++i) cell_dofs[(size_t)(c * 3 + i)] = 3 * c + i;
  } else {
    throw InvalidParameter("P2- supports p <= 2");
  }
}

// ---- reference basis values --------------------------------------------------

void FormSpace::eval_basis_ref(const Vec3& r, double* out) const {
  const double u = r.x, v = r.y, w = r.z;
  if (family == Family::Q1) {
    if (p == 0) {
      int l = 0;
      for (int bz = 0; bz <= 1; ++bz)
        for (int by = 0; by <= 1; ++by)
          for (int bx = 0; bx <= 1; ++bx)
            out[l++] = lshape(bx, u) * lshape(by, v) * lshape(bz, w);
    } else if (p == 1) {
      std::memset(out, 0, sizeof(double) * 12 * 3);
      double rr[3] = {u, v, w};
      int l = 0;
      for (int a = 0; a < 3; ++a) {
        int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
        for (auto [b1, b2] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}})
          out[(l++) * 3 + a] = lshape(b1, rr[a1]) * lshape(b2, rr[a2]);
      }
    } else if (p == 2) {
      std::memset(out, 0, sizeof(double) * 6 * 3);
      double rr[3] = {u, v, w};
      int l = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b <= 1; ++b) out[(l++) * 3 + a] = lshape(b, rr[a]);
    } else {
      out[0] = 1.0;
    }
    return;
  }

  double l0 = 1 - u - v, l1 = u, l2 = v;
  if (family == Family::P1) {
    if (p == 0) {
      out[0] = l0;
      out[1] = l1;
      out[2] = l2;
    } else if (p == 1) {
      out[0] = l0 + l1;  out[1] = l1;       // W01
      out[2] = -l2;      out[3] = l1;       // W12
      out[4] = l2;       out[5] = l0 + l2;  // W02
    } else {
      out[0] = 2.0;
    }
    return;
  }

  // P2
  const P2Tables& tab = p2_tables();
  if (p == 0) {
    double g[6];
    p2l0_generators(u, v, g);
    for (int i = 0; i < 6; ++i) {
      double acc = 0;
      for (int j = 0; j < 6; ++j) acc += tab.l0(i, j) * g[j];
      out[i] = acc;
    }
  } else if (p == 1) {
    double g[8][2];
    p2l1_generators(u, v, g);
    for (int i = 0; i < 8; ++i) {
      double a = 0, b = 0;
      for (int j = 0; j < 8; ++j) {
        a += tab.l1(i, j) * g[j][0];
        b += tab.l1(i, j) * g[j][1];
      }
      out[i * 2] = a;
      out[i * 2 + 1] = b;
    }
  } else {
    double g[3];
    p2l2_generators(u, v, g);
    for (int i = 0; i < 3; ++i) {
      double acc = 0;
      for (int j = 0; j < 3; ++j) acc += tab.l2(i, j) * g[j];
      out[i] = acc;
    }
  }
}

void FormSpace::to_physical(int cell, double* vals, int count) const {
  if (mesh->kind == CellKind::Cube || p == 0) return;  // already physical
  if (p == 1) {
    const double* it = &cell_invjt_[(size_t)cell * 4];
    for (int i = 0; i < count; ++i) {
      double a = vals[i * 2], b = vals[i * 2 + 1];
      vals[i * 2] = it[0] * a + it[1] * b;
      vals[i * 2 + 1] = it[2] * a + it[3] * b;
    }
  } else {
    double inv = 1.0 / cell_det_[(size_t)cell];
    for (int i = 0; i < count; ++i) vals[i] *= inv;
  }
}

void FormSpace::eval_basis(int cell, const Vec3& ref, double* out) const {
  if (cell < 0 || cell >= mesh->n_cells())
    throw InvalidParameter("eval_basis: cell id out of range");
  eval_basis_ref(ref, out);
  to_physical(cell, out, local_dofs);
}

// ---- degree-of-freedom functionals -------------------------------------------

double FormSpace::apply_dof(
    int gdof, const std::function<void(const Vec3&, double*)>& form,
    int quad_order) const {
  const PeriodicMesh& m = *mesh;
  const DofKey key = dof_table[(size_t)gdof];
  double f[3];

  if (key.entity_dim == 0) {
    form(m.face_coords[0][(size_t)key.entity_id][0], f);
    return f[0];
  }

  if (key.entity_dim == 1) {
    const auto& xs = m.face_coords[1][(size_t)key.entity_id];
    Vec3 tail = xs[0], dir = xs[1] - xs[0];
    auto seg = segment_rule(quad_order);
    double acc = 0;
    for (size_t q = 0; q < seg.points.size(); ++q) {
      double t = seg.points[q].x;
      form(tail + t * dir, f);
      if (p == 0) {
        acc += seg.weights[q] * f[0];
      } else {
        double tang = 0;
        for (int c = 0; c < components; ++c) tang += f[c] * dir[c];
        double moment = (family == Family::P2 && key.local == 1) ? (2 * t - 1) : 1.0;
        acc += seg.weights[q] * tang * moment;
      }
    }
    if (family == Family::Q1) acc /= dir.norm();  // face-averaged convention
    return acc;
  }

  if (key.entity_dim == 2 && m.kind == CellKind::Cube) {
    const auto& xs = m.face_coords[2][(size_t)key.entity_id];
    Vec3 o = xs[0], du = xs[1] - xs[0], dv = xs[3] - xs[0];
    int axis = 0;  // normal axis: the coordinate shared by all corners
    for (int a = 0; a < 3; ++a)
      if (du[a] == 0 && dv[a] == 0) axis = a;
    auto seg = segment_rule(quad_order);
    double acc = 0;
    for (size_t qa = 0; qa < seg.points.size(); ++qa)
      for (size_t qb = 0; qb < seg.points.size(); ++qb) {
        form(o + seg.points[qa].x * du + seg.points[qb].x * dv, f);
        acc += seg.weights[qa] * seg.weights[qb] * f[axis];
      }
    return acc;  // face-averaged: weights already integrate the unit square
  }

  if (key.entity_dim == 3) {  // cubical cell average
    const auto& xs = m.face_coords[3][(size_t)key.entity_id];
    Vec3 o = xs[0];
    Vec3 dx = xs[1] - xs[0], dy = xs[2] - xs[0], dz = xs[4] - xs[0];
    auto seg = segment_rule(quad_order);
    double acc = 0;
    for (size_t qa = 0; qa < seg.points.size(); ++qa)
      for (size_t qb = 0; qb < seg.points.size(); ++qb)
        for (size_t qc = 0; qc < seg.points.size(); ++qc) {
          form(o + seg.points[qa].x * dx + seg.points[qb].x * dy
                 + seg.points[qc].x * dz, f);
          acc += seg.weights[qa] * seg.weights[qb] * seg.weights[qc] * f[0];
        }
    return acc;
  }

  // simplicial interior moments
  const int cell = key.entity_id;
  const auto& xs = m.face_coords[2][(size_t)cell];
  auto tri = quadrature_rule(CellKind::Simplex, std::min(quad_order, 6));
  double det = cell_det_[(size_t)cell];
  double acc = 0;
  for (size_t q = 0; q < tri.points.size(); ++q) {
    double u = tri.points[q].x, v = tri.points[q].y;
    Vec3 x{xs[0].x + (xs[1].x - xs[0].x) * u + (xs[2].x - xs[0].x) * v,
           xs[0].y + (xs[1].y - xs[0].y) * u + (xs[2].y - xs[0].y) * v, 0};
    form(x, f);
    if (p == 1) {
      // int over the oriented cell of d(lambda_i) ^ u, i = local + 1
      const double* it = &cell_invjt_[(size_t)cell * 4];
      double gx = key.local == 0 ? it[0] : it[1];
      double gy = key.local == 0 ? it[2] : it[3];
      acc += tri.weights[q] * (gx * f[1] - gy * f[0]) * det;
    } else {
      double lam[3] = {1 - u - v, u, v};
      double weight = (family == Family::P2) ? lam[key.local] : 1.0;
      acc += tri.weights[q] * weight * f[0] * det;
    }
  }
  return acc;
}

Cochain canonical_projection(const FormSpace& space, const AnalyticForm& form,
                             int quad_order) {
  if (form.p != space.p)
    throw InvalidParameter("canonical_projection: form degree mismatch");
  if ((int)form.comp.size() != space.components)
    throw InvalidParameter("canonical_projection: component count mismatch");
  Cochain c;
  c.space = &space;
  c.rep = Cochain::Rep::Plain;
  c.values.resize((size_t)space.n_dofs);
  auto cb = [&form](const Vec3& x, double* out) { form.eval(x, out); };
#pragma omp parallel for schedule(static)
  for (int i = 0; i < space.n_dofs; ++i)
    c.values[(size_t)i] = space.apply_dof(i, cb, quad_order);
  return c;
}

}  // namespace sfeec
