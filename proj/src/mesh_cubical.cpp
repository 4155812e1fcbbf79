#include "sfeec/mesh.hpp"

namespace sfeec {

namespace {

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

// Entity indexing on the periodic lattice: vertex/cell id(i,j,k) = i + nx*(j +
// ny*k); edges and faces carry an axis-major block offset. Edges point along
// +axis; a face with normal axis a is oriented d x^{a+1} ^ d x^{a+2} (cyclic),
// so x-normal faces are dy^dz, y-normal dz^dx, z-normal dx^dy.
PeriodicMesh generate_cubical_lattice(int nx, int ny, int nz, double dx,
                                      double dy, double dz) {
  if (nx < 1 || ny < 1 || nz < 1)
    throw InvalidParameter("cubical lattice: cell counts must be >= 1");
  if (!(dx > 0) || !(dy > 0) || !(dz > 0))
    throw InvalidParameter("cubical lattice: spacings must be > 0");

  PeriodicMesh m;
  m.dim = 3;
  m.kind = CellKind::Cube;
  m.cells_per_axis = {nx, ny, nz};
  m.spacing = {dx, dy, dz};
  m.period = {nx * dx, ny * dy, nz * dz};

  const int n[3] = {nx, ny, nz};
  const double d[3] = {dx, dy, dz};
  const int N = nx * ny * nz;

  auto vid = [&](int i, int j, int k) {
    return wrap(i, nx) + nx * (wrap(j, ny) + ny * wrap(k, nz));
  };
  auto corner = [&](int i, int j, int k) {
    return Vec3{i * dx, j * dy, k * dz};  // unwrapped
  };

  m.vertex.resize((size_t)N);
  m.face_vertices[0].resize((size_t)N);
  m.face_coords[0].resize((size_t)N);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        int v = vid(i, j, k);
        m.vertex[(size_t)v] = corner(i, j, k);
        m.face_vertices[0][(size_t)v] = {v};
        m.face_coords[0][(size_t)v] = {corner(i, j, k)};
      }

  auto eid = [&](int axis, int i, int j, int k) { return axis * N + vid(i, j, k); };
  auto fid = [&](int axis, int i, int j, int k) { return axis * N + vid(i, j, k); };

  // edges
  m.face_vertices[1].resize((size_t)(3 * N));
  m.face_coords[1].resize((size_t)(3 * N));
  m.boundary[1].resize((size_t)(3 * N));
  for (int a = 0; a < 3; ++a) {
    int step[3] = {0, 0, 0};
    step[a] = 1;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          int e = eid(a, i, j, k);
          int head = vid(i + step[0], j + step[1], k + step[2]);
          int tail = vid(i, j, k);
          m.face_vertices[1][(size_t)e] = {tail, head};
          m.face_coords[1][(size_t)e] = {
              corner(i, j, k), corner(i + step[0], j + step[1], k + step[2])};
          m.boundary[1][(size_t)e] = {{head, +1}, {tail, -1}};
        }
  }

  // faces: normal axis a, spanned by a1 = a+1, a2 = a+2 (mod 3)
  m.face_vertices[2].resize((size_t)(3 * N));
  m.face_coords[2].resize((size_t)(3 * N));
  m.boundary[2].resize((size_t)(3 * N));
  for (int a = 0; a < 3; ++a) {
    int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
    int s1[3] = {0, 0, 0}, s2[3] = {0, 0, 0};
    s1[a1] = 1;
    s2[a2] = 1;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          int f = fid(a, i, j, k);
          int c[3] = {i, j, k};
          auto at = [&](int b1, int b2) {
            return std::array<int, 3>{c[0] + b1 * s1[0] + b2 * s2[0],
                                      c[1] + b1 * s1[1] + b2 * s2[1],
                                      c[2] + b1 * s1[2] + b2 * s2[2]};
          };
          // corners in orientation order (0,0) (1,0) (1,1) (0,1)
          for (auto [b1, b2] : {std::pair{0, 0}, {1, 0}, {1, 1}, {0, 1}}) {
            auto p = at(b1, b2);
            m.face_vertices[2][(size_t)f].push_back(vid(p[0], p[1], p[2]));
            m.face_coords[2][(size_t)f].push_back(corner(p[0], p[1], p[2]));
          }
          // counterclockwise boundary in the (a1, a2) plane
          auto p00 = at(0, 0), p10 = at(1, 0), p01 = at(0, 1);
          m.boundary[2][(size_t)f] = {
              {eid(a1, p00[0], p00[1], p00[2]), +1},
              {eid(a2, p10[0], p10[1], p10[2]), +1},
              {eid(a1, p01[0], p01[1], p01[2]), -1},
              {eid(a2, p00[0], p00[1], p00[2]), -1}};
        }
  }

  // cells
  m.face_vertices[3].resize((size_t)N);
  m.face_coords[3].resize((size_t)N);
  m.boundary[3].resize((size_t)N);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        int c = vid(i, j, k);
        for (int bz = 0; bz <= 1; ++bz)
          for (int by = 0; by <= 1; ++by)
            for (int bx = 0; bx <= 1; ++bx) {
              m.face_vertices[3][(size_t)c].push_back(
                  vid(i + bx, j + by, k + bz));
              m.face_coords[3][(size_t)c].push_back(
                  corner(i + bx, j + by, k + bz));
            }
        int base[3] = {i, j, k};
        for (int a = 0; a < 3; ++a) {
          int up[3] = {i, j, k};
          up[a] += 1;
          m.boundary[3][(size_t)c].push_back({fid(a, up[0], up[1], up[2]), +1});
          m.boundary[3][(size_t)c].push_back(
              {fid(a, base[0], base[1], base[2]), -1});
        }
      }

  // per-cell closure, fixed local orders used by the Q1- element
  m.cell_faces[0].resize((size_t)N);
  m.cell_faces[1].resize((size_t)N);
  m.cell_faces[2].resize((size_t)N);
  m.cell_faces[3].resize((size_t)N);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        int c = vid(i, j, k);
        auto& v0 = m.cell_faces[0][(size_t)c];
        for (int bz = 0; bz <= 1; ++bz)
          for (int by = 0; by <= 1; ++by)
            for (int bx = 0; bx <= 1; ++bx)
              v0.push_back({vid(i + bx, j + by, k + bz), +1});
        auto& v1 = m.cell_faces[1][(size_t)c];
        for (int a = 0; a < 3; ++a) {
          int a1 = (a + 1) % 3, a2 = (a + 2) % 3;
          for (auto [b1, b2] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
            int p[3] = {i, j, k};
            p[a1] += b1;
            p[a2] += b2;
            v1.push_back({eid(a, p[0], p[1], p[2]), +1});
          }
        }
        auto& v2 = m.cell_faces[2][(size_t)c];
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b <= 1; ++b) {
            int p[3] = {i, j, k};
            p[a] += b;
            v2.push_back({fid(a, p[0], p[1], p[2]), +1});
          }
        m.cell_faces[3][(size_t)c] = {{c, +1}};
      }

  (void)n;
  (void)d;
  return m;
}

}  // namespace sfeec
