#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sfeec/core.hpp"

namespace sfeec {

enum class CellKind { Simplex, Cube };

enum class MeshMethod { DelaunayTiled, StructuredJittered };

// Signed boundary incidence of p-faces onto (p-1)-faces.
struct SignedIncidence {
  int p = 0;
  // entries[i] = list of ((p-1)-face id, sign) for p-face i
  std::vector<std::vector<std::pair<int, int>>> entries;
};

// Oriented periodic cell complex: a 2-D triangulation of a torus or a 3-D
// cubical lattice. Immutable once built; faces are identified structurally
// (vertex tuples may repeat under periodic wrap-around).
struct PeriodicMesh {
  int dim = 0;
  CellKind kind = CellKind::Simplex;
  std::array<double, 3> period{0, 0, 0};

  // cubical only
  std::array<int, 3> cells_per_axis{0, 0, 0};
  std::array<double, 3> spacing{0, 0, 0};

  std::vector<Vec3> vertex;  // fundamental-domain coordinates

  // face_vertices[p][i]: vertex ids of p-face i (p = 0..dim); p = 0 is the
  // identity list. Orientation: ascending (id, wrap-shift) for simplices,
  // right-handed axis order for cubes.
  std::array<std::vector<std::vector<int>>, 4> face_vertices;

  // Unwrapped (geometrically contiguous) coordinates of each p-face, aligned
  // with face_vertices.
  std::array<std::vector<std::vector<Vec3>>, 4> face_coords;

  // boundary[p][i] = ((p-1)-face id, sign) list, p = 1..dim
  std::array<std::vector<std::vector<std::pair<int, int>>>, 4> boundary;

  // Per-cell closure in a fixed local order (see family conventions in
  // form_space.cpp): cell_faces[p][cell] = (p-face id, sign) list.
  std::array<std::vector<std::vector<std::pair<int, int>>>, 4> cell_faces;

  int n_faces(int p) const {
    if (p < 0 || p > dim) throw InvalidParameter("face dimension out of range");
    return (int)face_vertices[(size_t)p].size();
  }
  int n_cells() const { return n_faces(dim); }

  double cell_volume(int cell) const;

  // Max over cells of the max pairwise vertex distance (periodic geometry).
  double diameter() const;

  std::string to_json() const;
};

PeriodicMesh generate_cubical_lattice(int nx, int ny, int nz, double dx,
                                      double dy, double dz);

// Delaunay-tiled meshes draw uniform random vertices and then apply a few
// Laplacian relaxation passes; raw uniform point sets give Delaunay meshes too
// irregular for a clean pre-saturation power law.
PeriodicMesh generate_periodic_triangulation(int n_vertices, double Lx,
                                             double Ly, std::uint64_t seed,
                                             MeshMethod method,
                                             double jitter_amplitude = 0.25,
                                             int relaxation_passes = 2);

SignedIncidence boundary_incidence(const PeriodicMesh& mesh, int p);

double mesh_diameter(const PeriodicMesh& mesh);

// Median cell diameter: the representative cell size used for the
// cells-per-wavelength resolution axis (the max diameter is dominated by the
// random ensemble's tail).
double typical_cell_diameter(const PeriodicMesh& mesh);

// Internal: builds a triangulation mesh from triangle instances given as
// (vertex id, wrap shift) triples. Exposed for the structured/Delaunay
// builders and for tests.
struct AnchoredVertex {
  int id = 0;
  std::array<int, 2> shift{0, 0};
};

PeriodicMesh assemble_torus_triangulation(std::vector<Vec3> points, double Lx,
                                          double Ly,
                                          const std::vector<std::array<AnchoredVertex, 3>>& tris);

// Planar Delaunay triangulation of the 3x3-tiled point set, restricted to
// triangles whose circumcenter falls in the fundamental domain.
std::vector<std::array<AnchoredVertex, 3>> delaunay_torus_triangles(
    const std::vector<Vec3>& points, double Lx, double Ly);

double min_triangle_angle(const PeriodicMesh& mesh);

}  // namespace sfeec
