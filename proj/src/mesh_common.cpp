#include <algorithm>
#include <cmath>
#include <sstream>

#include "sfeec/mesh.hpp"

#include "json.hpp"

namespace sfeec {

double PeriodicMesh::cell_volume(int cell) const {
  const auto& xs = face_coords[(size_t)dim][(size_t)cell];
  if (kind == CellKind::Cube) return spacing[0] * spacing[1] * spacing[2];
  Vec3 u = xs[1] - xs[0], v = xs[2] - xs[0];
  return 0.5 * std::abs(u.x * v.y - u.y * v.x);
}

double PeriodicMesh::diameter() const {
  double d2 = 0;
  for (const auto& xs : face_coords[(size_t)dim])
    for (size_t i = 0; i < xs.size(); ++i)
      for (size_t j = i + 1; j < xs.size(); ++j) {
        Vec3 d = xs[j] - xs[i];
        d2 = std::max(d2, d.dot(d));
      }
  return std::sqrt(d2);
}

double mesh_diameter(const PeriodicMesh& mesh) { return mesh.diameter(); }

double typical_cell_diameter(const PeriodicMesh& mesh) {
  std::vector<double> d;
  d.reserve(mesh.face_coords[(size_t)mesh.dim].size());
  for (const auto& xs : mesh.face_coords[(size_t)mesh.dim]) {
    double d2 = 0;
    for (size_t i = 0; i < xs.size(); ++i)
      for (size_t j = i + 1; j < xs.size(); ++j) {
        Vec3 v = xs[j] - xs[i];
        d2 = std::max(d2, v.dot(v));
      }
    d.push_back(std::sqrt(d2));
  }
  std::sort(d.begin(), d.end());
  return d[d.size() / 2];
}

SignedIncidence boundary_incidence(const PeriodicMesh& mesh, int p) {
  if (p < 1 || p > mesh.dim)
    throw InvalidParameter("boundary_incidence: p out of range");
  SignedIncidence inc;
  inc.p = p;
  inc.entries = mesh.boundary[(size_t)p];
  return inc;
}

double min_triangle_angle(const PeriodicMesh& mesh) {
  if (mesh.kind != CellKind::Simplex)
    throw InvalidParameter("min_triangle_angle: simplicial mesh required");
  double worst = M_PI;
  for (const auto& xs : mesh.face_coords[2]) {
    for (int i = 0; i < 3; ++i) {
      Vec3 u = xs[(size_t)((i + 1) % 3)] - xs[(size_t)i];
      Vec3 v = xs[(size_t)((i + 2) % 3)] - xs[(size_t)i];
      double c = u.dot(v) / (u.norm() * v.norm());
      worst = std::min(worst, std::acos(std::clamp(c, -1.0, 1.0)));
    }
  }
  return worst;
}

std::string PeriodicMesh::to_json() const {
  nlohmann::ordered_json j;
  j["dimension"] = dim;
  std::vector<double> per(period.begin(), period.begin() + dim);
  j["periods"] = per;
  auto verts = nlohmann::ordered_json::array();
  for (const auto& v : vertex) {
    if (dim == 2)
      verts.push_back({v.x, v.y});
    else
      verts.push_back({v.x, v.y, v.z});
  }
  j["vertices"] = verts;
  auto faces = nlohmann::ordered_json::object();
  for (int p = 1; p <= dim; ++p)
    faces[std::to_string(p)] = face_vertices[(size_t)p];
  j["faces"] = faces;
  return j.dump();
}

}  // namespace sfeec
