#include <map>
#include <set>

#include "doctest.h"
#include "json.hpp"

#include "sfeec/mesh.hpp"

using namespace sfeec;

namespace {

// integer boundary-of-boundary composition; every coefficient must vanish
bool boundary_squared_is_zero(const PeriodicMesh& m, int p) {
  auto inc_p = boundary_incidence(m, p);
  auto inc_q = boundary_incidence(m, p - 1);
  for (const auto& faces : inc_p.entries) {
    std::map<int, int> acc;
    for (auto [f, s] : faces)
      for (auto [g, t] : inc_q.entries[(size_t)f]) acc[g] += s * t;
    for (auto [g, c] : acc)
      if (c != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("cubical lattice entity counts") {
  auto m = generate_cubical_lattice(1, 1, 1, 1, 1, 1);
  CHECK(m.n_faces(0) == 1);
  CHECK(m.n_faces(1) == 3);
  CHECK(m.n_faces(2) == 3);
  CHECK(m.n_faces(3) == 1);

  auto m2 = generate_cubical_lattice(2, 2, 2, 1, 1, 1);
  CHECK(m2.n_faces(0) == 8);
  CHECK(m2.n_faces(1) == 24);
  CHECK(m2.n_faces(2) == 24);
  CHECK(m2.n_faces(3) == 8);

  auto m3 = generate_cubical_lattice(3, 4, 5, 0.5, 1, 2);
  CHECK(m3.n_faces(0) == 60);
  CHECK(m3.n_faces(1) == 180);
  CHECK(m3.n_faces(2) == 180);
  CHECK(m3.n_faces(3) == 60);
}

TEST_CASE("cubical lattice rejects bad parameters") {
  CHECK_THROWS_AS(generate_cubical_lattice(0, 1, 1, 1, 1, 1), InvalidParameter);
  CHECK_THROWS_AS(generate_cubical_lattice(2, 2, 2, 0, 1, 1), InvalidParameter);
  CHECK_THROWS_AS(generate_cubical_lattice(2, 2, 2, -1, 1, 1),
                  InvalidParameter);
}

TEST_CASE("cubical mesh diameter and edge lengths") {
  auto m = generate_cubical_lattice(4, 4, 4, 0.5, 0.5, 0.5);
  CHECK(mesh_diameter(m) == doctest::Approx(0.5 * std::sqrt(3.0)).epsilon(1e-14));
  for (const auto& xs : m.face_coords[1]) {
    double len = (xs[1] - xs[0]).norm();
    CHECK(len == doctest::Approx(0.5).epsilon(1e-14));
    int axis_aligned = 0;
    for (int a = 0; a < 3; ++a)
      if (xs[1][a] != xs[0][a]) ++axis_aligned;
    CHECK(axis_aligned == 1);
  }

  auto m2 = generate_cubical_lattice(2, 2, 2, 1, 1, 1);
  CHECK(mesh_diameter(m2) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("boundary of boundary vanishes on cubical lattices") {
  for (auto [nx, ny, nz] : {std::array{1, 1, 1}, {2, 2, 2}, {3, 2, 4}}) {
    auto m = generate_cubical_lattice(nx, ny, nz, 1.0, 0.5, 2.0);
    CHECK(boundary_squared_is_zero(m, 2));
    CHECK(boundary_squared_is_zero(m, 3));
  }
}

TEST_CASE("structured triangulation counts and Euler characteristic") {
  for (int k : {2, 3, 5}) {
    auto m = generate_periodic_triangulation(k * k, 1.0, 1.0, 3,
                                             MeshMethod::StructuredJittered,
                                             0.0);
    CHECK(m.n_faces(0) == k * k);
    CHECK(m.n_faces(1) == 3 * k * k);
    CHECK(m.n_faces(2) == 2 * k * k);
    CHECK(m.n_faces(0) - m.n_faces(1) + m.n_faces(2) == 0);
    CHECK(boundary_squared_is_zero(m, 2));
  }
}

TEST_CASE("structured right-triangle mesh diameter is the hypotenuse") {
  int k = 4;
  auto m = generate_periodic_triangulation(k * k, 1.0, 1.0, 3,
                                           MeshMethod::StructuredJittered, 0.0);
  double h = 1.0 / k;
  CHECK(mesh_diameter(m) == doctest::Approx(h * std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("simplex boundary signs follow the ascending-vertex convention") {
  auto m = generate_periodic_triangulation(64, 1.0, 1.0, 5,
                                           MeshMethod::DelaunayTiled);
  auto inc = boundary_incidence(m, 2);
  for (int c = 0; c < m.n_faces(2); ++c) {
    REQUIRE(inc.entries[(size_t)c].size() == 3);
    // edges in local order (0,1), (1,2), (0,2) -> signs +, +, -
    const auto& tri_verts = m.face_vertices[2][(size_t)c];
    const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
    const int expect[3] = {+1, +1, -1};
    for (int l = 0; l < 3; ++l) {
      auto [e, s] = inc.entries[(size_t)c][(size_t)l];
      const auto& ev = m.face_vertices[1][(size_t)e];
      // when the edge's stored direction matches the cell-local pair order
      // the sign must equal the boundary formula sign
      if (ev[0] == tri_verts[(size_t)pairs[l][0]] &&
          ev[1] == tri_verts[(size_t)pairs[l][1]])
        CHECK(s == expect[l]);
    }
  }
}

TEST_CASE("delaunay triangulation is deterministic and periodic-Delaunay") {
  auto a = generate_periodic_triangulation(100, 1.0, 1.0, 7,
                                           MeshMethod::DelaunayTiled);
  auto b = generate_periodic_triangulation(100, 1.0, 1.0, 7,
                                           MeshMethod::DelaunayTiled);
  CHECK(a.face_vertices[2] == b.face_vertices[2]);
  CHECK(a.face_vertices[1] == b.face_vertices[1]);

  CHECK(a.n_faces(0) - a.n_faces(1) + a.n_faces(2) == 0);
  CHECK(a.n_faces(2) == 2 * a.n_faces(0));
  CHECK(boundary_squared_is_zero(a, 2));

  // empty-circumcircle property against all periodic images
  const double Lx = 1.0, Ly = 1.0;
  for (int c = 0; c < a.n_faces(2); ++c) {
    const auto& xs = a.face_coords[2][(size_t)c];
    double bx = xs[1].x - xs[0].x, by = xs[1].y - xs[0].y;
    double cx = xs[2].x - xs[0].x, cy = xs[2].y - xs[0].y;
    double d = 2.0 * (bx * cy - by * cx);
    double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    double ux = (cy * b2 - by * c2) / d + xs[0].x;
    double uy = (bx * c2 - cx * b2) / d + xs[0].y;
    double r2 = (xs[0].x - ux) * (xs[0].x - ux) + (xs[0].y - uy) * (xs[0].y - uy);
    for (const auto& p : a.vertex)
      for (int tx = -1; tx <= 1; ++tx)
        for (int ty = -1; ty <= 1; ++ty) {
          double dx = p.x + tx * Lx - ux, dy = p.y + ty * Ly - uy;
          CHECK(dx * dx + dy * dy >= r2 * (1.0 - 1e-9));
        }
  }
}

TEST_CASE("mesh diameter dominates the longest edge") {
  auto m = generate_periodic_triangulation(128, 1.0, 1.0, 11,
                                           MeshMethod::DelaunayTiled);
  double longest = 0;
  for (const auto& xs : m.face_coords[1])
    longest = std::max(longest, (xs[1] - xs[0]).norm());
  CHECK(mesh_diameter(m) >= longest - 1e-15);
}

TEST_CASE("periodic minimal-image distance is symmetric and bounded") {
  std::array<double, 3> period{1.0, 2.0, 0.0};
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    Vec3 a{rng.uniform(0, 1), rng.uniform(0, 2), 0};
    Vec3 b{rng.uniform(0, 1), rng.uniform(0, 2), 0};
    double dab = periodic_distance(a, b, period, 2);
    double dba = periodic_distance(b, a, period, 2);
    CHECK(dab == doctest::Approx(dba).epsilon(1e-15));
    Vec3 d = periodic_delta(a, b, period, 2);
    CHECK(std::abs(d.x) <= 0.5 + 1e-15);
    CHECK(std::abs(d.y) <= 1.0 + 1e-15);
  }
}

TEST_CASE("triangulation rejects bad parameters") {
  CHECK_THROWS_AS(generate_periodic_triangulation(3, 1, 1, 0,
                                                  MeshMethod::DelaunayTiled),
                  InvalidParameter);
  CHECK_THROWS_AS(generate_periodic_triangulation(10, -1, 1, 0,
                                                  MeshMethod::DelaunayTiled),
                  InvalidParameter);
}

TEST_CASE("minimum-angle quality guard holds") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    auto m = generate_periodic_triangulation(96, 1.0, 1.0, seed,
                                             MeshMethod::DelaunayTiled);
    CHECK(min_triangle_angle(m) >= 1.0 * M_PI / 180.0);
  }
}

TEST_CASE("mesh serializes to the documented JSON layout") {
  auto m = generate_periodic_triangulation(16, 1.0, 2.0, 3,
                                           MeshMethod::StructuredJittered, 0.0);
  auto j = nlohmann::json::parse(m.to_json());
  CHECK(j["dimension"] == 2);
  CHECK(j["periods"].size() == 2);
  CHECK(j["periods"][1] == doctest::Approx(2.0));
  CHECK(j["vertices"].size() == 16);
  CHECK(j["vertices"][0].size() == 2);
  CHECK(j["faces"]["1"].size() == (size_t)m.n_faces(1));
  CHECK(j["faces"]["2"].size() == (size_t)m.n_faces(2));
  CHECK(j["faces"]["2"][0].size() == 3);

  auto c = generate_cubical_lattice(2, 2, 2, 1, 1, 1);
  auto jc = nlohmann::json::parse(c.to_json());
  CHECK(jc["dimension"] == 3);
  CHECK(jc["faces"]["3"].size() == 8);
  CHECK(jc["vertices"][0].size() == 3);
}
