#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "sfeec/mesh.hpp"

namespace sfeec {

namespace {

using Key = std::tuple<int, int, int>;  // (vertex id, shift x, shift y)

Key key_of(const AnchoredVertex& v) { return {v.id, v.shift[0], v.shift[1]}; }

// Canonical edge identity under periodicity: both endpoints re-anchored so the
// lexicographically smaller (id, shift) sits first with shift zero.
struct EdgeKey {
  int a, b;
  std::array<int, 2> ds;
  bool operator<(const EdgeKey& o) const {
    return std::tie(a, b, ds[0], ds[1]) < std::tie(o.a, o.b, o.ds[0], o.ds[1]);
  }
};

// Returns the canonical key and whether (u -> v) runs along the canonical
// direction.
std::pair<EdgeKey, bool> canonical_edge(const AnchoredVertex& u,
                                        const AnchoredVertex& v) {
  std::array<int, 2> ds{v.shift[0] - u.shift[0], v.shift[1] - u.shift[1]};
  bool forward;
  if (u.id != v.id)
    forward = u.id < v.id;
  else
    forward = ds > std::array<int, 2>{0, 0};
  if (forward) return {{u.id, v.id, ds}, true};
  return {{v.id, u.id, {-ds[0], -ds[1]}}, false};
}

std::array<AnchoredVertex, 3> canonicalize_triangle(
    std::array<AnchoredVertex, 3> t) {
  // re-anchor on the smallest (id, shift) vertex, then sort
  auto lt = [](const AnchoredVertex& a, const AnchoredVertex& b) {
    return key_of(a) < key_of(b);
  };
  std::sort(t.begin(), t.end(), lt);
  for (int i = 2; i >= 0; --i) {
    t[(size_t)i].shift[0] -= t[0].shift[0];
    t[(size_t)i].shift[1] -= t[0].shift[1];
  }
  std::sort(t.begin(), t.end(), lt);
  return t;
}

}  // namespace

PeriodicMesh assemble_torus_triangulation(
    std::vector<Vec3> points, double Lx, double Ly,
    const std::vector<std::array<AnchoredVertex, 3>>& tris) {
  PeriodicMesh m;
  m.dim = 2;
  m.kind = CellKind::Simplex;
  m.period = {Lx, Ly, 0};
  m.vertex = std::move(points);
  const int V = (int)m.vertex.size();

  auto pos = [&](const AnchoredVertex& v) {
    return Vec3{m.vertex[(size_t)v.id].x + v.shift[0] * Lx,
                m.vertex[(size_t)v.id].y + v.shift[1] * Ly, 0};
  };

  std::vector<std::array<AnchoredVertex, 3>> cells;
  cells.reserve(tris.size());
  for (const auto& t : tris) cells.push_back(canonicalize_triangle(t));
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) {
              for (int i = 0; i < 3; ++i)
                if (key_of(a[(size_t)i]) != key_of(b[(size_t)i]))
                  return key_of(a[(size_t)i]) < key_of(b[(size_t)i]);
              return false;
            });

  m.face_vertices[0].resize((size_t)V);
  m.face_coords[0].resize((size_t)V);
  for (int v = 0; v < V; ++v) {
    m.face_vertices[0][(size_t)v] = {v};
    m.face_coords[0][(size_t)v] = {m.vertex[(size_t)v]};
  }

  std::map<EdgeKey, int> edge_ids;
  auto edge_id = [&](const AnchoredVertex& u, const AnchoredVertex& v) {
    auto [key, forward] = canonical_edge(u, v);
    auto it = edge_ids.find(key);
    int id;
    if (it == edge_ids.end()) {
      id = (int)m.face_vertices[1].size();
      edge_ids.emplace(key, id);
      AnchoredVertex tail{key.a, {0, 0}};
      AnchoredVertex head{key.b, key.ds};
      m.face_vertices[1].push_back({tail.id, head.id});
      m.face_coords[1].push_back({pos(tail), pos(head)});
      m.boundary[1].push_back({{head.id, +1}, {tail.id, -1}});
    } else {
      id = it->second;
    }
    return std::pair{id, forward ? +1 : -1};
  };

  const int T = (int)cells.size();
  m.face_vertices[2].resize((size_t)T);
  m.face_coords[2].resize((size_t)T);
  m.boundary[2].resize((size_t)T);
  m.cell_faces[0].resize((size_t)T);
  m.cell_faces[1].resize((size_t)T);
  m.cell_faces[2].resize((size_t)T);

  for (int c = 0; c < T; ++c) {
    const auto& t = cells[(size_t)c];
    for (int i = 0; i < 3; ++i) {
      m.face_vertices[2][(size_t)c].push_back(t[(size_t)i].id);
      m.face_coords[2][(size_t)c].push_back(pos(t[(size_t)i]));
      m.cell_faces[0][(size_t)c].push_back({t[(size_t)i].id, +1});
    }
    // local edges (0,1), (1,2), (0,2); d[v0,v1,v2] = [v1,v2] - [v0,v2] + [v0,v1]
    const int pairs[3][2] = {{0, 1}, {1, 2}, {0, 2}};
    const int bsign[3] = {+1, +1, -1};
    for (int l = 0; l < 3; ++l) {
      auto [id, dir] = edge_id(t[(size_t)pairs[l][0]], t[(size_t)pairs[l][1]]);
      m.cell_faces[1][(size_t)c].push_back({id, dir});
      m.boundary[2][(size_t)c].push_back({id, bsign[l] * dir});
    }
    m.cell_faces[2][(size_t)c] = {{c, +1}};
  }

  const int E = (int)m.face_vertices[1].size();
  if (V - E + T != 0)
    throw MeshGenerationError("torus triangulation: Euler characteristic != 0");
  std::vector<int> edge_use((size_t)E, 0);
  for (const auto& b : m.boundary[2])
    for (auto [e, s] : b) edge_use[(size_t)e] += 1;
  for (int e = 0; e < E; ++e)
    if (edge_use[(size_t)e] != 2)
      throw MeshGenerationError("torus triangulation: dangling edge");
  return m;
}

namespace {

std::vector<std::array<AnchoredVertex, 3>> structured_triangles(int k) {
  std::vector<std::array<AnchoredVertex, 3>> tris;
  tris.reserve((size_t)(2 * k * k));
  auto av = [&](int i, int j) {
    AnchoredVertex v;
    v.id = (i % k) + k * (j % k);
    v.shift = {i / k, j / k};
    return v;
  };
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      tris.push_back({av(i, j), av(i + 1, j), av(i + 1, j + 1)});
      tris.push_back({av(i, j), av(i + 1, j + 1), av(i, j + 1)});
    }
  return tris;
}

}  // namespace

PeriodicMesh generate_periodic_triangulation(int n_vertices, double Lx,
                                             double Ly, std::uint64_t seed,
                                             MeshMethod method,
                                             double jitter_amplitude,
                                             int relaxation_passes) {
  if (n_vertices < 4)
    throw InvalidParameter("periodic triangulation: need >= 4 vertices");
  if (!(Lx > 0) || !(Ly > 0))
    throw InvalidParameter("periodic triangulation: box lengths must be > 0");

  const int max_attempts = 8;
  const double min_angle = 1.0 * M_PI / 180.0;
  std::string last_err = "no attempt made";

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(mix_seed(seed, (std::uint64_t)attempt));
    try {
      if (method == MeshMethod::StructuredJittered) {
        int k = (int)std::lround(std::sqrt((double)n_vertices));
        if (k < 2) k = 2;
        std::vector<Vec3> pts((size_t)(k * k));
        double hx = Lx / k, hy = Ly / k;
        for (int j = 0; j < k; ++j)
          for (int i = 0; i < k; ++i) {
            double jx = jitter_amplitude * rng.uniform(-1, 1) * hx;
            double jy = jitter_amplitude * rng.uniform(-1, 1) * hy;
            pts[(size_t)(i + k * j)] = {i * hx + jx, j * hy + jy, 0};
          }
        PeriodicMesh m = assemble_torus_triangulation(
            std::move(pts), Lx, Ly, structured_triangles(k));
        if (min_triangle_angle(m) < min_angle)
          throw MeshGenerationError("triangle below minimum-angle guard");
        return m;
      }

      std::vector<Vec3> pts((size_t)n_vertices);
      for (auto& p : pts) p = {rng.uniform(0, Lx), rng.uniform(0, Ly), 0};

      const std::array<double, 3> period{Lx, Ly, 0};
      for (int pass = 0; pass < relaxation_passes; ++pass) {
        auto tris = delaunay_torus_triangles(pts, Lx, Ly);
        PeriodicMesh m = assemble_torus_triangulation(pts, Lx, Ly, tris);
        std::vector<Vec3> shift((size_t)n_vertices, Vec3{});
        std::vector<int> deg((size_t)n_vertices, 0);
        for (const auto& ev : m.face_vertices[1]) {
          Vec3 d = periodic_delta(pts[(size_t)ev[0]], pts[(size_t)ev[1]],
                                  period, 2);
          shift[(size_t)ev[0]] = shift[(size_t)ev[0]] + d;
          shift[(size_t)ev[1]] = shift[(size_t)ev[1]] - d;
          deg[(size_t)ev[0]] += 1;
          deg[(size_t)ev[1]] += 1;
        }
        for (int v = 0; v < n_vertices; ++v) {
          double x = pts[(size_t)v].x + 0.5 * shift[(size_t)v].x / deg[(size_t)v];
          double y = pts[(size_t)v].y + 0.5 * shift[(size_t)v].y / deg[(size_t)v];
          pts[(size_t)v] = {x - Lx * std::floor(x / Lx),
                            y - Ly * std::floor(y / Ly), 0};
        }
      }

      // regenerate-with-jitter quality loop: nudge only the vertices of
      // sliver triangles so large point sets converge quickly
      const double nudge = 0.1 * std::min(Lx, Ly) / std::sqrt((double)n_vertices);
      for (int pass = 0; pass < 24; ++pass) {
        auto tris = delaunay_torus_triangles(pts, Lx, Ly);
        PeriodicMesh m = assemble_torus_triangulation(pts, Lx, Ly, tris);
        std::vector<char> bad((size_t)n_vertices, 0);
        bool clean = true;
        for (int c = 0; c < m.n_faces(2); ++c) {
          const auto& xs = m.face_coords[2][(size_t)c];
          double worst = M_PI;
          for (int i = 0; i < 3; ++i) {
            Vec3 u = xs[(size_t)((i + 1) % 3)] - xs[(size_t)i];
            Vec3 v = xs[(size_t)((i + 2) % 3)] - xs[(size_t)i];
            double cosang = u.dot(v) / (u.norm() * v.norm());
            worst = std::min(worst, std::acos(std::clamp(cosang, -1.0, 1.0)));
          }
          if (worst < 1.25 * min_angle) {
            clean = false;
            for (int vtx : m.face_vertices[2][(size_t)c]) bad[(size_t)vtx] = 1;
          }
        }
        if (clean) return m;
        for (int v = 0; v < n_vertices; ++v) {
          if (!bad[(size_t)v]) continue;
          double x = pts[(size_t)v].x + nudge * rng.uniform(-1, 1);
          double y = pts[(size_t)v].y + nudge * rng.uniform(-1, 1);
          pts[(size_t)v] = {x - Lx * std::floor(x / Lx),
                            y - Ly * std::floor(y / Ly), 0};
        }
      }
      throw MeshGenerationError("quality loop did not converge");
    } catch (const MeshGenerationError& e) {
      last_err = e.what();
    }
  }
  throw MeshGenerationError("periodic triangulation failed after retries: " +
                            last_err);
}

}  // namespace sfeec
