#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sfeec/mesh.hpp"

namespace sfeec {

namespace {

struct P2 {
  double x, y;
};

double orient(const P2& a, const P2& b, const P2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// > 0 when d lies inside the circumcircle of ccw triangle (a, b, c)
double incircle(const P2& a, const P2& b, const P2& c, const P2& d) {
  double ax = a.x - d.x, ay = a.y - d.y;
  double bx = b.x - d.x, by = b.y - d.y;
  double cx = c.x - d.x, cy = c.y - d.y;
  double a2 = ax * ax + ay * ay;
  double b2 = bx * bx + by * by;
  double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) +
         a2 * (bx * cy - by * cx);
}

P2 circumcenter(const P2& a, const P2& b, const P2& c) {
  double bx = b.x - a.x, by = b.y - a.y;
  double cx = c.x - a.x, cy = c.y - a.y;
  double d = 2.0 * (bx * cy - by * cx);
  double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  double ux = (cy * b2 - by * c2) / d;
  double uy = (bx * c2 - cx * b2) / d;
  return {a.x + ux, a.y + uy};
}

struct Tri {
  int v[3];
  int nbr[3];  // neighbor opposite v[i], -1 at hull
  bool alive = true;
};

class BowyerWatson {
 public:
  explicit BowyerWatson(std::vector<P2> pts) : pts_(std::move(pts)) {
    double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
    for (const auto& p : pts_) {
      lo_x = std::min(lo_x, p.x);
      lo_y = std::min(lo_y, p.y);
      hi_x = std::max(hi_x, p.x);
      hi_y = std::max(hi_y, p.y);
    }
    double span = std::max(hi_x - lo_x, hi_y - lo_y) + 1.0;
    double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
    int s0 = (int)pts_.size();
    pts_.push_back({cx - 40 * span, cy - 20 * span});
    pts_.push_back({cx + 40 * span, cy - 20 * span});
    pts_.push_back({cx, cy + 40 * span});
    n_real_ = s0;
    tris_.push_back({{s0, s0 + 1, s0 + 2}, {-1, -1, -1}, true});
    last_ = 0;
  }

  void run() {
    std::vector<int> order((size_t)n_real_);
    for (int i = 0; i < n_real_; ++i) order[(size_t)i] = i;
    // grid-bucket order for walk locality
    double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
    for (int i = 0; i < n_real_; ++i) {
      lo_x = std::min(lo_x, pts_[(size_t)i].x);
      lo_y = std::min(lo_y, pts_[(size_t)i].y);
      hi_x = std::max(hi_x, pts_[(size_t)i].x);
      hi_y = std::max(hi_y, pts_[(size_t)i].y);
    }
    int g = std::max(1, (int)std::sqrt((double)n_real_ / 4.0));
    auto bucket = [&](int i) {
      const auto& p = pts_[(size_t)i];
      int bx = std::min(g - 1, (int)((p.x - lo_x) / (hi_x - lo_x + 1e-30) * g));
      int by = std::min(g - 1, (int)((p.y - lo_y) / (hi_y - lo_y + 1e-30) * g));
      // serpentine row order keeps consecutive inserts adjacent
      return (by % 2 == 0) ? by * g + bx : by * g + (g - 1 - bx);
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return bucket(a) < bucket(b); });
    for (int idx : order) insert(idx);
  }

  // triangles with all-real vertices
  std::vector<std::array<int, 3>> triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_real_ || t.v[1] >= n_real_ || t.v[2] >= n_real_) continue;
      out.push_back({t.v[0], t.v[1], t.v[2]});
    }
    return out;
  }

  const P2& point(int i) const { return pts_[(size_t)i]; }

 private:
  int locate(const P2& p) const {
    int cur = last_;
    if (cur < 0 || !tris_[(size_t)cur].alive) {
      for (int i = (int)tris_.size() - 1; i >= 0; --i)
        if (tris_[(size_t)i].alive) {
          cur = i;
          break;
        }
    }
    for (int steps = 0; steps < (int)tris_.size() + 8; ++steps) {
      const Tri& t = tris_[(size_t)cur];
      int next = -1;
      for (int e = 0; e < 3; ++e) {
        const P2& a = pts_[(size_t)t.v[(e + 1) % 3]];
        const P2& b = pts_[(size_t)t.v[(e + 2) % 3]];
        if (orient(a, b, p) < 0) {
          next = t.nbr[e];
          break;
        }
      }
      if (next < 0) return cur;
      cur = next;
    }
    // walk failed (numerical loop); brute-force scan
    for (int i = 0; i < (int)tris_.size(); ++i) {
      const Tri& t = tris_[(size_t)i];
      if (!t.alive) continue;
      bool inside = true;
      for (int e = 0; e < 3 && inside; ++e)
        inside = orient(pts_[(size_t)t.v[(e + 1) % 3]],
                        pts_[(size_t)t.v[(e + 2) % 3]], p) >= 0;
      if (inside) return i;
    }
    throw MeshGenerationError("delaunay: point location failed");
  }

  void insert(int pi) {
    const P2& p = pts_[(size_t)pi];
    int t0 = locate(p);

    ++epoch_;
    seen_.resize(tris_.size() + 16, 0);
    cav_.resize(tris_.size() + 16, 0);

    // cavity = connected set of triangles whose circumcircle contains p
    std::vector<int> cavity;
    std::vector<int> stack{t0};
    seen_[(size_t)t0] = epoch_;
    while (!stack.empty()) {
      int ti = stack.back();
      stack.pop_back();
      const Tri& t = tris_[(size_t)ti];
      if (!t.alive) continue;
      if (incircle(pts_[(size_t)t.v[0]], pts_[(size_t)t.v[1]],
                   pts_[(size_t)t.v[2]], p) <= 0 && ti != t0)
        continue;
      cavity.push_back(ti);
      cav_[(size_t)ti] = epoch_;
      for (int e = 0; e < 3; ++e) {
        int nb = t.nbr[e];
        if (nb >= 0 && seen_[(size_t)nb] != epoch_) {
          seen_[(size_t)nb] = epoch_;
          stack.push_back(nb);
        }
      }
    }

    auto in_cavity = [&](int ti) { return cav_[(size_t)ti] == epoch_; };

    // boundary edges of the cavity, ccw as seen from inside
    struct BEdge {
      int a, b, outside;
    };
    std::vector<BEdge> ring;
    for (int ti : cavity) {
      const Tri& t = tris_[(size_t)ti];
      for (int e = 0; e < 3; ++e) {
        int nb = t.nbr[e];
        if (nb < 0 || !in_cavity(nb))
          ring.push_back({t.v[(e + 1) % 3], t.v[(e + 2) % 3], nb});
      }
    }
    for (int ti : cavity) tris_[(size_t)ti].alive = false;

    // fan of new triangles (p, a, b)
    std::vector<int> fresh;
    fresh.reserve(ring.size());
    for (const auto& be : ring) {
      Tri t;
      t.v[0] = pi;
      t.v[1] = be.a;
      t.v[2] = be.b;
      t.nbr[0] = be.outside;
      t.nbr[1] = -2;
      t.nbr[2] = -2;
      fresh.push_back((int)tris_.size());
      tris_.push_back(t);
      if (be.outside >= 0) {
        Tri& out = tris_[(size_t)be.outside];
        for (int e = 0; e < 3; ++e)
          if ((out.v[(e + 1) % 3] == be.b && out.v[(e + 2) % 3] == be.a))
            out.nbr[e] = fresh.back();
      }
    }
    // link fan neighbors that share vertex edges (p, x)
    for (size_t i = 0; i < fresh.size(); ++i) {
      Tri& ti = tris_[(size_t)fresh[i]];
      for (size_t j = 0; j < fresh.size(); ++j) {
        if (i == j) continue;
        const Tri& tj = tris_[(size_t)fresh[j]];
        if (ti.v[2] == tj.v[1]) ti.nbr[1] = fresh[j];  // edge (v2, p)
        if (ti.v[1] == tj.v[2]) ti.nbr[2] = fresh[j];  // edge (p, v1)
      }
    }
    if (!fresh.empty()) last_ = fresh.back();
  }

  std::vector<P2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> seen_, cav_;
  int epoch_ = 0;
  int n_real_ = 0;
  int last_ = -1;
};

}  // namespace

std::vector<std::array<AnchoredVertex, 3>> delaunay_torus_triangles(
    const std::vector<Vec3>& points, double Lx, double Ly) {
  const int n = (int)points.size();
  std::vector<P2> tiled;
  tiled.reserve((size_t)(9 * n));
  std::vector<std::array<int, 2>> shift_of;
  shift_of.reserve((size_t)(9 * n));
  for (int ty = -1; ty <= 1; ++ty)
    for (int tx = -1; tx <= 1; ++tx)
      for (int i = 0; i < n; ++i) {
        tiled.push_back({points[(size_t)i].x + tx * Lx,
                         points[(size_t)i].y + ty * Ly});
        shift_of.push_back({tx, ty});
      }

  BowyerWatson bw(tiled);
  bw.run();

  std::vector<std::array<AnchoredVertex, 3>> out;
  double max_r2 = 0;
  for (const auto& tv : bw.triangles()) {
    P2 a = bw.point(tv[0]), b = bw.point(tv[1]), c = bw.point(tv[2]);
    P2 cc = circumcenter(a, b, c);
    if (!(cc.x >= 0 && cc.x < Lx && cc.y >= 0 && cc.y < Ly)) continue;
    double r2 = (a.x - cc.x) * (a.x - cc.x) + (a.y - cc.y) * (a.y - cc.y);
    max_r2 = std::max(max_r2, r2);
    std::array<AnchoredVertex, 3> t;
    for (int i = 0; i < 3; ++i) {
      t[(size_t)i].id = tv[(size_t)i] % n;
      t[(size_t)i].shift = shift_of[(size_t)tv[(size_t)i]];
    }
    out.push_back(t);
  }

  // a single ring of tiles only sees circumdisks smaller than the tile
  if (max_r2 > 0.25 * std::min(Lx, Ly) * std::min(Lx, Ly))
    throw MeshGenerationError(
        "delaunay: circumradius exceeds half the period; point set too sparse");
  if ((int)out.size() != 2 * n)
    throw MeshGenerationError("delaunay: extracted triangle count != 2V");
  return out;
}

}  // namespace sfeec
