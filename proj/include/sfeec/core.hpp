#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sfeec {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Minimal-image displacement on a periodic box; each component ends up in
// [-L/2, L/2].
inline Vec3 periodic_delta(const Vec3& a, const Vec3& b,
                           const std::array<double, 3>& period, int dim) {
  Vec3 d = b - a;
  for (int k = 0; k < dim; ++k) {
    double L = period[(size_t)k];
    d[k] -= L * std::round(d[k] / L);
  }
  return d;
}

inline double periodic_distance(const Vec3& a, const Vec3& b,
                                const std::array<double, 3>& period, int dim) {
  return periodic_delta(a, b, period, dim).norm();
}

// Deterministic, platform-independent RNG (splitmix64).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return (double)(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  Rng r(seed ^ (0x9e3779b97f4a7c15ull * (salt + 1)));
  return r.next_u64();
}

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MeshGenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sfeec
