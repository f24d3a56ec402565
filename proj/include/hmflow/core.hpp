#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmflow {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3& operator+=(Vec3& a, Vec3 b) { a = a + b; return a; }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(Vec3 v) {
  double n = norm(v);
  if (n == 0.0) throw std::runtime_error("normalized: zero vector");
  return (1.0 / n) * v;
}

// Sum of three squares in value order. Axis permutations and sign flips of
// (a,b,c) then produce bit-identical results, which keeps pointwise energy
// quantities exactly invariant under the +-pi/2 axis rotations of the target.
inline double sumsq3(double a, double b, double c) {
  a *= a; b *= b; c *= c;
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  return (a + b) + c;
}

// Uniform N x N grid on [-L,L]^2, node (i,j) at (-L + i h, -L + j h).
struct Grid {
  double L;
  int N;
  double h;

  Grid(double half_width, int nodes_per_side)
      : L(half_width), N(nodes_per_side), h(2.0 * half_width / (nodes_per_side - 1)) {
    if (!(L > 0.0)) throw std::invalid_argument("Grid: half_width must be positive");
    if (N < 16) throw std::invalid_argument("Grid: need at least 16 nodes per side");
  }

  double x(int i) const { return -L + i * h; }
  double y(int j) const { return -L + j * h; }
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(N) + static_cast<std::size_t>(i);
  }
  std::size_t nodes() const { return static_cast<std::size_t>(N) * static_cast<std::size_t>(N); }
  // Outer two node rings carry the frozen boundary value.
  bool is_boundary(int i, int j) const {
    return i < 2 || j < 2 || i >= N - 2 || j >= N - 2;
  }
  bool same_shape(const Grid& o) const { return N == o.N && L == o.L; }
};

struct ScalarField {
  Grid grid;
  std::vector<double> a;

  explicit ScalarField(const Grid& g) : grid(g), a(g.nodes(), 0.0) {}
  double& at(int i, int j) { return a[grid.idx(i, j)]; }
  double at(int i, int j) const { return a[grid.idx(i, j)]; }
};

struct VectorField3 {
  Grid grid;
  std::vector<double> a;  // 3 doubles per node

  explicit VectorField3(const Grid& g) : grid(g), a(3 * g.nodes(), 0.0) {}
  Vec3 at(int i, int j) const {
    const double* p = &a[3 * grid.idx(i, j)];
    return {p[0], p[1], p[2]};
  }
  void set(int i, int j, Vec3 v) {
    double* p = &a[3 * grid.idx(i, j)];
    p[0] = v.x; p[1] = v.y; p[2] = v.z;
  }
};

// Discrete u : [-L,L]^2 -> S^2. Outer two rings hold boundary_value.
struct SphereField {
  Grid grid;
  std::vector<double> a;  // 3 doubles per node
  Vec3 boundary_value{0.0, 0.0, 1.0};
  std::map<std::string, std::string> meta;

  explicit SphereField(const Grid& g) : grid(g), a(3 * g.nodes(), 0.0) {}

  static SphereField constant(const Grid& g, Vec3 p) {
    SphereField u(g);
    p = normalized(p);
    for (std::size_t k = 0; k < u.a.size(); k += 3) {
      u.a[k] = p.x; u.a[k + 1] = p.y; u.a[k + 2] = p.z;
    }
    u.boundary_value = p;
    return u;
  }

  Vec3 at(int i, int j) const {
    const double* p = &a[3 * grid.idx(i, j)];
    return {p[0], p[1], p[2]};
  }
  void set(int i, int j, Vec3 v) {
    double* p = &a[3 * grid.idx(i, j)];
    p[0] = v.x; p[1] = v.y; p[2] = v.z;
  }

  double max_norm_defect() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); k += 3) {
      double n2 = sumsq3(a[k], a[k + 1], a[k + 2]);
      worst = std::max(worst, std::abs(n2 - 1.0));
    }
    return worst;  // |u|^2 defect; |u| defect is half of this to first order
  }
};

inline void apply_boundary(SphereField& u) {
  const int N = u.grid.N;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      if (u.grid.is_boundary(i, j)) u.set(i, j, u.boundary_value);
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* who) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(who) + ": grid shape mismatch");
}

// FNV-1a fingerprints; stable across reruns on one platform, used to tie
// certificates and manifests to the exact bytes they were computed from.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 14695981039346656037ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string digest_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string field_digest(const SphereField& u) {
  std::uint64_t h = fnv1a(&u.grid.L, sizeof(double));
  h = fnv1a(&u.grid.N, sizeof(int), h);
  h = fnv1a(u.a.data(), u.a.size() * sizeof(double), h);
  return digest_hex(h);
}

// Components of the 2x2 stress tensor; s22 = -s11 identically (trace-free).
struct SymTensorField {
  Grid grid;
  std::vector<double> s11, s12;

  explicit SymTensorField(const Grid& g) : grid(g), s11(g.nodes(), 0.0), s12(g.nodes(), 0.0) {}
  double S11(int i, int j) const { return s11[grid.idx(i, j)]; }
  double S12(int i, int j) const { return s12[grid.idx(i, j)]; }
  double S22(int i, int j) const { return -s11[grid.idx(i, j)]; }
};

}  // namespace hmflow
