#pragma once

#include <complex>
#include <cstdio>

#include "hmflow/core.hpp"

namespace hmflow {

struct Rot3 {
  // row-major 3x3
  double m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Rot3 identity() { return {}; }

  static Rot3 axis_angle(Vec3 axis, double angle) {
    Vec3 n = normalized(axis);
    double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    Rot3 R;
    R.m[0] = t * n.x * n.x + c;
    R.m[1] = t * n.x * n.y - s * n.z;
    R.m[2] = t * n.x * n.z + s * n.y;
    R.m[3] = t * n.x * n.y + s * n.z;
    R.m[4] = t * n.y * n.y + c;
    R.m[5] = t * n.y * n.z - s * n.x;
    R.m[6] = t * n.x * n.z - s * n.y;
    R.m[7] = t * n.y * n.z + s * n.x;
    R.m[8] = t * n.z * n.z + c;
    return R;
  }

  // Exact +-90 degree rotation about coordinate axis 0,1,2 (entries 0, +-1).
  static Rot3 quarter_turn(int axis, int sign) {
    Rot3 R;
    double s = sign >= 0 ? 1.0 : -1.0;
    switch (axis) {
      case 0: R = {{1, 0, 0, 0, 0, -s, 0, s, 0}}; break;
      case 1: R = {{0, 0, s, 0, 1, 0, -s, 0, 0}}; break;
      default: R = {{0, -s, 0, s, 0, 0, 0, 0, 1}}; break;
    }
    return R;
  }

  Vec3 apply(Vec3 v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  bool is_identity() const {
    static const double id[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    for (int k = 0; k < 9; ++k)
      if (m[k] != id[k]) return false;
    return true;
  }
};

// C^2 cutoff, 0 at t<=0, 1 at t>=1.
inline double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

// Geodesic interpolation from a to b on S^2; t in [0,1].
inline Vec3 slerp(Vec3 a, Vec3 b, double t) {
  double c = dot(a, b);
  double s = norm(cross(a, b));
  double ang = std::atan2(s, c);
  if (s < 1e-12) {
    if (c > 0.0) return normalized(a + t * (b - a));
    // antipodal: pick a deterministic meridian
    Vec3 p = std::abs(a.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    p = normalized(p - dot(p, a) * a);
    double th = t * kPi;
    return std::cos(th) * a + std::sin(th) * p;
  }
  return normalized((std::sin((1.0 - t) * ang) / s) * a + (std::sin(t * ang) / s) * b);
}

// Rational bubble: inverse stereographic projection of w = ((z-center)/lambda)^degree,
// z = x1 + i x2. Image of the center is the south pole; the field is geodesically
// blended to the north pole across |x| in [0.8L, 0.9L], and the rotation is applied
// to the values afterwards. Energy of the unblended map is 4*pi*degree.
inline SphereField make_bubble(const Grid& g, int degree, double lambda,
                               Vec3 center = {0, 0, 0}, const Rot3& rot = Rot3::identity()) {
  if (!(lambda > 0.0)) throw std::invalid_argument("make_bubble: scale must be positive");
  if (degree < 1) throw std::invalid_argument("make_bubble: degree must be >= 1");

  SphereField u(g);
  const Vec3 north{0, 0, 1};
  const double r_lo = 0.8 * g.L, r_hi = 0.9 * g.L;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double x = g.x(i), y = g.y(j);
      double r = std::sqrt(x * x + y * y);
      Vec3 v;
      if (r >= r_hi) {
        v = north;
      } else {
        std::complex<double> w((x - center.x) / lambda, (y - center.y) / lambda);
        std::complex<double> p(1.0, 0.0);
        for (int d = 0; d < degree; ++d) p *= w;
        double q = std::norm(p);
        v = normalized(Vec3{2.0 * p.real(), 2.0 * p.imag(), q - 1.0});
        if (r > r_lo) v = slerp(v, north, smoothstep5((r - r_lo) / (r_hi - r_lo)));
      }
      u.set(i, j, rot.is_identity() ? v : rot.apply(v));
    }
  u.boundary_value = rot.is_identity() ? north : rot.apply(north);
  apply_boundary(u);

  char buf[128];
  std::snprintf(buf, sizeof buf, "bubble degree=%d lambda=%.17g", degree, lambda);
  u.meta["init"] = buf;
  if (lambda > g.L / 10.0)
    u.meta["warning_truncation"] = "scale exceeds L/10; boundary truncation error is not negligible";
  if (lambda < 2.0 * g.h)
    u.meta["warning_resolution"] = "scale below 2h; bubble core under-resolved";
  return u;
}

}  // namespace hmflow
