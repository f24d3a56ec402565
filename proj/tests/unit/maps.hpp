#pragma once

// Deterministic smooth test maps shared across suites.

#include <cmath>

#include "hmflow/bubble.hpp"
#include "hmflow/core.hpp"

namespace testmaps {

using hmflow::Grid;
using hmflow::SphereField;
using hmflow::Vec3;

// Analytic radial cutoff, ~1 in the core, underflows to 0 by r ~ L.
inline double zeta(double r, double L) {
  double q = r / (0.3 * L);
  q *= q;
  return std::exp(-q * q);
}

// Smooth non-harmonic map: projected perturbation of the north pole.
// Boundary rings are snapped to the exact pole afterwards.
inline SphereField smooth_test_map(const Grid& g, double amp = 0.45) {
  SphereField u(g);
  u.boundary_value = {0, 0, 1};
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double x = g.x(i), y = g.y(j);
      double r = std::sqrt(x * x + y * y);
      double a = amp * zeta(r, g.L);
      Vec3 w{std::cos(0.9 * x) * std::cos(0.7 * y),
             0.8 * std::sin(0.6 * x + 0.4 * y),
             0.0};
      u.set(i, j, hmflow::normalized(Vec3{a * w.x, a * w.y, 1.0}));
    }
  hmflow::apply_boundary(u);
  return u;
}

// Smooth tangent field along u, zero on the outer two rings.
inline hmflow::VectorField3 tangent_test_field(const SphereField& u, double phase = 0.0) {
  const Grid& g = u.grid;
  hmflow::VectorField3 v(g);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      if (g.is_boundary(i, j)) continue;
      double x = g.x(i), y = g.y(j);
      double r = std::sqrt(x * x + y * y);
      double a = zeta(r, g.L);
      Vec3 w{a * std::sin(0.8 * x + phase), a * std::cos(1.1 * y - phase),
             a * std::sin(0.5 * (x + y) + 2.0 * phase)};
      Vec3 n = u.at(i, j);
      v.set(i, j, w - hmflow::dot(w, n) * n);
    }
  return v;
}

// Bubble with a smooth compactly supported ripple mixed in and reprojected.
// The seed only dephases the ripple; amp = 0 returns the bubble itself.
inline SphereField perturbed_bubble(const Grid& g, int degree, double lambda,
                                    double amp, int seed) {
  SphereField u = hmflow::make_bubble(g, degree, lambda);
  double p1 = 0.37 * seed, p2 = 1.13 * seed;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      if (g.is_boundary(i, j)) continue;
      double x = g.x(i), y = g.y(j);
      double r = std::sqrt(x * x + y * y);
      double a = amp * zeta(r, g.L);
      Vec3 w{a * std::sin(1.3 * x + p1), a * std::cos(0.8 * y - p2),
             a * std::sin(0.6 * (x - y) + p1)};
      u.set(i, j, hmflow::normalized(u.at(i, j) + w));
    }
  hmflow::apply_boundary(u);
  return u;
}

// Equator-type analytic map u = (cos(a x), sin(a x), 0).
inline SphereField wave_map(const Grid& g, double a) {
  SphereField u(g);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double x = g.x(i);
      u.set(i, j, {std::cos(a * x), std::sin(a * x), 0.0});
    }
  u.boundary_value = {1, 0, 0};
  return u;
}

}  // namespace testmaps
