#pragma once

#include <algorithm>
#include <utility>

#include "hmflow/core.hpp"

namespace hmflow {

// d/dx1 at node (i,j): central in the interior, one-sided second order on the
// first/last column.
inline Vec3 dx1_at(const SphereField& u, int i, int j) {
  const int N = u.grid.N;
  const double inv2h = 1.0 / (2.0 * u.grid.h);
  if (i == 0) return inv2h * (-3.0 * u.at(0, j) + 4.0 * u.at(1, j) - u.at(2, j));
  if (i == N - 1) return inv2h * (3.0 * u.at(N - 1, j) - 4.0 * u.at(N - 2, j) + u.at(N - 3, j));
  return inv2h * (u.at(i + 1, j) - u.at(i - 1, j));
}

inline Vec3 dx2_at(const SphereField& u, int i, int j) {
  const int N = u.grid.N;
  const double inv2h = 1.0 / (2.0 * u.grid.h);
  if (j == 0) return inv2h * (-3.0 * u.at(i, 0) + 4.0 * u.at(i, 1) - u.at(i, 2));
  if (j == N - 1) return inv2h * (3.0 * u.at(i, N - 1) - 4.0 * u.at(i, N - 2) + u.at(i, N - 3));
  return inv2h * (u.at(i, j + 1) - u.at(i, j - 1));
}

inline std::pair<VectorField3, VectorField3> gradient(const SphereField& u) {
  VectorField3 d1(u.grid), d2(u.grid);
  const int N = u.grid.N;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      d1.set(i, j, dx1_at(u, i, j));
      d2.set(i, j, dx2_at(u, i, j));
    }
  return {std::move(d1), std::move(d2)};
}

// |du|^2 = |d1 u|^2 + |d2 u|^2 per node (no 1/2; quadratures supply it).
inline double energy_density_at(const SphereField& u, int i, int j) {
  Vec3 d1 = dx1_at(u, i, j), d2 = dx2_at(u, i, j);
  return sumsq3(d1.x, d1.y, d1.z) + sumsq3(d2.x, d2.y, d2.z);
}

inline ScalarField energy_density(const SphereField& u) {
  ScalarField e(u.grid);
  const int N = u.grid.N;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) e.at(i, j) = energy_density_at(u, i, j);
  return e;
}

// 5-point Laplacian; zero on the two frozen boundary rings.
inline Vec3 lap5_at(const SphereField& u, int i, int j) {
  if (u.grid.is_boundary(i, j)) return {0.0, 0.0, 0.0};
  const double invh2 = 1.0 / (u.grid.h * u.grid.h);
  Vec3 s = (u.at(i + 1, j) + u.at(i - 1, j)) + (u.at(i, j + 1) + u.at(i, j - 1));
  return invh2 * (s - 4.0 * u.at(i, j));
}

inline VectorField3 lap5(const SphereField& u) {
  VectorField3 out(u.grid);
  const int N = u.grid.N;
  for (int j = 2; j < N - 2; ++j)
    for (int i = 2; i < N - 2; ++i) out.set(i, j, lap5_at(u, i, j));
  return out;
}

// Tension field T(u) = lap u + |du|^2 u; zero on the frozen rings, where the
// flow never moves u anyway.
inline Vec3 tension_at(const SphereField& u, int i, int j) {
  if (u.grid.is_boundary(i, j)) return {0.0, 0.0, 0.0};
  return lap5_at(u, i, j) + energy_density_at(u, i, j) * u.at(i, j);
}

inline VectorField3 tension(const SphereField& u) {
  VectorField3 out(u.grid);
  const int N = u.grid.N;
  for (int j = 2; j < N - 2; ++j)
    for (int i = 2; i < N - 2; ++i) out.set(i, j, tension_at(u, i, j));
  return out;
}

// S11 = (|d1|^2 - |d2|^2)/2, S12 = <d1,d2>, S22 = -S11 by construction.
inline SymTensorField stress_energy(const SphereField& u) {
  SymTensorField S(u.grid);
  const int N = u.grid.N;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      Vec3 d1 = dx1_at(u, i, j), d2 = dx2_at(u, i, j);
      S.s11[u.grid.idx(i, j)] =
          0.5 * (sumsq3(d1.x, d1.y, d1.z) - sumsq3(d2.x, d2.y, d2.z));
      S.s12[u.grid.idx(i, j)] = dot(d1, d2);
    }
  return S;
}

// max over interior nodes and j of |div(S)_j - <T(u), dj u>|.
inline double stress_divergence_residual(const SphereField& u) {
  SymTensorField S = stress_energy(u);
  const int N = u.grid.N;
  const double inv2h = 1.0 / (2.0 * u.grid.h);
  double worst = 0.0;
  for (int j = 2; j < N - 2; ++j)
    for (int i = 2; i < N - 2; ++i) {
      double d1S11 = (S.S11(i + 1, j) - S.S11(i - 1, j)) * inv2h;
      double d2S12 = (S.S12(i, j + 1) - S.S12(i, j - 1)) * inv2h;
      double d1S12 = (S.S12(i + 1, j) - S.S12(i - 1, j)) * inv2h;
      double d2S22 = (S.S22(i, j + 1) - S.S22(i, j - 1)) * inv2h;
      Vec3 T = tension_at(u, i, j);
      double div1 = d1S11 + d2S12 - dot(T, dx1_at(u, i, j));
      double div2 = d1S12 + d2S22 - dot(T, dx2_at(u, i, j));
      worst = std::max({worst, std::abs(div1), std::abs(div2)});
    }
  return worst;
}

struct LocalEnergy {
  double value = 0.0;
  bool clipped = false;  // disk not contained in the grid; computed on the intersection
};

// (1/2) sum_{|x-center| < radius, strict} |du|^2 h^2.
inline LocalEnergy local_energy(const SphereField& u, Vec3 center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("local_energy: radius must be positive");
  const Grid& g = u.grid;
  LocalEnergy out;
  out.clipped = (std::abs(center.x) + radius > g.L) || (std::abs(center.y) + radius > g.L);
  const double r2 = radius * radius;
  int i0 = std::max(0, static_cast<int>(std::floor((center.x - radius + g.L) / g.h)));
  int i1 = std::min(g.N - 1, static_cast<int>(std::ceil((center.x + radius + g.L) / g.h)));
  int j0 = std::max(0, static_cast<int>(std::floor((center.y - radius + g.L) / g.h)));
  int j1 = std::min(g.N - 1, static_cast<int>(std::ceil((center.y + radius + g.L) / g.h)));
  double sum = 0.0;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      double dx = g.x(i) - center.x, dy = g.y(j) - center.y;
      if (dx * dx + dy * dy < r2) sum += energy_density_at(u, i, j);
    }
  out.value = 0.5 * sum * g.h * g.h;
  return out;
}

// Total discrete Dirichlet energy in chord form, (1/2) sum_edges |u_a - u_b|^2.
// Its exact L^2 gradient at interior nodes is -h^2 lap5(u), which is what the
// gradient-consistency check and the flow dissipation bound rely on.
inline double dirichlet_energy(const SphereField& u) {
  const int N = u.grid.N;
  double sum = 0.0;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      if (i + 1 < N) {
        Vec3 d = u.at(i + 1, j) - u.at(i, j);
        sum += sumsq3(d.x, d.y, d.z);
      }
      if (j + 1 < N) {
        Vec3 d = u.at(i, j + 1) - u.at(i, j);
        sum += sumsq3(d.x, d.y, d.z);
      }
    }
  return 0.5 * sum;
}

}  // namespace hmflow
