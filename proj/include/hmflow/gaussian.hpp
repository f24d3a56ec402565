#pragma once

#include <array>
#include <cmath>

#include "hmflow/calculus.hpp"
#include "hmflow/core.hpp"

namespace hmflow {

struct WeightedScale {
  double tau;
  Vec3 center{0, 0, 0};

  explicit WeightedScale(double tau_, Vec3 c = {0, 0, 0}) : tau(tau_), center(c) {
    if (!(tau > 0.0)) throw std::invalid_argument("WeightedScale: tau must be positive");
  }
  // Full-accuracy mode: the Gaussian tail beyond the grid is below e^{-4}.
  bool fits(const Grid& g) const { return 4.0 * std::sqrt(tau) <= g.L; }
};

// Upper bound for the weighted-quadrature tail lost to grid truncation.
inline double weight_tail_bound(const SphereField& u, const WeightedScale& sc) {
  double E = dirichlet_energy(u);
  return std::exp(-u.grid.L * u.grid.L / (4.0 * sc.tau)) * 2.0 * E;
}

namespace detail {
inline double gauss_w(const Grid& g, const WeightedScale& sc, int i, int j, double& r2) {
  double dx = g.x(i) - sc.center.x, dy = g.y(j) - sc.center.y;
  r2 = dx * dx + dy * dy;
  return std::exp(-r2 / (4.0 * sc.tau));
}
}  // namespace detail

// ||f||_tau = sqrt( sum |f|^2 e^{-r^2/4tau} h^2 ), midpoint quadrature.
inline double weighted_norm(const VectorField3& f, const WeightedScale& sc) {
  const Grid& g = f.grid;
  double sum = 0.0, r2;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      Vec3 v = f.at(i, j);
      sum += sumsq3(v.x, v.y, v.z) * detail::gauss_w(g, sc, i, j, r2);
    }
  return std::sqrt(sum * g.h * g.h);
}

inline double weighted_norm(const ScalarField& f, const WeightedScale& sc) {
  const Grid& g = f.grid;
  double sum = 0.0, r2;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double v = f.at(i, j);
      sum += v * v * detail::gauss_w(g, sc, i, j, r2);
    }
  return std::sqrt(sum * g.h * g.h);
}

// T_hat_tau(u) = T(u) - (x/2tau) . du, coordinates relative to scale.center;
// zero on the frozen rings like the tension itself.
inline Vec3 twisted_tension_at(const SphereField& u, const WeightedScale& sc, int i, int j) {
  if (u.grid.is_boundary(i, j)) return {0, 0, 0};
  double xr = u.grid.x(i) - sc.center.x, yr = u.grid.y(j) - sc.center.y;
  Vec3 transport = xr * dx1_at(u, i, j) + yr * dx2_at(u, i, j);
  return tension_at(u, i, j) - (1.0 / (2.0 * sc.tau)) * transport;
}

inline VectorField3 twisted_tension(const SphereField& u, const WeightedScale& sc) {
  VectorField3 out(u.grid);
  for (int j = 2; j < u.grid.N - 2; ++j)
    for (int i = 2; i < u.grid.N - 2; ++i) out.set(i, j, twisted_tension_at(u, sc, i, j));
  return out;
}

// Phi_tau = (1/2) int |du|^2 e^{-r^2/4tau}.
inline double phi(const SphereField& u, const WeightedScale& sc) {
  const Grid& g = u.grid;
  double sum = 0.0, r2;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i)
      sum += energy_density_at(u, i, j) * detail::gauss_w(g, sc, i, j, r2);
  return 0.5 * sum * g.h * g.h;
}

// Psi_tau = (1/2) int r^2 |du|^2 e^{-r^2/4tau}.
inline double psi_quantity(const SphereField& u, const WeightedScale& sc) {
  const Grid& g = u.grid;
  double sum = 0.0, r2;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double w = detail::gauss_w(g, sc, i, j, r2);
      sum += r2 * energy_density_at(u, i, j) * w;
    }
  return 0.5 * sum * g.h * g.h;
}

// Everything the weighted certificates need, in one pass over the field.
struct WeightedSums {
  double Phi = 0, Psi = 0;
  double norm_T = 0, norm_That = 0, norm_rThat = 0, norm_rdu = 0, norm_xdu = 0;
};

inline WeightedSums weighted_sums(const SphereField& u, const WeightedScale& sc) {
  const Grid& g = u.grid;
  double sPhi = 0, sPsi = 0, sT = 0, sTh = 0, srTh = 0, sxdu = 0;
  const double inv2tau = 1.0 / (2.0 * sc.tau);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double r2;
      double w = detail::gauss_w(g, sc, i, j, r2);
      Vec3 d1 = dx1_at(u, i, j), d2 = dx2_at(u, i, j);
      double e = sumsq3(d1.x, d1.y, d1.z) + sumsq3(d2.x, d2.y, d2.z);
      sPhi += e * w;
      sPsi += r2 * e * w;
      if (!g.is_boundary(i, j)) {
        double xr = g.x(i) - sc.center.x, yr = g.y(j) - sc.center.y;
        Vec3 T = lap5_at(u, i, j) + e * u.at(i, j);
        Vec3 Th = T - inv2tau * (xr * d1 + yr * d2);
        sT += sumsq3(T.x, T.y, T.z) * w;
        sTh += sumsq3(Th.x, Th.y, Th.z) * w;
        srTh += r2 * sumsq3(Th.x, Th.y, Th.z) * w;
      }
      Vec3 xdu = (g.x(i) - sc.center.x) * d1 + (g.y(j) - sc.center.y) * d2;
      sxdu += sumsq3(xdu.x, xdu.y, xdu.z) * w;
    }
  double h2 = g.h * g.h;
  WeightedSums out;
  out.Phi = 0.5 * sPhi * h2;
  out.Psi = 0.5 * sPsi * h2;
  out.norm_T = std::sqrt(sT * h2);
  out.norm_That = std::sqrt(sTh * h2);
  out.norm_rThat = std::sqrt(srTh * h2);
  out.norm_rdu = std::sqrt(sPsi * h2);  // ||r du||^2 = 2 Psi
  out.norm_xdu = std::sqrt(sxdu * h2);
  return out;
}

struct DiagnosticRecord {
  double t = 0, tau = 0;
  double Phi = 0, Psi = 0;
  double norm_That = 0, norm_T = 0, norm_rdu = 0, norm_rThat = 0;
  double phi = 0;    // Phi - E0
  double psi = 0;    // sqrt(Psi/tau)
  double delta = 0;  // sqrt(tau) * ||That||
  double eta = 0;    // sqrt(Psi_{4R^2}(u(t)))/R
  double s = 0;      // log(R/sqrt(tau))
  std::vector<std::array<double, 3>> annulus_energies;  // (r_in, r_out, E)
  bool flagged = false;    // weight scale beyond the full-accuracy bound
  bool near_stop = false;  // one of the last strides before a concentration stop
};

inline DiagnosticRecord record_diagnostics(const SphereField& u, double t, double T1,
                                           double R, double E0, Vec3 center = {0, 0, 0}) {
  if (!(t < T1)) throw std::invalid_argument("record_diagnostics: need t < T1");
  const double tau = T1 - t;
  WeightedScale sc(tau, center);
  WeightedSums w = weighted_sums(u, sc);

  DiagnosticRecord rec;
  rec.t = t;
  rec.tau = tau;
  rec.Phi = w.Phi;
  rec.Psi = w.Psi;
  rec.norm_That = w.norm_That;
  rec.norm_T = w.norm_T;
  rec.norm_rdu = w.norm_rdu;
  rec.norm_rThat = w.norm_rThat;
  rec.phi = w.Phi - E0;
  rec.psi = std::sqrt(rec.Psi / rec.tau);
  rec.delta = std::sqrt(tau) * w.norm_That;
  rec.s = std::log(R / std::sqrt(tau));
  rec.eta = std::sqrt(psi_quantity(u, WeightedScale(4.0 * R * R, center))) / R;
  rec.flagged = 4.0 * std::sqrt(tau) > u.grid.L;

  // dyadic annuli around the weight center, innermost first
  const Grid& g = u.grid;
  constexpr int kAnnuli = 7;
  double bins[kAnnuli] = {0};
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double dx = g.x(i) - center.x, dy = g.y(j) - center.y;
      double r = std::sqrt(dx * dx + dy * dy);
      for (int k = 0; k < kAnnuli; ++k) {
        double lo = g.L / double(1 << (k + 1)), hi = g.L / double(1 << k);
        if (r >= lo && r < hi) {
          bins[k] += energy_density_at(u, i, j);
          break;
        }
      }
    }
  for (int k = kAnnuli - 1; k >= 0; --k)
    rec.annulus_energies.push_back(
        {g.L / double(1 << (k + 1)), g.L / double(1 << k), 0.5 * bins[k] * g.h * g.h});
  return rec;
}

}  // namespace hmflow
