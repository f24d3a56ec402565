#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hmflow/calculus.hpp"
#include "hmflow/core.hpp"
#include "hmflow/gaussian.hpp"

namespace hmflow {

// Run parameters shared by the 2-D and radial engines. T1 anchors the
// weighted diagnostics (tau = T1 - t), so it must lie strictly beyond t_end.
struct FlowConfig {
  Grid grid;
  double dt_safety = 0.2;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  int diagnostic_stride = 25;
  double T1 = 0.0;  // diagnostic anchor time; 0 means "default to 2*t_end + 1"
  double R = 0.0;   // diagnostic length scale; 0 means "default to sqrt(T1)"
  double E0 = 0.0;  // diagnostic energy baseline

  explicit FlowConfig(const Grid& g) : grid(g) {}

  // Fills defaults and enforces the invariants; returns the effective config.
  FlowConfig validated() const {
    FlowConfig c = *this;
    if (!(c.dt_safety > 0.0 && c.dt_safety <= 0.25))
      throw std::invalid_argument("FlowConfig: dt_safety must lie in (0, 0.25]");
    if (!(c.t_end >= 0.0)) throw std::invalid_argument("FlowConfig: t_end must be >= 0");
    if (c.diagnostic_stride < 1)
      throw std::invalid_argument("FlowConfig: diagnostic_stride must be >= 1");
    if (c.T1 == 0.0) c.T1 = 2.0 * c.t_end + 1.0;
    if (!(c.T1 > c.t_end))
      throw std::invalid_argument(
          "FlowConfig: T1 must exceed t_end (weighted diagnostics need tau = T1 - t > 0)");
    if (c.R == 0.0) c.R = std::sqrt(c.T1);
    if (!(c.R > 0.0 && c.R <= std::sqrt(c.T1)))
      throw std::invalid_argument("FlowConfig: need 0 < R <= sqrt(T1)");
    for (double ts : c.snapshot_times)
      if (!(ts >= 0.0)) throw std::invalid_argument("FlowConfig: snapshot times must be >= 0");
    return c;
  }
};

struct FlowRun {
  FlowConfig config;
  std::vector<DiagnosticRecord> records;
  std::vector<std::pair<double, SphereField>> snapshots;  // (time, field)
  double t_final = 0.0;
  long steps = 0;
  bool reached_stop = false;  // resolvability stop max|du| > 2/h
  bool aborted = false;       // instability abort
  std::string stop_reason;

  explicit FlowRun(const FlowConfig& c) : config(c) {}
};

// One forward-Euler step of u_t = T(u) followed by exact renormalization.
// Boundary rings never move: tension vanishes there by construction.
inline SphereField step_2d(const SphereField& u, double dt) {
  const Grid& g = u.grid;
  if (!(dt > 0.0)) throw std::invalid_argument("step_2d: dt must be positive");
  if (dt > 0.25 * g.h * g.h * (1.0 + 1e-12))
    throw std::invalid_argument("step_2d: dt exceeds the explicit stability bound 0.25 h^2");
  SphereField next = u;
  for (int j = 2; j < g.N - 2; ++j)
    for (int i = 2; i < g.N - 2; ++i) {
      Vec3 v = u.at(i, j) + dt * tension_at(u, i, j);
      double n2 = sumsq3(v.x, v.y, v.z);
      if (n2 == 0.0) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "step_2d: renormalization hit a zero vector at node (%d,%d), t-step dt=%g",
                      i, j, dt);
        throw std::runtime_error(buf);
      }
      next.set(i, j, (1.0 / std::sqrt(n2)) * v);
    }
  return next;
}

inline double max_gradient(const SphereField& u) {
  const Grid& g = u.grid;
  double worst = 0.0;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) worst = std::max(worst, energy_density_at(u, i, j));
  return std::sqrt(worst);
}

// Resolvability measure for the stop rule: the largest geodesic turn across a
// single mesh edge, per unit length. Centered chord differences of unit
// vectors are bounded by sqrt(2)/h and could never reach the 2/h stop; the
// one-sided geodesic measure saturates at pi/h and flags one-cell features.
inline double stop_gradient(const SphereField& u) {
  const Grid& g = u.grid;
  double worst = 0.0;
  auto angle = [](const Vec3& a, const Vec3& b) {
    return std::acos(std::min(1.0, std::max(-1.0, dot(a, b))));
  };
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      if (i + 1 < g.N) worst = std::max(worst, angle(u.at(i, j), u.at(i + 1, j)));
      if (j + 1 < g.N) worst = std::max(worst, angle(u.at(i, j), u.at(i, j + 1)));
    }
  return worst / g.h;
}

namespace detail {

inline void mark_near_stop(std::vector<DiagnosticRecord>& recs, int strides = 10) {
  int n = static_cast<int>(recs.size());
  for (int k = std::max(0, n - strides); k < n; ++k) recs[k].near_stop = true;
}

}  // namespace detail

// Time integration with per-stride diagnostics and snapshotting. Terminates at
// t_end, at the resolvability stop max|du| > 2/h, or on an instability abort
// (total energy up more than 1% between strides).
inline FlowRun run_2d(const FlowConfig& config, const SphereField& initial) {
  FlowConfig cfg = config.validated();
  require_same_grid(cfg.grid, initial.grid, "run_2d");
  FlowRun out(cfg);
  SphereField u = initial;
  const double h = cfg.grid.h;
  const double dt_full = cfg.dt_safety * h * h;
  const double stop_bound = 2.0 / h;

  double t = 0.0;
  double energy_prev = dirichlet_energy(u);
  std::size_t next_snap = 0;
  auto snapshot_due = [&]() {
    while (next_snap < cfg.snapshot_times.size() && t >= cfg.snapshot_times[next_snap]) {
      out.snapshots.emplace_back(t, u);
      ++next_snap;
    }
  };

  out.records.push_back(record_diagnostics(u, t, cfg.T1, cfg.R, cfg.E0));
  snapshot_due();

  while (t < cfg.t_end) {
    // stop rule first, every step: an under-resolved core can unwind through
    // the renormalization within a few steps, so a strided check would miss it
    if (stop_gradient(u) > stop_bound) {
      out.reached_stop = true;
      out.stop_reason = "resolvability stop: max|du| > 2/h";
      detail::mark_near_stop(out.records);
      break;
    }
    double dt = std::min(dt_full, cfg.t_end - t);
    u = step_2d(u, dt);
    t += dt;
    ++out.steps;
    snapshot_due();
    if (out.steps % cfg.diagnostic_stride == 0 || t >= cfg.t_end) {
      double energy = dirichlet_energy(u);
      if (energy > energy_prev * 1.01) {
        out.aborted = true;
        out.stop_reason = "instability abort: energy rose more than 1% between strides";
        break;
      }
      energy_prev = energy;
      out.records.push_back(record_diagnostics(u, t, cfg.T1, cfg.R, cfg.E0));
    }
  }
  if (!out.reached_stop && !out.aborted && stop_gradient(u) > stop_bound) {
    out.reached_stop = true;
    out.stop_reason = "resolvability stop: max|du| > 2/h";
    detail::mark_near_stop(out.records);
  }
  out.t_final = t;
  out.snapshots.emplace_back(t, u);  // final state always kept
  return out;
}

}  // namespace hmflow
