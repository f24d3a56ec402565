#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hmflow/bubble.hpp"
#include "hmflow/core.hpp"
#include "hmflow/flow.hpp"
#include "hmflow/gaussian.hpp"

namespace hmflow {

// Corotational ansatz u = (sin h cos m.theta, sin h sin m.theta, -cos h).
// The sign of the third component is chosen so that the profile
// h = 2 arctan((r/lambda)^m) lifts to exactly the degree-m rational map
// produced by make_bubble. The angle h solves
//   h_t = h_rr + h_r/r - m^2 sin(h)cos(h)/r^2,  h(0) = 0,  h(r_max) frozen.
struct RadialProfile {
  std::vector<double> r;  // strictly increasing node radii, r[0] > 0
  std::vector<double> h;  // angle samples; the axis value h(0) = 0 is implicit
  int m = 1;              // corotation index

  int n() const { return static_cast<int>(r.size()); }
  double domain() const { return r.back(); }

  void validate() const {
    if (r.size() < 8 || r.size() != h.size())
      throw std::invalid_argument("RadialProfile: need matching r/h arrays with >= 8 nodes");
    if (!(r.front() > 0.0)) throw std::invalid_argument("RadialProfile: r[0] must be > 0");
    for (std::size_t k = 1; k < r.size(); ++k)
      if (!(r[k] > r[k - 1])) throw std::invalid_argument("RadialProfile: radii must increase");
    if (m < 1) throw std::invalid_argument("RadialProfile: corotation index m must be >= 1");
  }
};

// Geometrically graded radii from r_min_frac*L out to exactly L. The grading
// concentrates nodes at the axis where the profile steepens during blowup.
inline std::vector<double> radial_nodes(double L, double ratio = 1.02,
                                        double r_min_frac = 1e-4) {
  if (!(L > 0.0 && ratio > 1.0 && r_min_frac > 0.0 && r_min_frac < 0.1))
    throw std::invalid_argument("radial_nodes: bad parameters");
  std::vector<double> r;
  double v = r_min_frac * L;
  while (v < L * (1.0 - 1e-12)) {
    r.push_back(v);
    v *= ratio;
  }
  r.push_back(L);
  return r;
}

inline RadialProfile harmonic_profile(const std::vector<double>& r, int m, double lambda) {
  RadialProfile p;
  p.r = r;
  p.m = m;
  p.h.resize(r.size());
  for (std::size_t k = 0; k < r.size(); ++k)
    p.h[k] = 2.0 * std::atan(std::pow(r[k] / lambda, m));
  p.validate();
  return p;
}

// Boundary-turn data B*(2/pi)*arctan(r/lambda): for m = 1 and B > pi the flow
// concentrates at the axis in finite time.
inline RadialProfile boundary_turn_profile(const std::vector<double>& r, double lambda,
                                           double B) {
  RadialProfile p;
  p.r = r;
  p.m = 1;
  p.h.resize(r.size());
  for (std::size_t k = 0; k < r.size(); ++k)
    p.h[k] = B * (2.0 / kPi) * std::atan(r[k] / lambda);
  p.validate();
  return p;
}

namespace radial {

// Nonuniform three-point first derivative; the axis neighbor is the implicit
// ghost node (r=0, h=0), the last node uses a one-sided difference.
inline double dh_at(const RadialProfile& p, int k) {
  int n = p.n();
  if (k == n - 1) return (p.h[n - 1] - p.h[n - 2]) / (p.r[n - 1] - p.r[n - 2]);
  double rm = (k == 0) ? 0.0 : p.r[k - 1];
  double hm = (k == 0) ? 0.0 : p.h[k - 1];
  double dm = p.r[k] - rm, dp = p.r[k + 1] - p.r[k];
  double wim = -dp / (dm * (dm + dp));
  double wi = (dp - dm) / (dm * dp);
  double wip = dm / (dp * (dm + dp));
  return wim * hm + wi * p.h[k] + wip * p.h[k + 1];
}

// |du|^2 of the lifted map along the profile: h_r^2 + m^2 sin^2(h)/r^2.
inline double density_at(const RadialProfile& p, int k) {
  double hr = dh_at(p, k);
  double s = std::sin(p.h[k]) / p.r[k];
  return hr * hr + double(p.m) * double(p.m) * s * s;
}

// Tension of the lifted map points along the meridian; this is its magnitude
// with sign: F = h_rr + h_r/r - m^2 sin(h)cos(h)/r^2. Zero on the frozen
// boundary node, ghost (0,0) at the axis.
inline double tension_at(const RadialProfile& p, int k) {
  int n = p.n();
  if (k == n - 1) return 0.0;
  double rm = (k == 0) ? 0.0 : p.r[k - 1];
  double hm = (k == 0) ? 0.0 : p.h[k - 1];
  double dm = p.r[k] - rm, dp = p.r[k + 1] - p.r[k];
  double hrr = 2.0 * (hm / (dm * (dm + dp)) - p.h[k] / (dm * dp) + p.h[k + 1] / (dp * (dm + dp)));
  double hr = -dp / (dm * (dm + dp)) * hm + (dp - dm) / (dm * dp) * p.h[k] +
              dm / (dp * (dm + dp)) * p.h[k + 1];
  double mm = double(p.m) * double(p.m);
  return hrr + hr / p.r[k] - mm * std::sin(p.h[k]) * std::cos(p.h[k]) / (p.r[k] * p.r[k]);
}

// int f dA = 2 pi int f(r) r dr by the trapezoid rule plus the axis triangle,
// where f is given by node samples and extended by f(0) ~ f(r0).
inline double integral(const RadialProfile& p, const std::vector<double>& f) {
  double s = 0.5 * f[0] * p.r[0] * p.r[0];  // axis piece, f frozen at its first sample
  for (int k = 0; k + 1 < p.n(); ++k)
    s += 0.5 * (f[k] * p.r[k] + f[k + 1] * p.r[k + 1]) * (p.r[k + 1] - p.r[k]);
  return 2.0 * kPi * s;
}

inline double max_gradient(const RadialProfile& p) {
  double worst = 0.0;
  for (int k = 0; k < p.n(); ++k) worst = std::max(worst, density_at(p, k));
  return std::sqrt(worst);
}

}  // namespace radial

// Dirichlet energy of the lifted map inside radius rmax:
// pi int_0^rmax (h_r^2 + m^2 sin^2 h / r^2) r dr.
inline double radial_energy_within(const RadialProfile& p, double rmax) {
  if (!(rmax > 0.0)) throw std::invalid_argument("radial_energy_within: rmax must be > 0");
  double g0 = radial::density_at(p, 0);
  double s = 0.5 * g0 * p.r[0] * p.r[0];
  double gk = g0;
  for (int k = 0; k + 1 < p.n() && p.r[k] < rmax; ++k) {
    double gk1 = radial::density_at(p, k + 1);
    double a = p.r[k], b = std::min(p.r[k + 1], rmax);
    // linear interpolation of the integrand g*r on the clipped segment
    double fa = gk * a;
    double fb_full = gk1 * p.r[k + 1];
    double fb = fa + (fb_full - fa) * (b - a) / (p.r[k + 1] - a);
    s += 0.5 * (fa + fb) * (b - a);
    gk = gk1;
  }
  return kPi * s;
}

inline double reduced_energy(const RadialProfile& p) {
  return radial_energy_within(p, p.domain());
}

// Weighted diagnostics by radial quadrature; mirrors the 2-D record field by
// field so both engines feed the same certificate code.
inline DiagnosticRecord record_diagnostics_radial(const RadialProfile& p, double t, double T1,
                                                  double R, double E0) {
  if (!(t < T1)) throw std::invalid_argument("record_diagnostics_radial: need t < T1");
  const double tau = T1 - t;
  const int n = p.n();
  const double inv2tau = 1.0 / (2.0 * tau);

  std::vector<double> fPhi(n), fPsi(n), fT(n), fTh(n), frTh(n), fPsi4(n);
  for (int k = 0; k < n; ++k) {
    double r2 = p.r[k] * p.r[k];
    double w = std::exp(-r2 / (4.0 * tau));
    double w4 = std::exp(-r2 / (16.0 * R * R));
    double g = radial::density_at(p, k);
    double F = radial::tension_at(p, k);
    double Th = F - p.r[k] * radial::dh_at(p, k) * inv2tau;
    fPhi[k] = 0.5 * g * w;
    fPsi[k] = 0.5 * r2 * g * w;
    fT[k] = F * F * w;
    fTh[k] = Th * Th * w;
    frTh[k] = r2 * Th * Th * w;
    fPsi4[k] = 0.5 * r2 * g * w4;
  }

  DiagnosticRecord rec;
  rec.t = t;
  rec.tau = tau;
  rec.Phi = radial::integral(p, fPhi);
  rec.Psi = radial::integral(p, fPsi);
  rec.norm_T = std::sqrt(radial::integral(p, fT));
  rec.norm_That = std::sqrt(radial::integral(p, fTh));
  rec.norm_rThat = std::sqrt(radial::integral(p, frTh));
  rec.norm_rdu = std::sqrt(2.0 * rec.Psi);
  rec.phi = rec.Phi - E0;
  rec.psi = std::sqrt(rec.Psi / rec.tau);
  rec.delta = std::sqrt(tau) * rec.norm_That;
  rec.s = std::log(R / std::sqrt(tau));
  rec.eta = std::sqrt(radial::integral(p, fPsi4)) / R;
  rec.flagged = 4.0 * std::sqrt(tau) > p.domain();

  const double L = p.domain();
  constexpr int kAnnuli = 7;
  for (int k = kAnnuli - 1; k >= 0; --k) {
    double lo = L / double(1 << (k + 1)), hi = L / double(1 << k);
    double a = std::max(lo, p.r[0]);
    double sum = 0.0;
    double gk = radial::density_at(p, 0);
    for (int q = 0; q + 1 < n; ++q) {
      double gk1 = radial::density_at(p, q + 1);
      double sa = std::max(p.r[q], a), sb = std::min(p.r[q + 1], hi);
      if (sb > sa) {
        double fa = gk + (gk1 - gk) * (sa - p.r[q]) / (p.r[q + 1] - p.r[q]);
        double fb = gk + (gk1 - gk) * (sb - p.r[q]) / (p.r[q + 1] - p.r[q]);
        sum += 0.5 * (fa * sa + fb * sb) * (sb - sa);
      }
      gk = gk1;
    }
    rec.annulus_energies.push_back({lo, hi, kPi * sum});
  }
  return rec;
}

// One semi-implicit step: the linearized operator h_rr + h_r/r - m^2 h/r^2 is
// treated implicitly (tridiagonal solve), the bounded remainder
// N(h) = m^2 (h - sin h cos h)/r^2 explicitly. The last node is frozen but its
// coupling into row n-2 is kept, so the interior sees the true boundary value.
inline RadialProfile step_equivariant(const RadialProfile& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_equivariant: dt must be positive");
  const int n = p.n();
  const double mm = double(p.m) * double(p.m);

  std::vector<double> low(n), diag(n), up(n), rhs(n);
  for (int k = 0; k < n - 1; ++k) {
    double rm = (k == 0) ? 0.0 : p.r[k - 1];
    double dm = p.r[k] - rm, dp = p.r[k + 1] - p.r[k];
    double rk = p.r[k];
    double a = 2.0 / (dm * (dm + dp)) - dp / (dm * (dm + dp)) / rk;
    double b = -2.0 / (dm * dp) + (dp - dm) / (dm * dp) / rk - mm / (rk * rk);
    double c = 2.0 / (dp * (dm + dp)) + dm / (dp * (dm + dp)) / rk;
    low[k] = -dt * a;
    diag[k] = 1.0 - dt * b;
    up[k] = -dt * c;
    double N = mm * (p.h[k] - std::sin(p.h[k]) * std::cos(p.h[k])) / (rk * rk);
    rhs[k] = p.h[k] + dt * N;
  }
  low[n - 1] = 0.0;
  diag[n - 1] = 1.0;
  up[n - 1] = 0.0;
  rhs[n - 1] = p.h[n - 1];  // frozen boundary

  // Thomas elimination. Row 0's sub-diagonal multiplies the ghost h(0)=0.
  std::vector<double> cp(n), dpv(n);
  cp[0] = up[0] / diag[0];
  dpv[0] = rhs[0] / diag[0];
  for (int k = 1; k < n; ++k) {
    double denom = diag[k] - low[k] * cp[k - 1];
    cp[k] = up[k] / denom;
    dpv[k] = (rhs[k] - low[k] * dpv[k - 1]) / denom;
  }
  RadialProfile next = p;
  next.h[n - 1] = dpv[n - 1];
  for (int k = n - 2; k >= 0; --k) next.h[k] = dpv[k] - cp[k] * next.h[k + 1];
  for (int k = 0; k < n; ++k)
    if (!std::isfinite(next.h[k]))
      throw std::runtime_error("step_equivariant: solver produced a non-finite value at node " +
                               std::to_string(k) + " (r=" + std::to_string(p.r[k]) +
                               ", dt=" + std::to_string(dt) + ")");
  return next;
}

struct RadialRun {
  FlowConfig config;
  RadialProfile initial;
  std::vector<DiagnosticRecord> records;
  std::vector<double> lambda_marks;  // concentration proxy 2/max|du| per record
  std::vector<std::pair<double, RadialProfile>> snapshots;
  double t_final = 0.0;
  long steps = 0;
  bool reached_stop = false;
  bool aborted = false;
  std::string stop_reason;

  RadialRun(const FlowConfig& c, const RadialProfile& p) : config(c), initial(p) {}
};

// Radial integrator. The time step dt = min(dt_max, dt_safety/max|du|^2)
// tracks the Lipschitz constant of the explicit part, which is bounded by
// 2 max|du|^2; the implicit solve absorbs the 1/dr^2 stiffness of the graded
// mesh, whose finest spacing would otherwise force dt below 1e-10.
// Stops when max|du| exceeds 2/rho with rho = stop_scale * domain; the graded
// mesh keeps ~50 nodes per decade, so cores down to 5e-4 L stay resolved.
inline RadialRun run_radial(const FlowConfig& config, const RadialProfile& initial,
                            double dt_max = 0.0, double stop_scale = 1e-3) {
  FlowConfig cfg = config.validated();
  initial.validate();
  if (!(stop_scale > 0.0) || stop_scale > 0.01)
    throw std::invalid_argument("run_radial: stop_scale must lie in (0, 0.01]");
  RadialRun out(cfg, initial);
  RadialProfile p = initial;
  const double L = p.domain();
  const double stop_bound = 2.0 / (stop_scale * L);
  if (dt_max <= 0.0) dt_max = 1e-3 * L * L;

  double t = 0.0;
  double energy_prev = reduced_energy(p);
  std::size_t next_snap = 0;
  auto snapshot_due = [&]() {
    while (next_snap < cfg.snapshot_times.size() && t >= cfg.snapshot_times[next_snap]) {
      out.snapshots.emplace_back(t, p);
      ++next_snap;
    }
  };
  auto record = [&]() {
    out.records.push_back(record_diagnostics_radial(p, t, cfg.T1, cfg.R, cfg.E0));
    out.lambda_marks.push_back(2.0 / radial::max_gradient(p));
  };

  record();
  snapshot_due();
  while (t < cfg.t_end) {
    double g = radial::max_gradient(p);
    if (g > stop_bound) {
      out.reached_stop = true;
      out.stop_reason = "resolvability stop: max|du| > 2/(stop_scale L)";
      if (out.records.empty() || out.records.back().t < t) record();
      detail::mark_near_stop(out.records);
      break;
    }
    double dt = std::min(dt_max, cfg.dt_safety / (g * g));
    dt = std::min(dt, cfg.t_end - t);
    p = step_equivariant(p, dt);
    t += dt;
    ++out.steps;
    snapshot_due();
    if (out.steps % cfg.diagnostic_stride == 0 || t >= cfg.t_end) {
      double energy = reduced_energy(p);
      if (energy > energy_prev * 1.01) {
        out.aborted = true;
        out.stop_reason = "instability abort: energy rose more than 1% between strides";
        break;
      }
      energy_prev = energy;
      record();
    }
  }
  if (!out.reached_stop && !out.aborted && radial::max_gradient(p) > stop_bound) {
    // t_end placed exactly on the stop time (second pass of the protocol)
    out.reached_stop = true;
    out.stop_reason = "resolvability stop: max|du| > 2/(stop_scale L)";
    detail::mark_near_stop(out.records);
  }
  out.t_final = t;
  out.snapshots.emplace_back(t, p);
  return out;
}

namespace detail {

// Not-a-knot cubic spline through (x_k, y_k); stores second derivatives.
struct Spline {
  std::vector<double> x, y, sig;

  Spline(std::vector<double> xs, std::vector<double> ys)
      : x(std::move(xs)), y(std::move(ys)) {
    int n = static_cast<int>(x.size());
    if (n < 4) throw std::invalid_argument("Spline: need at least 4 points");
    std::vector<double> hh(n - 1);
    for (int i = 0; i + 1 < n; ++i) hh[i] = x[i + 1] - x[i];

    // unknowns sig[1..n-2]; sig[0], sig[n-1] eliminated via the knot conditions
    int mth = n - 2;
    std::vector<double> low(mth), dia(mth), upp(mth), rhs(mth);
    for (int i = 1; i <= n - 2; ++i) {
      int q = i - 1;
      low[q] = hh[i - 1] / 6.0;
      dia[q] = (hh[i - 1] + hh[i]) / 3.0;
      upp[q] = hh[i] / 6.0;
      rhs[q] = (y[i + 1] - y[i]) / hh[i] - (y[i] - y[i - 1]) / hh[i - 1];
    }
    // sig0 = (1 + h0/h1) sig1 - (h0/h1) sig2
    dia[0] += low[0] * (1.0 + hh[0] / hh[1]);
    upp[0] -= low[0] * (hh[0] / hh[1]);
    low[0] = 0.0;
    // sig_{n-1} = (1 + h_{n-2}/h_{n-3}) sig_{n-2} - (h_{n-2}/h_{n-3}) sig_{n-3}
    dia[mth - 1] += upp[mth - 1] * (1.0 + hh[n - 2] / hh[n - 3]);
    low[mth - 1] -= upp[mth - 1] * (hh[n - 2] / hh[n - 3]);
    upp[mth - 1] = 0.0;

    std::vector<double> cp(mth), dp(mth);
    cp[0] = upp[0] / dia[0];
    dp[0] = rhs[0] / dia[0];
    for (int q = 1; q < mth; ++q) {
      double denom = dia[q] - low[q] * cp[q - 1];
      cp[q] = upp[q] / denom;
      dp[q] = (rhs[q] - low[q] * dp[q - 1]) / denom;
    }
    sig.assign(n, 0.0);
    sig[mth] = dp[mth - 1];
    for (int q = mth - 2; q >= 0; --q) sig[q + 1] = dp[q] - cp[q] * sig[q + 2];
    sig[0] = (1.0 + hh[0] / hh[1]) * sig[1] - (hh[0] / hh[1]) * sig[2];
    sig[n - 1] =
        (1.0 + hh[n - 2] / hh[n - 3]) * sig[n - 2] - (hh[n - 2] / hh[n - 3]) * sig[n - 3];
  }

  double operator()(double xq) const {
    int n = static_cast<int>(x.size());
    int i = int(std::upper_bound(x.begin(), x.end(), xq) - x.begin()) - 1;
    i = std::clamp(i, 0, n - 2);
    double hi = x[i + 1] - x[i];
    double A = (x[i + 1] - xq) / hi, B = (xq - x[i]) / hi;
    return A * y[i] + B * y[i + 1] +
           ((A * A * A - A) * sig[i] + (B * B * B - B) * sig[i + 1]) * hi * hi / 6.0;
  }
};

}  // namespace detail

// Samples the profile onto a 2-D grid through the corotational ansatz. Outside
// 0.8*L_grid the lift blends to the nearest pole multiple with the same
// interpolant make_bubble uses, so a harmonic profile reproduces make_bubble
// to spline accuracy.
inline SphereField lift(const RadialProfile& p, const Grid& g) {
  p.validate();
  detail::Spline sp(p.r, p.h);
  auto h_at = [&](double rr) {
    if (rr <= p.r.front()) return p.h.front() * (rr / p.r.front());
    if (rr >= p.r.back()) return p.h.back();
    return sp(rr);
  };
  double h_edge = h_at(0.9 * g.L);
  double h_pole = kPi * std::round(h_edge / kPi);
  Vec3 pole = {0.0, 0.0, -std::cos(h_pole)};  // exactly (0,0,+-1)

  SphereField u(g);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double x = g.x(i), y = g.y(j);
      double rr = std::sqrt(x * x + y * y);
      Vec3 v;
      if (rr >= 0.9 * g.L) {
        v = pole;
      } else {
        double hh = h_at(rr);
        double theta = std::atan2(y, x);
        double sh = std::sin(hh);
        v = {sh * std::cos(p.m * theta), sh * std::sin(p.m * theta), -std::cos(hh)};
        if (rr > 0.8 * g.L)
          v = slerp(v, pole, smoothstep5((rr - 0.8 * g.L) / (0.1 * g.L)));
      }
      u.set(i, j, v);
    }
  u.boundary_value = pole;
  apply_boundary(u);
  return u;
}

// Two-pass near-singularity protocol: run to the resolvability stop at t*,
// declare T1 = t* + (t* - t_last_record) so every observed time keeps tau > 0,
// then rerun with diagnostics anchored at T1 and snapshots at the requested
// backward-parabolic times t(r) = T1 - r^2/4.
struct BlowupResult {
  double t_star = 0.0;
  double T1 = 0.0;
  RadialRun pass2;

  BlowupResult(const FlowConfig& c, const RadialProfile& p) : pass2(c, p) {}
};

inline BlowupResult blowup_two_pass(const FlowConfig& base, const RadialProfile& initial,
                                    const std::vector<double>& snapshot_radii = {},
                                    double t_cap = 100.0, double stop_scale = 1e-3) {
  FlowConfig cfg1 = base;
  cfg1.t_end = t_cap;
  cfg1.T1 = 2.0 * t_cap;  // provisional anchor; pass-1 records are flagged and unused
  cfg1.R = std::sqrt(cfg1.T1);
  cfg1.snapshot_times.clear();
  RadialRun pass1 = run_radial(cfg1, initial, 0.0, stop_scale);
  if (!pass1.reached_stop)
    throw std::runtime_error("blowup_two_pass: flow did not reach the resolvability stop");

  double t_star = pass1.t_final;
  double t_prev = pass1.records.size() >= 2 ? pass1.records[pass1.records.size() - 2].t : 0.0;
  double T1 = t_star + (t_star - t_prev);

  FlowConfig cfg2 = base;
  cfg2.t_end = t_star;
  cfg2.T1 = T1;
  if (cfg2.R == 0.0 || cfg2.R > std::sqrt(T1)) cfg2.R = std::min(1.0, std::sqrt(T1));
  cfg2.snapshot_times = base.snapshot_times;
  for (double r : snapshot_radii) {
    double ts = T1 - 0.25 * r * r;
    if (ts >= 0.0 && ts < t_star) cfg2.snapshot_times.push_back(ts);
  }
  std::sort(cfg2.snapshot_times.begin(), cfg2.snapshot_times.end());
  cfg2.snapshot_times.erase(
      std::unique(cfg2.snapshot_times.begin(), cfg2.snapshot_times.end()),
      cfg2.snapshot_times.end());

  BlowupResult out(cfg2, initial);
  out.t_star = t_star;
  out.T1 = T1;
  out.pass2 = run_radial(cfg2, initial, 0.0, stop_scale);
  return out;
}

}  // namespace hmflow
