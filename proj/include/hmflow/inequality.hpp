#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hmflow/equivariant.hpp"

namespace hmflow {

// Parameter bundle for the Lojasiewicz machinery. alpha defaults to 2 - beta,
// the exponent the sphere target guarantees; K is meant to be fitted from
// data (fit_loj_constant), never assumed.
struct LojParams {
  int k = 3;              // energy cap: total energy <= 4 pi k
  double beta = 0.1;      // exponent deficit in (0,1)
  double alpha = 1.9;     // Lojasiewicz exponent in (1,2]
  double K = 1.0;         // Lojasiewicz constant >= 1
  double eps0 = 1.0;      // small-energy threshold
  double E0 = 0.0;        // critical energy level, a multiple of 4 pi
  double eps = 1.0;       // barrier entry half-width: phi(entry) <= eps
  double C_budget = 0.0;  // pass budget for loj certificates; 0 = record-only

  void validate() const {
    if (k < 0) throw std::invalid_argument("LojParams: k must be non-negative");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("LojParams: beta must lie in (0,1)");
    if (!(alpha > 1.0 && alpha <= 2.0))
      throw std::invalid_argument("LojParams: alpha must lie in (1,2]");
    if (!(K >= 1.0)) throw std::invalid_argument("LojParams: K must be >= 1");
    if (!(eps0 > 0.0)) throw std::invalid_argument("LojParams: eps0 must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("LojParams: eps must be positive");
    if (C_budget < 0.0) throw std::invalid_argument("LojParams: C_budget must be non-negative");
  }
};

// pass <=> ratio <= 1 + tolerance, with tolerance recorded in metadata.
// Degenerate and not-applicable outcomes keep the invariant literal by
// setting ratio = 0 (or tolerance = inf for record-only verdicts).
struct Certificate {
  std::string inequality_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::string inputs_digest;
  bool pass = false;
  std::map<std::string, std::string> metadata;
};

namespace detail {

inline std::string num_str(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

inline void finish_certificate(Certificate& c, double tolerance) {
  c.ratio = c.rhs > 0.0 ? c.lhs / c.rhs
                        : (c.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  c.pass = c.ratio <= 1.0 + tolerance;
  c.metadata["tolerance"] = num_str(tolerance);
}

inline std::string records_digest(const std::vector<DiagnosticRecord>& recs) {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& r : recs) {
    double sig[4] = {r.t, r.Phi, r.Psi, r.norm_That};
    h = fnv1a(sig, sizeof sig, h);
  }
  return digest_hex(h);
}

}  // namespace detail

// ||r du||_tau <= 4 tau ||That_tau||_tau for W^{2,2} maps into the sphere.
inline Certificate check_poincare_rdu(const SphereField& u, double tau, double tolerance = 0.05) {
  WeightedScale sc(tau);
  WeightedSums ws = weighted_sums(u, sc);
  Certificate c;
  c.inequality_id = "poincare-rdu";
  c.inputs_digest = field_digest(u);
  c.lhs = ws.norm_rdu;
  c.rhs = 4.0 * tau * ws.norm_That;
  c.metadata["tau"] = detail::num_str(tau);
  c.metadata["h"] = detail::num_str(u.grid.h);
  c.metadata["N"] = std::to_string(u.grid.N);
  c.metadata["weight_tail_bound"] = detail::num_str(weight_tail_bound(u, sc));
  if (c.lhs == 0.0 && c.rhs == 0.0) {
    c.pass = true;
    c.metadata["verdict"] = "degenerate-pass";
    c.metadata["tolerance"] = detail::num_str(tolerance);
    return c;
  }
  detail::finish_certificate(c, tolerance);
  if (c.rhs == 0.0 && c.lhs > 0.0) c.metadata["reason"] = "poincare-violation";
  return c;
}

// ||T(u)||_tau <= 3 ||That_tau||_tau.
inline Certificate check_poincare_T(const SphereField& u, double tau, double tolerance = 0.05) {
  WeightedScale sc(tau);
  WeightedSums ws = weighted_sums(u, sc);
  Certificate c;
  c.inequality_id = "poincare-T";
  c.inputs_digest = field_digest(u);
  c.lhs = ws.norm_T;
  c.rhs = 3.0 * ws.norm_That;
  c.metadata["tau"] = detail::num_str(tau);
  c.metadata["h"] = detail::num_str(u.grid.h);
  c.metadata["N"] = std::to_string(u.grid.N);
  c.metadata["weight_tail_bound"] = detail::num_str(weight_tail_bound(u, sc));
  if (c.lhs == 0.0 && c.rhs == 0.0) {
    c.pass = true;
    c.metadata["verdict"] = "degenerate-pass";
    c.metadata["tolerance"] = detail::num_str(tolerance);
    return c;
  }
  detail::finish_certificate(c, tolerance);
  if (c.rhs == 0.0 && c.lhs > 0.0) c.metadata["reason"] = "poincare-violation";
  return c;
}

// Smallest grid-quantized lambda in [0,1] with int_{B_2 \ B_lambda} |du|^2 <= eps0.
// Deterministic: node radii are sorted and the answer is found by binary
// search over suffix sums of the annulus energy.
inline double lambda_scale(const SphereField& u, double eps0) {
  if (!(eps0 > 0.0)) throw std::invalid_argument("lambda_scale: eps0 must be positive");
  if (u.grid.L < 2.0)
    throw std::invalid_argument("lambda_scale: grid must contain the unit-scale ball B_2");
  const Grid& g = u.grid;
  std::vector<std::pair<double, double>> node;
  node.reserve(static_cast<std::size_t>(12.6 / (g.h * g.h)) + 16);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double x = g.x(i), y = g.y(j);
      double r2 = x * x + y * y;
      if (r2 < 4.0) node.emplace_back(std::sqrt(r2), energy_density_at(u, i, j) * g.h * g.h);
    }
  std::sort(node.begin(), node.end());
  // group equal radii so the annulus [lambda, 2) always takes whole shells
  std::vector<double> radius;
  std::vector<double> suffix;  // suffix[q] = energy of [radius[q], 2)
  for (std::size_t k = 0; k < node.size(); ++k)
    if (radius.empty() || node[k].first != radius.back()) {
      radius.push_back(node[k].first);
      suffix.push_back(0.0);
    }
  double acc = 0.0;
  for (std::size_t k = node.size(), q = suffix.size(); k-- > 0;) {
    acc += node[k].second;
    if (k == 0 || node[k - 1].first != node[k].first) suffix[--q] = acc;
  }
  if (suffix.empty() || suffix.front() <= eps0) return 0.0;
  // suffix decreases with radius: binary search the first shell that fits
  std::size_t lo = 0, hi = suffix.size();  // invariant: suffix[lo] > eps0
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (suffix[mid] > eps0) lo = mid;
    else hi = mid;
  }
  double lambda = hi < radius.size() ? radius[hi] : 2.0;
  return std::min(lambda, 1.0);
}

// Nearest quantization level 4 pi n, n in {0..k}; ties break toward smaller n.
inline std::pair<int, bool> loj_nearest_level(double Phi, int k) {
  int n_best = 0;
  bool tied = false;
  double best = std::abs(Phi);
  for (int n = 1; n <= k; ++n) {
    double d = std::abs(Phi - 4.0 * kPi * n);
    if (d < best) {
      best = d;
      n_best = n;
      tied = false;
    } else if (d == best) {
      tied = true;  // keep the smaller n
    }
  }
  return {n_best, tied};
}

// |Phi_1(u) - 4 pi n| vs C ||That_1(u)||_1^{2-beta} at the unit scale.
inline Certificate loj_certificate(const SphereField& u, const LojParams& params) {
  params.validate();
  double E = dirichlet_energy(u);
  if (E > 4.0 * kPi * params.k + 1e-9)
    throw std::invalid_argument("loj_certificate: total energy exceeds the 4 pi k cap");
  WeightedScale sc(1.0);
  WeightedSums ws = weighted_sums(u, sc);
  auto [n, tied] = loj_nearest_level(ws.Phi, params.k);

  Certificate c;
  c.inequality_id = "lojasiewicz";
  c.inputs_digest = field_digest(u);
  c.lhs = std::abs(ws.Phi - 4.0 * kPi * n);
  c.rhs = std::pow(ws.norm_That, 2.0 - params.beta);
  c.metadata["n"] = std::to_string(n);
  c.metadata["Phi"] = detail::num_str(ws.Phi);
  c.metadata["norm_That"] = detail::num_str(ws.norm_That);
  c.metadata["beta"] = detail::num_str(params.beta);
  c.metadata["h"] = detail::num_str(u.grid.h);
  c.metadata["N"] = std::to_string(u.grid.N);
  if (tied) c.metadata["tie"] = "true";

  const double C = params.C_budget > 0.0 ? params.C_budget : 1.0;
  bool outside_regime = ws.norm_That * ws.norm_That > params.eps0 / C;
  if (outside_regime) c.metadata["regime"] = "outside-small-norm";

  if (c.lhs == 0.0 && c.rhs == 0.0) {
    c.pass = true;
    c.metadata["verdict"] = "degenerate-pass";
    c.metadata["tolerance"] = detail::num_str(0.0);
    return c;
  }
  c.ratio = c.rhs > 0.0 ? c.lhs / c.rhs : std::numeric_limits<double>::infinity();
  if (params.C_budget <= 0.0 || outside_regime) {
    // recorded without a pass judgment; tolerance = inf keeps the invariant
    c.pass = true;
    c.metadata["verdict"] = params.C_budget <= 0.0 ? "record-only" : "outside-small-norm";
    c.metadata["tolerance"] = "inf";
    return c;
  }
  // pass <=> lhs/rhs <= C_budget, phrased as ratio <= 1 + (C_budget - 1)
  c.pass = c.ratio <= params.C_budget;
  c.metadata["tolerance"] = detail::num_str(params.C_budget - 1.0);
  return c;
}

// Closed-form Gronwall barrier with phi(0) = eps. The alpha = 2 limit is an
// explicit exponential branch; plugging alpha = 2 into the fractional formula
// would divide by zero.
inline double gronwall_barrier(double eps, const LojParams& params, double s) {
  if (!(eps > 0.0)) throw std::invalid_argument("gronwall_barrier: eps must be positive");
  if (!(s >= 0.0)) throw std::invalid_argument("gronwall_barrier: s must be non-negative");
  if (!(params.alpha > 1.0 && params.alpha <= 2.0))
    throw std::invalid_argument("gronwall_barrier: alpha must lie in (1,2]");
  const double K2 = params.K * params.K;
  if (params.alpha == 2.0) return eps * std::exp(-2.0 * s / K2);
  const double p = (2.0 - params.alpha) / params.alpha;
  return std::pow(std::pow(eps, -p) + 2.0 * p * s / K2, -1.0 / p);
}

// Shared entry/exit bookkeeping for the Theorem-4.2-style certificates:
// entry is the record closest to the scale R (s = 0), lambda_run the smallest
// recorded scale where Phi has not yet dropped below E0 - eps.
struct BarrierWindow {
  bool applicable = false;
  std::string reason;
  std::size_t entry = 0;
  std::size_t exit = 0;
  double lambda_run = 0.0;
  double S = 0.0;  // log(R / lambda_run)
};

inline BarrierWindow barrier_window(const std::vector<DiagnosticRecord>& recs,
                                    const LojParams& params) {
  BarrierWindow w;
  if (recs.empty()) {
    w.reason = "not-applicable: no records";
    return w;
  }
  std::size_t entry = 0;
  for (std::size_t k = 1; k < recs.size(); ++k)
    if (std::abs(recs[k].s) < std::abs(recs[entry].s)) entry = k;
  if (std::abs(recs[entry].s) > 0.2) {
    w.reason = "not-applicable: no record near the entry scale s = 0";
    return w;
  }
  if (!(recs[entry].phi <= params.eps)) {
    w.reason = "not-applicable: entry condition Phi(R-scale) <= E0 + eps fails";
    return w;
  }
  std::size_t exit = entry;
  for (std::size_t k = entry; k < recs.size(); ++k) {
    if (recs[k].near_stop) continue;
    if (recs[k].phi >= -params.eps) exit = k;
  }
  w.applicable = true;
  w.entry = entry;
  w.exit = exit;
  w.lambda_run = std::sqrt(recs[exit].tau);
  w.S = recs[exit].s;
  return w;
}

struct BarrierReport {
  bool applicable = false;
  bool pass = false;
  std::string reason;
  double lambda_run = 0.0;
  double S = 0.0;
  double tol = 0.0;
  // worst signed margins: barrier minus series (upper), series plus barrier
  // (lower); negative beyond tol means violation
  double worst_upper = std::numeric_limits<double>::infinity();
  double worst_lower = std::numeric_limits<double>::infinity();
  std::size_t worst_upper_index = 0;
  std::size_t worst_lower_index = 0;
  std::size_t n_checked = 0;
};

// Two-sided barrier check -phi_b(S - s) - tol <= phi(s) <= phi_b(s) + tol on
// every record of the window. The default tolerance covers the stride
// quantization of the exit crossing.
inline BarrierReport check_flow_barriers(const std::vector<DiagnosticRecord>& recs,
                                         const LojParams& params, double tol = -1.0) {
  params.validate();
  if (tol < 0.0) tol = 0.02 * params.eps;
  BarrierReport rep;
  rep.tol = tol;
  BarrierWindow w = barrier_window(recs, params);
  if (!w.applicable) {
    rep.reason = w.reason;
    return rep;
  }
  rep.applicable = true;
  rep.lambda_run = w.lambda_run;
  rep.S = w.S;
  for (std::size_t k = w.entry; k <= w.exit; ++k) {
    const auto& r = recs[k];
    if (r.near_stop) continue;
    double up = gronwall_barrier(params.eps, params, std::max(r.s, 0.0));
    double lo = gronwall_barrier(params.eps, params, std::max(w.S - r.s, 0.0));
    if (up - r.phi < rep.worst_upper) {
      rep.worst_upper = up - r.phi;
      rep.worst_upper_index = k;
    }
    if (r.phi + lo < rep.worst_lower) {
      rep.worst_lower = r.phi + lo;
      rep.worst_lower_index = k;
    }
    ++rep.n_checked;
  }
  bool up_ok = rep.worst_upper >= -tol;
  bool lo_ok = rep.worst_lower >= -tol;
  rep.pass = up_ok && lo_ok;
  if (!up_ok)
    rep.reason = "upper barrier tolerance failed at record " + std::to_string(rep.worst_upper_index);
  else if (!lo_ok)
    rep.reason = "lower barrier tolerance failed at record " + std::to_string(rep.worst_lower_index);
  return rep;
}

inline BarrierReport check_flow_barriers(const FlowRun& run, const LojParams& params,
                                         double tol = -1.0) {
  return check_flow_barriers(run.records, params, tol);
}
inline BarrierReport check_flow_barriers(const RadialRun& run, const LojParams& params,
                                         double tol = -1.0) {
  return check_flow_barriers(run.records, params, tol);
}

// Pointwise psi(sigma) <= 4 delta(sigma) on every trustworthy record; the
// integrated Poincare step of the Theorem-4.2 chain, checked record by record.
inline Certificate check_psi_pointwise(const std::vector<DiagnosticRecord>& recs,
                                       double tolerance = 0.05) {
  Certificate c;
  c.inequality_id = "psi-pointwise";
  c.inputs_digest = detail::records_digest(recs);
  double worst = 0.0;
  std::size_t worst_k = 0, n = 0;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto& r = recs[k];
    if (r.flagged || r.near_stop) continue;
    ++n;
    double num = r.psi, den = 4.0 * r.delta;
    double ratio = den > 0.0 ? num / den
                             : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (ratio > worst) {
      worst = ratio;
      worst_k = k;
    }
  }
  c.metadata["n_records"] = std::to_string(n);
  c.metadata["worst_index"] = std::to_string(worst_k);
  if (n == 0) {
    c.pass = true;
    c.metadata["verdict"] = "not-applicable";
    c.metadata["tolerance"] = detail::num_str(tolerance);
    return c;
  }
  c.lhs = worst;
  c.rhs = 1.0;
  c.ratio = worst;
  c.pass = worst <= 1.0 + tolerance;
  c.metadata["tolerance"] = detail::num_str(tolerance);
  if (worst == 0.0) c.metadata["verdict"] = "degenerate-pass";
  return c;
}

// Integral chain over [s, S-s]: int psi <= 4 int delta <= (8a/(a-1)) phi_b(s)^{(a-1)/a}.
// Both links are certified separately; the reported ratio is the worse one.
inline Certificate check_psi_integral_bound(const std::vector<DiagnosticRecord>& recs,
                                            const LojParams& params, double s,
                                            double tolerance = 0.05) {
  params.validate();
  if (!(s >= 0.0)) throw std::invalid_argument("check_psi_integral_bound: s must be >= 0");
  Certificate c;
  c.inequality_id = "psi-integral-bound";
  c.inputs_digest = detail::records_digest(recs);
  c.metadata["s"] = detail::num_str(s);
  BarrierWindow w = barrier_window(recs, params);
  if (!w.applicable) {
    c.pass = true;
    c.metadata["verdict"] = "not-applicable";
    c.metadata["reason"] = w.reason;
    c.metadata["tolerance"] = detail::num_str(tolerance);
    return c;
  }
  if (s > 0.5 * w.S)
    throw std::invalid_argument("check_psi_integral_bound: need s <= S/2");
  c.metadata["S"] = detail::num_str(w.S);
  c.metadata["lambda_run"] = detail::num_str(w.lambda_run);

  double int_psi = 0.0, int_delta = 0.0;
  std::size_t n = 0;
  const DiagnosticRecord* prev = nullptr;
  for (std::size_t k = w.entry; k <= w.exit; ++k) {
    const auto& r = recs[k];
    if (r.near_stop || r.flagged) continue;
    if (r.s < s || r.s > w.S - s) continue;
    if (prev) {
      double ds = r.s - prev->s;
      int_psi += 0.5 * (prev->psi + r.psi) * ds;
      int_delta += 0.5 * (prev->delta + r.delta) * ds;
    }
    prev = &r;
    ++n;
  }
  c.metadata["n_records"] = std::to_string(n);
  if (n < 8) {
    c.pass = true;
    c.metadata["verdict"] = "under-sampled";
    c.metadata["tolerance"] = detail::num_str(tolerance);
    return c;
  }
  const double a = params.alpha;
  double barrier_s = gronwall_barrier(params.eps, params, s);
  double chain_rhs = (8.0 * a / (a - 1.0)) * std::pow(barrier_s, (a - 1.0) / a);
  double mid = 4.0 * int_delta;
  double ratio_a = mid > 0.0 ? int_psi / mid
                             : (int_psi > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  double ratio_b = mid / chain_rhs;
  c.lhs = int_psi;
  c.rhs = chain_rhs;
  c.ratio = std::max(ratio_a, ratio_b);
  c.pass = c.ratio <= 1.0 + tolerance;
  c.metadata["int_psi"] = detail::num_str(int_psi);
  c.metadata["int_delta"] = detail::num_str(int_delta);
  c.metadata["ratio_psi_vs_4delta"] = detail::num_str(ratio_a);
  c.metadata["ratio_4delta_vs_barrier"] = detail::num_str(ratio_b);
  c.metadata["tolerance"] = detail::num_str(tolerance);
  if (int_psi == 0.0 && mid == 0.0) c.metadata["verdict"] = "degenerate-pass";
  return c;
}

inline Certificate check_psi_integral_bound(const FlowRun& run, const LojParams& params, double s,
                                            double tolerance = 0.05) {
  return check_psi_integral_bound(run.records, params, s, tolerance);
}
inline Certificate check_psi_integral_bound(const RadialRun& run, const LojParams& params,
                                            double s, double tolerance = 0.05) {
  return check_psi_integral_bound(run.records, params, s, tolerance);
}

// Residuals of the monotonicity identities with tau(t) = T1 - t: the right
// sides vanish, so dPhi/dt = -||That||^2 and dPsi/dt = -||r That||^2 up to
// discretization. Finite differences are trapezoid-paired across records.
struct MonotonicityReport {
  double max_phi_residual = 0.0;
  double mean_phi_residual = 0.0;
  double max_psi_residual = 0.0;
  double mean_psi_residual = 0.0;
  double worst_increase = -std::numeric_limits<double>::infinity();  // max of Phi_{k+1}-Phi_k
  std::size_t n_pairs = 0;

  bool phi_nonincreasing(double tol) const { return n_pairs == 0 || worst_increase <= tol; }
};

inline MonotonicityReport check_monotonicity_residuals(const std::vector<DiagnosticRecord>& recs) {
  MonotonicityReport rep;
  double sum_phi = 0.0, sum_psi = 0.0;
  for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
    const auto& a = recs[k];
    const auto& b = recs[k + 1];
    if (a.flagged || b.flagged || a.near_stop || b.near_stop) continue;
    double dt = b.t - a.t;
    if (!(dt > 0.0)) continue;
    double rT = std::abs((b.Phi - a.Phi) / dt +
                         0.5 * (a.norm_That * a.norm_That + b.norm_That * b.norm_That));
    double rP = std::abs((b.Psi - a.Psi) / dt +
                         0.5 * (a.norm_rThat * a.norm_rThat + b.norm_rThat * b.norm_rThat));
    rep.max_phi_residual = std::max(rep.max_phi_residual, rT);
    rep.max_psi_residual = std::max(rep.max_psi_residual, rP);
    sum_phi += rT;
    sum_psi += rP;
    rep.worst_increase = std::max(rep.worst_increase, b.Phi - a.Phi);
    ++rep.n_pairs;
  }
  if (rep.n_pairs > 0) {
    rep.mean_phi_residual = sum_phi / double(rep.n_pairs);
    rep.mean_psi_residual = sum_psi / double(rep.n_pairs);
  }
  return rep;
}

inline MonotonicityReport check_monotonicity_residuals(const FlowRun& run) {
  return check_monotonicity_residuals(run.records);
}
inline MonotonicityReport check_monotonicity_residuals(const RadialRun& run) {
  return check_monotonicity_residuals(run.records);
}

// Least-squares slope of log y against log x; the workhorse behind
// convergence orders and the lambda-scale linearity exponent.
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need two or more paired samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0))
      throw std::invalid_argument("fit_loglog_slope: samples must be positive");
    double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double n = double(x.size());
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

// K = max over the window of |phi|^{1/alpha} / delta, clamped to the paper's
// normalization K >= 1.
inline double fit_loj_constant(const std::vector<DiagnosticRecord>& recs, std::size_t first,
                               std::size_t last, double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw std::invalid_argument("fit_loj_constant: alpha must lie in (1,2]");
  double K = 1.0;
  for (std::size_t k = first; k <= last && k < recs.size(); ++k) {
    const auto& r = recs[k];
    if (r.near_stop || r.flagged) continue;
    if (!(r.delta > 0.0)) continue;
    K = std::max(K, std::pow(std::abs(r.phi), 1.0 / alpha) / r.delta);
  }
  return K;
}

inline double fit_loj_constant(const std::vector<DiagnosticRecord>& recs,
                               const LojParams& params) {
  BarrierWindow w = barrier_window(recs, params);
  if (!w.applicable) throw std::invalid_argument("fit_loj_constant: " + w.reason);
  return fit_loj_constant(recs, w.entry, w.exit, params.alpha);
}

}  // namespace hmflow
