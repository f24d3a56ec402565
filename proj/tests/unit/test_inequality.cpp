#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hmflow/bubble.hpp"
#include "hmflow/inequality.hpp"
#include "maps.hpp"

using namespace hmflow;
using testmaps::perturbed_bubble;
using testmaps::smooth_test_map;

TEST_CASE("gronwall barrier closed form", "[inequality]") {
  LojParams pr;
  pr.alpha = 1.5;
  pr.K = 1.0;
  // (0.1^{-1/3} + (2/3)*10)^{-3}
  double v = gronwall_barrier(0.1, pr, 10.0);
  double oracle = std::pow(std::pow(0.1, -1.0 / 3.0) + 20.0 / 3.0, -3.0);
  CHECK(v == Catch::Approx(oracle).epsilon(1e-14));
  CHECK(v == Catch::Approx(1.4568e-3).epsilon(1e-3));

  CHECK(gronwall_barrier(0.37, pr, 0.0) == Catch::Approx(0.37).epsilon(1e-14));

  pr.alpha = 2.0;
  pr.K = 1.3;
  CHECK(gronwall_barrier(0.5, pr, 2.0) ==
        Catch::Approx(0.5 * std::exp(-4.0 / 1.69)).epsilon(1e-14));

  // the fractional formula approaches the exponential branch as alpha -> 2
  LojParams nearly = pr;
  nearly.alpha = 1.999999;
  CHECK(gronwall_barrier(0.5, nearly, 2.0) ==
        Catch::Approx(gronwall_barrier(0.5, pr, 2.0)).epsilon(1e-4));

  // strictly decreasing in s
  pr.alpha = 1.7;
  double prev = gronwall_barrier(1.0, pr, 0.0);
  for (double s = 0.5; s < 8.0; s += 0.5) {
    double cur = gronwall_barrier(1.0, pr, s);
    CHECK(cur < prev);
    prev = cur;
  }

  LojParams bad = pr;
  bad.alpha = 1.0;
  CHECK_THROWS_AS(gronwall_barrier(1.0, bad, 1.0), std::invalid_argument);
  bad.alpha = 2.1;
  CHECK_THROWS_AS(gronwall_barrier(1.0, bad, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gronwall_barrier(-1.0, pr, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gronwall_barrier(1.0, pr, -0.1), std::invalid_argument);
}

TEST_CASE("poincare certificates on fields", "[inequality]") {
  Grid g(8.0, 257);

  SphereField c = SphereField::constant(g, {0, 0, 1});
  Certificate cr = check_poincare_rdu(c, 1.0);
  CHECK(cr.pass);
  CHECK(cr.ratio == 0.0);
  CHECK(cr.metadata.at("verdict") == "degenerate-pass");
  Certificate ct = check_poincare_T(c, 1.0);
  CHECK(ct.pass);
  CHECK(ct.metadata.at("verdict") == "degenerate-pass");

  SphereField b = make_bubble(g, 1, 0.2);
  for (double tau : {0.25, 1.0, 4.0}) {
    Certificate r = check_poincare_rdu(b, tau);
    INFO("rdu tau=" << tau << " ratio=" << r.ratio);
    CHECK(r.pass);
    CHECK(r.ratio <= 1.0);  // the continuum lemma holds strictly here
    Certificate t = check_poincare_T(b, tau);
    INFO("T tau=" << tau << " ratio=" << t.ratio);
    CHECK(t.pass);
    CHECK(t.rhs > 0.0);
  }

  SphereField p = perturbed_bubble(g, 1, 0.3, 0.05, 7);
  Certificate r1 = check_poincare_rdu(p, 1.0);
  Certificate t1 = check_poincare_T(p, 1.0);
  CHECK(r1.pass);
  CHECK(t1.pass);
  CHECK(r1.inputs_digest == t1.inputs_digest);
  CHECK(r1.inputs_digest != cr.inputs_digest);
}

TEST_CASE("lambda scale against the closed-form tail", "[inequality]") {
  Grid g(8.0, 513);
  CHECK(lambda_scale(SphereField::constant(g, {0, 0, 1}), 1.0) == 0.0);

  // degree-1 bubble at scale l0: int_{B2 \ Bl} |du|^2 =
  // 8 pi l0^2 (1/(l0^2+l^2) - 1/(l0^2+4)); at eps0 = 1, l0 = 0.1 the
  // continuum crossing sits at l = 0.4760
  SphereField b = make_bubble(g, 1, 0.1);
  double l = lambda_scale(b, 1.0);
  INFO("lambda = " << l);
  CHECK(l > 0.476 / 2.0);
  CHECK(l < 0.476 * 2.0);

  // monotone in eps0: larger budget, smaller lambda
  CHECK(lambda_scale(b, 2.0) < l);
  // huge budget swallows everything
  CHECK(lambda_scale(b, 1e9) == 0.0);
  // cap at 1 when even the unit annulus exceeds the budget
  CHECK(lambda_scale(b, 1e-9) == 1.0);

  CHECK_THROWS_AS(lambda_scale(b, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(lambda_scale(SphereField::constant(Grid(1.0, 65), {0, 0, 1}), 1.0),
                  std::invalid_argument);
}

TEST_CASE("lojasiewicz certificate and level selection", "[inequality]") {
  auto [n0, tie0] = loj_nearest_level(2.0 * kPi, 3);
  CHECK(n0 == 0);  // exact midpoint ties toward the smaller level
  CHECK(tie0);
  auto [n1, tie1] = loj_nearest_level(4.0 * kPi * 1.2, 3);
  CHECK(n1 == 1);
  CHECK_FALSE(tie1);
  auto [n2, tie2] = loj_nearest_level(100.0, 3);
  CHECK(n2 == 3);  // clamped at the cap

  Grid g(8.0, 257);
  LojParams pr;

  Certificate cc = loj_certificate(SphereField::constant(g, {0, 0, 1}), pr);
  CHECK(cc.pass);
  CHECK(cc.metadata.at("verdict") == "degenerate-pass");
  CHECK(cc.metadata.at("n") == "0");

  Certificate cb = loj_certificate(make_bubble(g, 1, 0.1), pr);
  CHECK(cb.metadata.at("n") == "1");
  CHECK(cb.lhs > 0.0);
  CHECK(cb.rhs > 0.0);
  CHECK(cb.pass);  // record-only: no C budget set
  CHECK(cb.metadata.at("verdict") == "record-only");

  // a wide bubble has Phi_1 near 2 pi and a tension norm far outside the
  // small-norm regime: recorded without judgment
  Certificate cw = loj_certificate(make_bubble(g, 1, 1.5), pr);
  CHECK(cw.metadata.count("regime") == 1);
  CHECK(cw.pass);

  // with a budget, pass becomes a real judgment
  LojParams budget = pr;
  budget.C_budget = 1e6;
  Certificate cy = loj_certificate(make_bubble(g, 1, 0.1), budget);
  if (cy.metadata.count("regime") == 0) CHECK(cy.pass);

  LojParams tiny = pr;
  tiny.k = 0;
  CHECK_THROWS_AS(loj_certificate(make_bubble(g, 1, 0.1), tiny), std::invalid_argument);
}

namespace {

// synthetic diagnostic series on s in [s_lo, s_hi]: phi prescribed, delta
// from the Lojasiewicz equality, psi = 2 delta (comfortably inside psi <= 4 delta)
std::vector<DiagnosticRecord> synthetic_series(double R, double s_lo, double s_hi, int n,
                                               const LojParams& pr,
                                               double (*phi_of_s)(double, const LojParams&)) {
  std::vector<DiagnosticRecord> recs(n);
  for (int i = 0; i < n; ++i) {
    double s = s_lo + (s_hi - s_lo) * i / double(n - 1);
    DiagnosticRecord& r = recs[i];
    r.s = s;
    r.tau = R * R * std::exp(-2.0 * s);
    r.t = 10.0 - r.tau;  // arbitrary T1 = 10
    r.phi = phi_of_s(s, pr);
    r.Phi = pr.E0 + r.phi;
    r.delta = std::pow(std::abs(r.phi), 1.0 / pr.alpha) / pr.K;
    r.psi = 2.0 * r.delta;
    r.Psi = r.psi * r.psi * r.tau;
    r.norm_That = r.delta / std::sqrt(r.tau);
    r.norm_rThat = r.norm_That;  // unused by these checks
  }
  return recs;
}

double half_barrier(double s, const LojParams& pr) {
  return 0.5 * gronwall_barrier(pr.eps, pr, std::max(s, 0.0));
}

}  // namespace

TEST_CASE("barrier checker on synthetic series", "[inequality]") {
  LojParams pr;
  pr.alpha = 1.9;
  pr.K = 1.2;
  pr.eps = 0.5;
  pr.E0 = 4.0 * kPi;

  // phi = barrier/2 passes by construction
  auto recs = synthetic_series(1.0, -0.05, 6.0, 200, pr, &half_barrier);
  BarrierReport rep = check_flow_barriers(recs, pr);
  CHECK(rep.applicable);
  CHECK(rep.pass);
  CHECK(rep.n_checked >= 197);  // window opens at the record nearest s = 0
  CHECK(rep.worst_upper > 0.0);
  CHECK(rep.worst_lower > 0.0);
  // phi stays positive, so the window runs to the last record
  CHECK(rep.S == Catch::Approx(6.0));

  // entry condition violated: phi(0) = 2 eps
  auto high = synthetic_series(1.0, -0.05, 6.0, 50, pr,
                               [](double, const LojParams& p) { return 2.0 * p.eps; });
  BarrierReport rep2 = check_flow_barriers(high, pr);
  CHECK_FALSE(rep2.applicable);
  CHECK(rep2.reason.find("entry") != std::string::npos);

  // upper violation: phi jumps above the barrier mid-window
  auto jump = synthetic_series(1.0, -0.05, 6.0, 50, pr, [](double s, const LojParams& p) {
    return s > 1.0 && s < 2.0 ? 0.9 * p.eps : half_barrier(s, p);
  });
  BarrierReport rep3 = check_flow_barriers(jump, pr);
  CHECK(rep3.applicable);
  CHECK_FALSE(rep3.pass);
  CHECK(rep3.reason.find("upper") != std::string::npos);

  // lower violation: an early dive to -0.9 eps undercuts -barrier(S - s)
  auto dive = synthetic_series(1.0, -0.05, 6.0, 50, pr, [](double s, const LojParams& p) {
    return s > 1.0 && s < 2.0 ? -0.9 * p.eps : half_barrier(s, p);
  });
  BarrierReport rep4 = check_flow_barriers(dive, pr);
  CHECK(rep4.applicable);
  CHECK_FALSE(rep4.pass);
  CHECK(rep4.reason.find("lower") != std::string::npos);

  // no record near the entry scale
  auto far = synthetic_series(1.0, 2.0, 6.0, 50, pr, &half_barrier);
  BarrierReport rep5 = check_flow_barriers(far, pr);
  CHECK_FALSE(rep5.applicable);
}

TEST_CASE("psi integral and pointwise certificates", "[inequality]") {
  LojParams pr;
  pr.alpha = 1.9;
  pr.K = 1.0;
  pr.eps = 0.1;
  pr.E0 = 0.0;

  auto recs = synthetic_series(1.0, -0.05, 6.0, 400, pr, &half_barrier);
  Certificate ci = check_psi_integral_bound(recs, pr, 0.5);
  INFO("ratio=" << ci.ratio << " a=" << ci.metadata.at("ratio_psi_vs_4delta")
                << " b=" << ci.metadata.at("ratio_4delta_vs_barrier"));
  CHECK(ci.pass);
  CHECK(ci.metadata.count("verdict") == 0);  // genuinely certified, not degenerate
  CHECK(std::stod(ci.metadata.at("ratio_psi_vs_4delta")) == Catch::Approx(0.5));
  CHECK(std::stod(ci.metadata.at("ratio_4delta_vs_barrier")) < 1.0);

  Certificate cp = check_psi_pointwise(recs);
  CHECK(cp.pass);
  CHECK(cp.ratio == Catch::Approx(0.5));

  // fewer than 8 usable records: flagged under-sampled
  auto sparse = synthetic_series(1.0, -0.05, 6.0, 6, pr, &half_barrier);
  Certificate cs = check_psi_integral_bound(sparse, pr, 0.0);
  CHECK(cs.metadata.at("verdict") == "under-sampled");
  CHECK(cs.pass);

  // s beyond S/2 is a caller error
  CHECK_THROWS_AS(check_psi_integral_bound(recs, pr, 5.9), std::invalid_argument);

  // pointwise violation detected
  auto bad = recs;
  bad[100].psi = 10.0 * bad[100].delta;
  Certificate cv = check_psi_pointwise(bad);
  CHECK_FALSE(cv.pass);
  CHECK(cv.metadata.at("worst_index") == "100");
}

TEST_CASE("monotonicity residuals on a real run", "[inequality]") {
  Grid g(8.0, 129);
  SphereField u0 = smooth_test_map(g);
  FlowConfig cfg(g);
  cfg.t_end = 0.1;
  cfg.diagnostic_stride = 4;
  cfg.T1 = 0.5;
  cfg.R = 0.6;
  FlowRun run = run_2d(cfg, u0);
  REQUIRE_FALSE(run.aborted);

  MonotonicityReport rep = check_monotonicity_residuals(run);
  REQUIRE(rep.n_pairs >= 5);
  INFO("max phi residual " << rep.max_phi_residual << " psi " << rep.max_psi_residual);
  CHECK(rep.max_phi_residual < 1.0);
  CHECK(rep.phi_nonincreasing(10.0 * g.h * g.h * 0.02));

  // constant run: residuals identically zero
  FlowRun still = run_2d(cfg, SphereField::constant(g, {0, 0, 1}));
  MonotonicityReport rep0 = check_monotonicity_residuals(still);
  CHECK(rep0.max_phi_residual == 0.0);
  CHECK(rep0.max_psi_residual == 0.0);
  CHECK(rep0.worst_increase == 0.0);
}

TEST_CASE("fit helpers", "[inequality]") {
  // slope recovery on exact power data
  std::vector<double> x = {0.1, 0.2, 0.4, 0.8}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.7));
  CHECK(fit_loglog_slope(x, y) == Catch::Approx(1.7).epsilon(1e-12));
  CHECK_THROWS_AS(fit_loglog_slope({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_loglog_slope({1.0, -1.0}, {1.0, 1.0}), std::invalid_argument);

  // K fit: max of |phi|^{1/alpha}/delta over the window, floor at 1
  LojParams pr;
  pr.alpha = 2.0;
  pr.K = 1.0;
  pr.eps = 0.5;
  auto recs = synthetic_series(1.0, -0.05, 4.0, 50, pr, &half_barrier);
  double K = fit_loj_constant(recs, 0, recs.size() - 1, 2.0);
  double expect = 1.0;
  for (const auto& r : recs)
    if (r.delta > 0.0) expect = std::max(expect, std::sqrt(std::abs(r.phi)) / r.delta);
  CHECK(K == expect);
  CHECK(K >= 1.0);
  double Kw = fit_loj_constant(recs, pr);
  CHECK(Kw == Catch::Approx(K));
}
