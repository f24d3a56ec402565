#pragma once

// Deterministic family of test maps for the certificate sweeps: bubbles across
// degrees and scales, perturbed bubbles, band-limited random fields, and lifted
// equivariant profiles. Same seed, same maps, same digests. Every member stays
// below the 12*pi energy cap so the three-level nearest-quantum machinery
// applies, and several members are steep enough to land outside the small-norm
// regime of the quantization certificate.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmflow/bubble.hpp"
#include "hmflow/calculus.hpp"
#include "hmflow/core.hpp"
#include "hmflow/equivariant.hpp"

namespace hmflow {

enum class MemberKind { Constant, Bubble, PerturbedBubble, RandomField, Equivariant };

inline const char* to_string(MemberKind k) {
  switch (k) {
    case MemberKind::Constant: return "constant";
    case MemberKind::Bubble: return "bubble";
    case MemberKind::PerturbedBubble: return "perturbed";
    case MemberKind::RandomField: return "random";
    case MemberKind::Equivariant: return "equivariant";
  }
  return "unknown";
}

namespace detail {

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double usym(std::mt19937_64& rng) { return 2.0 * u01(rng) - 1.0; }

// Six low Fourier modes with seeded coefficient vectors and phases, tapered to
// zero at the square's edge so the boundary rings stay exactly at the pole.
inline SphereField random_member(const Grid& g, double amp, std::uint64_t seed) {
  static const int modes[6][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}, {2, 2}};
  std::mt19937_64 rng(seed);
  double c[6][3], p1[6], p2[6];
  for (int m = 0; m < 6; ++m) {
    for (int k = 0; k < 3; ++k) c[m][k] = usym(rng);
    p1[m] = 2.0 * kPi * u01(rng);
    p2[m] = 2.0 * kPi * u01(rng);
  }
  SphereField u(g);
  const Vec3 north{0, 0, 1};
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double x = g.x(i), y = g.y(j);
      double tx = std::cos(0.5 * kPi * x / g.L), ty = std::cos(0.5 * kPi * y / g.L);
      double env = amp * tx * tx * ty * ty;
      Vec3 w{0, 0, 0};
      for (int m = 0; m < 6; ++m) {
        double s = std::sin(kPi * modes[m][0] * x / g.L + p1[m]) *
                   std::sin(kPi * modes[m][1] * y / g.L + p2[m]);
        w = w + (env * s) * Vec3{c[m][0], c[m][1], c[m][2]};
      }
      u.set(i, j, normalized(north + w));
    }
  u.boundary_value = north;
  apply_boundary(u);
  return u;
}

// Bubble plus an angular-mode ripple along a seeded fixed direction. The radial
// envelope r^2/(1+r^4) vanishes at the origin and decays at the edge, keeping
// the perturbation concentrated where the weights can see it.
inline SphereField perturbed_member(const Grid& g, int degree, double lambda, double amp,
                                    int mode, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double phase = 2.0 * kPi * u01(rng);
  Vec3 dir = normalized(Vec3{usym(rng), usym(rng), usym(rng)});
  SphereField u = make_bubble(g, degree, lambda);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double x = g.x(i), y = g.y(j);
      double r2 = x * x + y * y;
      double rho = r2 / (1.0 + r2 * r2);
      double s = amp * rho * std::sin(mode * std::atan2(y, x) + phase);
      u.set(i, j, normalized(u.at(i, j) + s * dir));
    }
  apply_boundary(u);
  return u;
}

}  // namespace detail

struct CorpusMember {
  std::string name;
  MemberKind kind = MemberKind::Constant;
  int degree = 0;          // bubble kinds
  double lambda = 0.0;     // bubble or profile scale
  Vec3 center{0, 0, 0};    // bubble offset
  double rot_angle = 0.0;  // value rotation about the x-axis
  double amplitude = 0.0;  // perturbed and random kinds
  int mode = 0;            // angular mode of the ripple
  std::uint64_t seed = 0;  // phases and coefficients
  int m = 0;               // equivariant rotation number
  double turn = 0.0;       // boundary-turn angle; 0 means harmonic profile
  bool damped = false;     // amplitude was reduced once to meet the energy cap

  SphereField realize(const Grid& g) const {
    switch (kind) {
      case MemberKind::Constant:
        return SphereField::constant(g, {0, 0, 1});
      case MemberKind::Bubble: {
        Rot3 rot = rot_angle != 0.0 ? Rot3::axis_angle({1, 0, 0}, rot_angle)
                                    : Rot3::identity();
        return make_bubble(g, degree, lambda, center, rot);
      }
      case MemberKind::PerturbedBubble:
        return detail::perturbed_member(g, degree, lambda, amplitude, mode, seed);
      case MemberKind::RandomField:
        return detail::random_member(g, amplitude, seed);
      case MemberKind::Equivariant: {
        RadialProfile p = turn > 0.0
                              ? boundary_turn_profile(radial_nodes(g.L), lambda, turn)
                              : harmonic_profile(radial_nodes(g.L), m, lambda);
        return lift(p, g);
      }
    }
    throw std::logic_error("CorpusMember: unknown kind");
  }
};

struct Corpus {
  std::uint64_t seed = 0;
  std::vector<CorpusMember> members;
};

// Thirty seeded maps spanning degrees 0 to 2, scales 0.15 to 0.5, angular
// perturbations, nine band-limited random fields at three amplitudes, and four
// equivariant profiles. Amplitude-bearing members whose energy lands above
// 11*pi at the reference resolution are regenerated once at 0.8x amplitude,
// which keeps every member under the 12*pi three-quantum cap with margin.
inline Corpus generate_corpus(std::uint64_t seed) {
  Corpus c;
  c.seed = seed;
  const std::uint64_t base = seed * 1000003ull;
  char buf[96];

  auto add = [&](CorpusMember m) { c.members.push_back(std::move(m)); };
  auto named = [&](MemberKind kind, const char* text) {
    CorpusMember m;
    m.kind = kind;
    m.name = text;
    return m;
  };

  add(named(MemberKind::Constant, "constant"));

  {
    CorpusMember m = named(MemberKind::RandomField, "near-constant a0.02");
    m.amplitude = 0.02;
    m.seed = base + 50;
    add(m);
  }

  const double d1_scales[] = {0.15, 0.2, 0.3, 0.45};
  for (double s : d1_scales) {
    std::snprintf(buf, sizeof buf, "bubble d1 s%.2f", s);
    CorpusMember m = named(MemberKind::Bubble, buf);
    m.degree = 1;
    m.lambda = s;
    add(m);
  }
  const double d2_scales[] = {0.2, 0.3, 0.45};
  for (double s : d2_scales) {
    std::snprintf(buf, sizeof buf, "bubble d2 s%.2f", s);
    CorpusMember m = named(MemberKind::Bubble, buf);
    m.degree = 2;
    m.lambda = s;
    add(m);
  }

  {
    CorpusMember m = named(MemberKind::Bubble, "bubble d1 s0.30 off(1.0,0.5)");
    m.degree = 1;
    m.lambda = 0.3;
    m.center = {1.0, 0.5, 0.0};
    add(m);
  }
  {
    CorpusMember m = named(MemberKind::Bubble, "bubble d1 s0.30 rotx0.7");
    m.degree = 1;
    m.lambda = 0.3;
    m.rot_angle = 0.7;
    add(m);
  }

  struct RippleSpec {
    int degree, mode;
    double lambda, amp;
    std::uint64_t off;
  };
  const RippleSpec ripples[] = {{1, 2, 0.3, 0.15, 100},
                                {1, 3, 0.45, 0.25, 110},
                                {2, 1, 0.3, 0.2, 111},
                                {1, 4, 0.45, 0.5, 402}};
  for (const RippleSpec& r : ripples) {
    std::snprintf(buf, sizeof buf, "ripple d%d s%.2f a%.2f m%d", r.degree, r.lambda,
                  r.amp, r.mode);
    CorpusMember m = named(MemberKind::PerturbedBubble, buf);
    m.degree = r.degree;
    m.lambda = r.lambda;
    m.amplitude = r.amp;
    m.mode = r.mode;
    m.seed = base + r.off;
    add(m);
  }

  const double amps[] = {0.15, 0.25, 0.35};
  for (double a : amps)
    for (int j = 0; j < 3; ++j) {
      std::snprintf(buf, sizeof buf, "random a%.2f j%d", a, j);
      CorpusMember m = named(MemberKind::RandomField, buf);
      m.amplitude = a;
      m.seed = base + 200 + 3 * static_cast<std::uint64_t>(a * 100.0 + 0.5) + j;
      add(m);
    }
  for (int j = 0; j < 2; ++j) {
    double a = 0.5 + 0.05 * j;
    std::snprintf(buf, sizeof buf, "random a%.2f j%d", a, j);
    CorpusMember m = named(MemberKind::RandomField, buf);
    m.amplitude = a;
    m.seed = base + 400 + j;
    add(m);
  }

  struct EquivSpec {
    int m;
    double lambda, turn;
  };
  const EquivSpec equis[] = {{1, 0.25, 0.0}, {1, 0.5, 0.0}, {2, 0.35, 0.0}, {1, 1.0, 3.0}};
  for (const EquivSpec& e : equis) {
    if (e.turn > 0.0)
      std::snprintf(buf, sizeof buf, "equivariant m%d s%.2f turn%.1f", e.m, e.lambda,
                    e.turn);
    else
      std::snprintf(buf, sizeof buf, "equivariant m%d s%.2f", e.m, e.lambda);
    CorpusMember m = named(MemberKind::Equivariant, buf);
    m.m = e.m;
    m.lambda = e.lambda;
    m.turn = e.turn;
    add(m);
  }

  const Grid ref(8.0, 257);
  for (CorpusMember& m : c.members) {
    if (m.kind != MemberKind::RandomField && m.kind != MemberKind::PerturbedBubble)
      continue;
    if (dirichlet_energy(m.realize(ref)) > 11.0 * kPi) {
      m.amplitude *= 0.8;
      m.damped = true;
    }
  }
  return c;
}

}  // namespace hmflow
