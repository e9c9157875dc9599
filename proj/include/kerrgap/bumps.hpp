#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "kerrgap/core.hpp"
#include "kerrgap/grid.hpp"

namespace kerrgap {

enum class BumpKind { alpha, y };

namespace detail {

// Plateau window: 0 outside [lo, hi], 1 on [lo + a, hi - b], C^2 quintic ramps.
struct Window {
  double lo = 0, hi = 1, a = 0.5, b = 0.5;
  double value(double x) const { return smoothstep5((x - lo) / a) * smoothstep5((hi - x) / b); }
  double slope(double x) const {
    return smoothstep5_prime((x - lo) / a) / a * smoothstep5((hi - x) / b) -
           smoothstep5((x - lo) / a) * smoothstep5_prime((hi - x) / b) / b;
  }
};

struct BumpShape {
  Window radial;       // in s = log r
  Window angular;      // in mu = cos(theta) or in theta
  bool angular_in_mu = true;
  double mod_amp = 0, mod_freq = 1, mod_phase = 0;
  double sign = 1;

  ScalarField::ValueAndPartials eval(double r, double theta) const {
    double s = std::log(r);
    double ws = radial.value(s), dws = radial.slope(s);
    double wa, dwa;
    if (angular_in_mu) {
      double mu = std::cos(theta);
      wa = angular.value(mu);
      dwa = -std::sin(theta) * angular.slope(mu);
    } else {
      wa = angular.value(theta);
      dwa = angular.slope(theta);
    }
    double m = 1 + mod_amp * std::sin(mod_freq * s + mod_phase);
    double dm = mod_amp * mod_freq * std::cos(mod_freq * s + mod_phase);
    double v = sign * ws * wa * m;
    double d_s = sign * wa * (dws * m + ws * dm);
    double d_t = sign * ws * dwa * m;
    return {v, d_s / r, d_t};
  }
};

// Ramps are at least min_ramp wide so that they stay resolved on default grids.
inline Window random_window(Rng& rng, double lo, double hi, double min_width, double width_frac_lo,
                            double width_frac_hi, double min_ramp) {
  double avail = hi - lo;
  double width = std::max({min_width, 2.2 * min_ramp, rng.uniform(width_frac_lo, width_frac_hi) * avail});
  width = std::min(avail, width);
  double start = lo + rng.uniform() * (avail - width);
  Window w;
  w.lo = start;
  w.hi = start + width;
  w.a = std::max(min_ramp, rng.uniform(0.25, 0.5) * width);
  w.b = std::max(min_ramp, rng.uniform(0.25, 0.5) * width);
  double over = (w.a + w.b) / (0.95 * width);
  if (over > 1) {
    w.a /= over;
    w.b /= over;
  }
  return w;
}

inline BumpShape random_shape(Rng& rng, double R, double eps, BumpKind kind) {
  BumpShape b;
  double L = std::log(R / eps), margin = 0.05 * L;
  if (kind == BumpKind::alpha) {
    b.radial = random_window(rng, std::log(eps) + margin, std::log(R) - margin, 0.8, 0.3, 0.7, 0.8);
    double mlo = rng.uniform(-1.6, 0.2);
    double width = rng.uniform(0.8, 2.0);
    b.angular = {mlo, mlo + width, std::max(0.35, rng.uniform(0.3, 0.5) * width),
                 std::max(0.35, rng.uniform(0.3, 0.5) * width)};
    b.angular_in_mu = true;
  } else {
    double lo = std::log(3 * eps);
    if (lo >= std::log(R) - margin - 0.5) lo = std::log(eps) + margin;
    b.radial = random_window(rng, lo, std::log(R) - margin, 0.8, 0.3, 0.7, 0.8);
    double t0 = std::asin(std::min(1.0, 1.2 * eps / std::exp(b.radial.lo))) + 0.05;
    if (t0 >= pi / 2 - 0.2) throw UsageError("Omega region too thin for a y-type bump");
    b.angular = random_window(rng, t0, pi - t0, 0.5, 0.6, 1.0, 0.4);
    b.angular_in_mu = false;
  }
  b.mod_amp = rng.uniform(0.0, 0.4);
  b.mod_freq = rng.uniform(0.5, 2.0);
  b.mod_phase = rng.uniform(0.0, 2 * pi);
  b.sign = rng.coin() ? 1.0 : -1.0;
  return b;
}

inline ScalarField sample_normalized(const GridPtr& g, const BumpShape& shape, double amplitude) {
  auto f = ScalarField::sample_with_partials(g, [&](double r, double t) { return shape.eval(r, t); });
  double m = f.max_abs();
  if (amplitude == 0.0 || m == 0.0) return ScalarField::zeros(g);
  return f.scaled(amplitude / m);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed * 0x9E3779B97F4A7C15ULL + stream);
  return r.next();
}

}  // namespace detail

// Compactly supported C^2 bump. alpha-type bumps live on an annulus and may
// touch the axis (they are smooth functions of cos(theta) there); y-type bumps
// live on an Omega region, away from the axis. max |field| = amplitude on nodes.
inline ScalarField bump_perturbation(const GridPtr& g, const Region& region, double amplitude, std::uint64_t seed,
                                     BumpKind kind) {
  region.validate();
  if (kind == BumpKind::alpha && region.kind != Region::Kind::annulus)
    throw UsageError("alpha-type bumps need an annulus region");
  if (kind == BumpKind::y && region.kind != Region::Kind::omega)
    throw UsageError("y-type bumps need an Omega region");
  check_coverage(*g, region);
  Rng rng(detail::mix_seed(seed, kind == BumpKind::alpha ? 1 : 2));
  auto shape = detail::random_shape(rng, region.a, region.b, kind);
  return detail::sample_normalized(g, shape, amplitude);
}

struct EMBump {
  ScalarField dU, dv, dchi, dpsi;
};

// (Delta U, Delta v, Delta chi, Delta psi): Delta U on the annulus with the same
// (R, eps), the rest on Omega_{R,eps}.
inline EMBump em_bump_perturbation(const GridPtr& g, const Region& omega, double amplitude, std::uint64_t seed) {
  omega.validate();
  if (omega.kind != Region::Kind::omega) throw UsageError("em bump tuples need an Omega region");
  check_coverage(*g, omega);
  EMBump b;
  Rng r0(detail::mix_seed(seed, 11)), r1(detail::mix_seed(seed, 12)), r2(detail::mix_seed(seed, 13)),
      r3(detail::mix_seed(seed, 14));
  b.dU = detail::sample_normalized(g, detail::random_shape(r0, omega.a, omega.b, BumpKind::alpha), amplitude);
  b.dv = detail::sample_normalized(g, detail::random_shape(r1, omega.a, omega.b, BumpKind::y), amplitude);
  b.dchi = detail::sample_normalized(g, detail::random_shape(r2, omega.a, omega.b, BumpKind::y), amplitude);
  b.dpsi = detail::sample_normalized(g, detail::random_shape(r3, omega.a, omega.b, BumpKind::y), amplitude);
  return b;
}

}  // namespace kerrgap
