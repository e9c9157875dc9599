#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "kerrgap/core.hpp"
#include "kerrgap/hyperbolic_targets.hpp"

namespace kerrgap {

struct KerrParams {
  double J = 1.0;
};

struct KerrNewmanParams {
  double m = std::sqrt(2.0);
  double a = 1.0;
  double q = 1.0;

  static KerrNewmanParams from_aq(double a, double q) { return {std::sqrt(a * a + q * q), a, q}; }
};

inline void validate(const KerrParams& p) {
  if (!std::isfinite(p.J) || p.J == 0.0) throw DomainError("Kerr parameter J must be finite and nonzero");
}

inline void validate(const KerrNewmanParams& p) {
  if (!std::isfinite(p.m) || !std::isfinite(p.a) || !std::isfinite(p.q) || !(p.m > 0))
    throw DomainError("Kerr-Newman parameters need finite values and m > 0");
  double m2 = p.m * p.m, rhs = p.a * p.a + p.q * p.q;
  if (std::abs(m2 - rhs) > 1e-12 * m2) throw DomainError("Kerr-Newman parameters violate m^2 = a^2 + q^2");
}

// Partial derivatives with respect to (r, theta).
struct Partial {
  double dr = 0.0;
  double dtheta = 0.0;
};

struct KerrSample {
  H2Point point;
  Partial dX, dY;
  // x0 = log X0 - 2 log(r sin(theta)), regular on the axis
  double x0 = 0.0;
  Partial dx0;
};

struct KerrPotentials {
  double U0 = 0.0;
  double w0 = 0.0;
  Partial dU0, dw0;
};

struct KerrNewmanSample {
  CH2Point point;  // (u0, v0, chi0, psi0); u0 blows up on the axis
  Partial du, dv, dchi, dpsi;
  // U0 = u0 + log(rho), regular on the axis
  double U0 = 0.0;
  Partial dU0;
  // omega0 = Dv0 + chi0 Dpsi0 - psi0 Dchi0, (dr, dtheta) components
  Partial omega;
};

enum class Branch { upper, lower };  // z > 0 (theta -> 0), z < 0 (theta -> pi)

namespace detail {

inline void check_interior(double r, double theta) {
  if (!std::isfinite(r) || !std::isfinite(theta)) throw DomainError("non-finite evaluation point");
  if (!(r > 0)) throw SingularEvaluation("evaluation at the origin; use axis_limits or a positive radius");
  if (!(theta > 0 && theta < pi)) throw SingularEvaluation("evaluation on the axis; use axis_limits");
}

// P = X0 / sin^2(theta) and its partials.
struct KerrCore {
  double P, Pr, Pt;
};

inline KerrCore kerr_core(double r, double theta, double j) {
  double c = std::cos(theta), s = std::sin(theta), s2 = s * s;
  double sj = std::sqrt(j), j32 = j * sj;
  double rt = r + sj, sig = rt * rt + j * c * c;
  KerrCore k;
  k.P = rt * rt + j + 2 * j32 * rt * s2 / sig;
  k.Pr = 2 * rt + 2 * j32 * s2 * (j * c * c - rt * rt) / (sig * sig);
  k.Pt = 4 * j32 * rt * s * c * (rt * rt + j) / (sig * sig);
  return k;
}

}  // namespace detail

// (X0, Y0) as printed, with J entering Y0 through J and J^2.
inline KerrSample extreme_kerr(double r, double theta, const KerrParams& params) {
  validate(params);
  detail::check_interior(r, theta);
  double J = params.J, j = std::abs(J);
  double c = std::cos(theta), s = std::sin(theta), s2 = s * s, s3 = s2 * s, s4 = s2 * s2;
  double rt = r + std::sqrt(j), sig = rt * rt + j * c * c;
  auto k = detail::kerr_core(r, theta, j);
  KerrSample out;
  out.point.X = k.P * s2;
  out.dX = {k.Pr * s2, k.Pt * s2 + 2 * k.P * s * c};
  out.point.Y = 2 * J * (c * c * c - 3 * c) - 2 * J * J * c * s4 / sig;
  out.dY.dr = 4 * J * J * c * s4 * rt / (sig * sig);
  out.dY.dtheta = 6 * J * s3 - 2 * J * J * s3 * ((4 * c * c - s2) / sig + 2 * j * c * c * s2 / (sig * sig));
  out.x0 = std::log(k.P) - 2 * std::log(r);
  out.dx0 = {k.Pr / k.P - 2 / r, k.Pt / k.P};
  return out;
}

inline KerrPotentials kerr_potentials(double r, double theta, const KerrParams& params) {
  auto k = extreme_kerr(r, theta, params);
  KerrPotentials p;
  p.U0 = -0.5 * k.x0;
  p.dU0 = {-0.5 * k.dx0.dr, -0.5 * k.dx0.dtheta};
  p.w0 = 0.5 * k.point.Y;
  p.dw0 = {0.5 * k.dY.dr, 0.5 * k.dY.dtheta};
  return p;
}

inline KerrNewmanSample extreme_kerr_newman(double r, double theta, const KerrNewmanParams& params) {
  validate(params);
  detail::check_interior(r, theta);
  double m = params.m, a = params.a, q = params.q, a2 = a * a, q2 = q * q;
  double c = std::cos(theta), s = std::sin(theta), s2 = s * s, s3 = s2 * s;
  double rt = r + m, sig = rt * rt + a2 * c * c, sig2 = sig * sig;
  double sig_r = 2 * rt, sig_t = -2 * a2 * s * c;

  // e^{-2 u0} = P sin^2(theta)
  double N = a2 * s2 * (2 * m * rt - q2);
  double N_r = 2 * m * a2 * s2, N_t = 2 * a2 * s * c * (2 * m * rt - q2);
  double P = rt * rt + a2 + N / sig;
  double P_r = 2 * rt + (N_r * sig - N * sig_r) / sig2;
  double P_t = (N_t * sig - N * sig_t) / sig2;

  KerrNewmanSample out;
  out.U0 = std::log(r) - 0.5 * std::log(P);
  out.dU0 = {1 / r - 0.5 * P_r / P, -0.5 * P_t / P};
  out.point.u = -0.5 * std::log(P * s2);
  out.du = {-0.5 * P_r / P, -0.5 * P_t / P - c / s};

  // v0 = m a c (3 - c^2) - a (q^2 rt - m a^2 s^2) c s^2 / Sigma
  double K = q2 * rt - m * a2 * s2, K_r = q2, K_t = -2 * m * a2 * s * c;
  double L = c * s2, L_t = -s3 + 2 * s * c * c;
  double T2 = a * K * L / sig;
  double T2_r = a * ((K_r * L) * sig - K * L * sig_r) / sig2;
  double T2_t = a * ((K_t * L + K * L_t) * sig - K * L * sig_t) / sig2;
  out.point.v = m * a * c * (3 - c * c) - T2;
  out.dv = {-T2_r, -3 * m * a * s3 - T2_t};

  out.point.chi = -q * a * rt * s2 / sig;
  out.dchi = {-q * a * s2 * (sig - 2 * rt * rt) / sig2, -2 * q * a * rt * s * c * (rt * rt + a2) / sig2};

  out.point.psi = q * (rt * rt + a2) * c / sig;
  out.dpsi = {-2 * q * a2 * rt * c * s2 / sig2, q * (rt * rt + a2) * s * (a2 * c * c - rt * rt) / sig2};

  double chi = out.point.chi, psi = out.point.psi;
  out.omega = {out.dv.dr + chi * out.dpsi.dr - psi * out.dchi.dr,
               out.dv.dtheta + chi * out.dpsi.dtheta - psi * out.dchi.dtheta};
  return out;
}

// Axis value of Y0 for Kerr.
inline double kerr_axis_limit(const KerrParams& params, Branch branch) {
  validate(params);
  return branch == Branch::upper ? -4 * params.J : 4 * params.J;
}

// Axis values (v0, chi0, psi0) for Kerr-Newman.
inline CH2Point kerr_newman_axis_limit(const KerrNewmanParams& params, Branch branch) {
  validate(params);
  double sgn = branch == Branch::upper ? 1.0 : -1.0;
  return {0.0, sgn * 2 * params.m * params.a, 0.0, sgn * params.q};
}

// Euclidean |Df| from (r, theta) partials.
inline double euclidean_norm(const Partial& p, double r) { return std::hypot(p.dr, p.dtheta / r); }

// ---------------------------------------------------------------- asymptotic rates

enum class Regime { r_to_infinity, r_to_zero, rho_to_zero };
enum class RateKind { exact, upper_bound };

struct RateReport {
  double fitted_exponent = 0.0;
  double expected_exponent = 0.0;
  bool pass = false;
  std::vector<double> scales;
  std::vector<double> values;
};

// Samples |f| on a geometric sequence of scales in the given regime and fits
// |f| ~ scale^p. An upper_bound claim O(scale^p) passes when the fitted decay is
// at least as fast: p_fit <= p + 0.1 as scale -> infinity, p_fit >= p - 0.1 as
// scale -> 0.
inline RateReport asymptotic_rate_check(const std::function<double(double)>& sampler, double expected,
                                        Regime regime, RateKind kind = RateKind::exact, int n_scales = 10,
                                        double first = 0.0, double decades = 3.0) {
  if (n_scales < 8) throw DataError("rate check needs at least 8 scales");
  if (first == 0.0) first = regime == Regime::r_to_infinity ? 10.0 : 0.1;
  RateReport rep;
  rep.expected_exponent = expected;
  double dir = regime == Regime::r_to_infinity ? 1.0 : -1.0;
  for (int k = 0; k < n_scales; ++k) {
    double sc = first * std::pow(10.0, dir * decades * k / (n_scales - 1));
    double v = sampler(sc);
    if (!std::isfinite(v)) throw DataError("non-finite sample in rate check");
    rep.scales.push_back(sc);
    rep.values.push_back(std::abs(v));
  }
  rep.fitted_exponent = fitted_exponent(rep.scales, rep.values);
  if (kind == RateKind::exact)
    rep.pass = std::abs(rep.fitted_exponent - expected) <= 0.1;
  else if (regime == Regime::r_to_infinity)
    rep.pass = rep.fitted_exponent <= expected + 0.1;
  else
    rep.pass = rep.fitted_exponent >= expected - 0.1;
  return rep;
}

}  // namespace kerrgap
