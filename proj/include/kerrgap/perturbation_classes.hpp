#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "kerrgap/energy.hpp"
#include "kerrgap/kerr_maps.hpp"
#include "kerrgap/map_fields.hpp"

namespace kerrgap {

enum class ClassId { vacuum_weighted, vacuum_asymptotic, em_weighted, em_asymptotic };

inline std::string class_name(ClassId c) {
  switch (c) {
    case ClassId::vacuum_weighted: return "vacuum_weighted";
    case ClassId::vacuum_asymptotic: return "vacuum_asymptotic";
    case ClassId::em_weighted: return "em_weighted";
    case ClassId::em_asymptotic: return "em_asymptotic";
  }
  return "?";
}

inline ClassId parse_class(const std::string& s) {
  for (auto c : {ClassId::vacuum_weighted, ClassId::vacuum_asymptotic, ClassId::em_weighted, ClassId::em_asymptotic})
    if (class_name(c) == s) return c;
  throw ConfigError("unknown perturbation class '" + s + "'");
}

struct ClassSpec {
  ClassId id = ClassId::vacuum_asymptotic;
  double lambda = 2.0;
  // sup-norm caps
  double alpha_minus_cap = 10.0;
  double dU_plus_cap = 10.0;
  double weighted_cap = 10.0;  // e^{U0} rho^{-1} |Delta chi|, |Delta psi|
  double norm_cap = 1e6;       // weighted integrals count as finite below this
  double edge_fraction_cap = 0.1;
  double axis_tol = 1e-3;
  double exponent_tol = 0.1;

  void validate() const {
    if (!(lambda > 1.5)) throw ConfigError("class decay exponent needs lambda > 3/2");
    for (double c : {alpha_minus_cap, dU_plus_cap, weighted_cap, norm_cap, edge_fraction_cap, axis_tol, exponent_tol})
      if (!(c > 0) || !std::isfinite(c)) throw ConfigError("class caps must be positive and finite");
  }
};

struct ConditionRow {
  std::string condition;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ValidationReport {
  ClassId id = ClassId::vacuum_asymptotic;
  std::vector<ConditionRow> rows;
  std::size_t sampled_nodes = 0;
  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ConditionRow& r) { return r.pass; });
  }
  const ConditionRow& row(const std::string& name) const {
    for (const auto& r : rows)
      if (r.condition == name) return r;
    throw UsageError("no condition '" + name + "' in report");
  }
};

inline void write_validation_csv(std::ostream& os, const ValidationReport& rep) {
  os << "condition,measured,threshold,pass\n";
  for (const auto& r : rep.rows)
    os << r.condition << ',' << format_double(r.measured) << ',' << format_double(r.threshold) << ','
       << (r.pass ? 1 : 0) << '\n';
  os << "sampled_nodes," << rep.sampled_nodes << ",0,1\n";
}

// ---------------------------------------------------------------- generators

namespace detail {

// r^a near 0, r^b near infinity
struct TwoPower {
  double a, b;
  double value(double r) const { return std::pow(r, a) * std::pow(1 + r * r, 0.5 * (b - a)); }
  double dlog(double r) const { return a / r + (b - a) * r / (1 + r * r); }
};

// amp * rho^4 * k(r)
inline ScalarField rho4_profile(const GridPtr& g, double amp, TwoPower k) {
  return ScalarField::sample_with_partials(g, [=](double r, double t) {
    double s = std::sin(t), s3 = s * s * s, r4 = r * r * r * r, kv = k.value(r);
    double v = amp * r4 * s3 * s * kv;
    return ScalarField::ValueAndPartials{v, v * (4 / r + k.dlog(r)), 4 * amp * r4 * s3 * std::cos(t) * kv};
  });
}

// (2 log r - U0) * c^2 / (r^2 + c^2): U0 + this behaves as 2 log r + O(r^2 log r)
// at the origin and decays like log(r)/r^2 at infinity.
inline ScalarField origin_shift(const ScalarField& U0, double core) {
  const auto& g = *U0.grid();
  std::vector<double> v(g.size()), ds(g.size()), dt(g.size());
  double c2 = core * core;
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      double r = g.r(i), r2 = r * r, b = c2 / (r2 + c2), bs = -2 * r2 * c2 / ((r2 + c2) * (r2 + c2));
      double f = 2 * std::log(r) - U0[k];
      v[k] = f * b;
      ds[k] = (2 - U0.ds()[k]) * b + f * bs;
      dt[k] = -U0.dtheta()[k] * b;
    }
  return ScalarField(U0.grid(), v, ds, dt);
}

}  // namespace detail

// (U0 + Delta U, w0 + y) in the decay class of the I functional with rate lambda:
// |Dy| ~ rho^2 r^{-lambda} at infinity, rho^2 r^{lambda-6} at the origin, rho^3 at the axis.
inline PotentialMap class_member_vacuum(const GridPtr& g, const KerrParams& kp, double lambda = 2.0,
                                        double amplitude = 1.0, double core = 0.25) {
  if (!(lambda > 1.5)) throw ConfigError("class decay exponent needs lambda > 3/2");
  auto base = kerr_potential_map(g, kp);
  auto dU = detail::origin_shift(base.U, core);
  auto y = detail::rho4_profile(g, amplitude, {lambda - 7, -lambda - 1});
  return {base.U + dU, base.w + y};
}

// Same construction for the Einstein/Maxwell class: Delta v like y above,
// Delta chi and Delta psi with |D.| ~ rho r^{-lambda} and rho r^{lambda-4}.
inline EMMap class_member_em(const GridPtr& g, const KerrNewmanParams& kp, double lambda = 2.0,
                             double amplitude = 1.0, double core = 0.25) {
  if (!(lambda > 1.5)) throw ConfigError("class decay exponent needs lambda > 3/2");
  auto base = kerr_newman_map(g, kp);
  detail::TwoPower kv{lambda - 7, -lambda - 1}, kc{lambda - 6, -lambda - 2};
  return {base.U + detail::origin_shift(base.U, core), base.v + detail::rho4_profile(g, amplitude, kv),
          base.chi + detail::rho4_profile(g, 0.5 * amplitude, kc),
          base.psi + detail::rho4_profile(g, -0.5 * amplitude, kc)};
}

// ---------------------------------------------------------------- validation

namespace detail {

inline double euclid_norm(const AxisymGrid& g, std::size_t i, double fs, double ft) {
  return std::hypot(fs, ft) / g.r(i);
}

struct Windows {
  std::vector<std::size_t> inner, outer, middle;
};

// 0.75 decades at each end of the radial range
inline Windows radial_windows(const AxisymGrid& g) {
  double decades = std::log10(g.r_max() / g.r_min());
  if (decades < 1.5) throw DataError("rate fits need at least 1.5 decades of radial range");
  Windows w;
  double lo = g.r_min() * std::pow(10.0, 0.75), hi = g.r_max() / std::pow(10.0, 0.75);
  for (std::size_t i = 0; i < g.ns(); ++i) {
    double r = g.r(i);
    if (r <= lo) w.inner.push_back(i);
    if (r >= hi) w.outer.push_back(i);
    if (r > lo && r < hi) w.middle.push_back(i);
  }
  if (w.inner.size() < 3 || w.outer.size() < 3) throw DataError("rate fit windows hold fewer than 3 shells");
  if (w.middle.empty()) w.middle.push_back(g.ns() / 2);
  return w;
}

// slope of log max_theta(|f| / rho^p) against log r over the shells
inline double radial_slope(const AxisymGrid& g, const std::vector<double>& f, double p,
                           const std::vector<std::size_t>& shells) {
  std::vector<double> rs, ms;
  for (auto i : shells) {
    double m = 0;
    for (std::size_t j = 0; j < g.nt(); ++j) m = std::max(m, std::abs(f[g.index(i, j)]) / std::pow(g.rho(i, j), p));
    if (m > 0) {
      rs.push_back(g.r(i));
      ms.push_back(m);
    }
  }
  if (rs.size() < 3) return NAN;  // vanishes in the window
  return fitted_exponent(rs, ms);
}

// slope of log max_r |f| against log sin(theta) on rows with sin(theta) < 0.3,
// over the middle shells
inline double axis_slope(const AxisymGrid& g, const std::vector<double>& f, const std::vector<std::size_t>& shells) {
  std::vector<double> ss, ms;
  for (std::size_t j = 0; j < g.nt(); ++j) {
    double st = g.sin_theta(j);
    if (st >= 0.3) continue;
    double m = 0;
    for (auto i : shells) m = std::max(m, std::abs(f[g.index(i, j)]));
    if (m > 0) {
      ss.push_back(st);
      ms.push_back(m);
    }
  }
  if (ss.size() < 3) return NAN;
  return fitted_exponent(ss, ms);
}

// largest |f| on the rows next to the axis, relative to max |f|
inline double axis_defect(const ScalarField& f) {
  const auto& g = *f.grid();
  double m = f.max_abs(), a = 0;
  if (m == 0) return 0;
  for (std::size_t i = 0; i < g.ns(); ++i)
    a = std::max({a, std::abs(f.at(i, 0)), std::abs(f.at(i, g.nt() - 1))});
  return a / m;
}

// fraction of the integral carried by the innermost and outermost 5% of shells
inline double edge_fraction(const AxisymGrid& g, const std::vector<double>& density) {
  std::size_t band = std::max<std::size_t>(1, g.ns() / 20);
  double total = 0, edge = 0;
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      double c = g.weight(i, j) * density[g.index(i, j)];
      total += c;
      if (i < band || i + band >= g.ns()) edge += c;
    }
  return total > 0 ? edge / total : 0.0;
}

class Validator {
 public:
  Validator(const ClassSpec& spec, const AxisymGrid& g) : spec_(spec), g_(g) {
    rep_.id = spec.id;
    rep_.sampled_nodes = g.size();
  }

  void sup(const std::string& name, double measured, double cap) { add(name, measured, cap, measured <= cap); }

  void finite(const std::string& name, const std::vector<double>& density) {
    double v = integrate(g_, density, Region::everywhere());
    add(name, v, spec_.norm_cap, std::isfinite(v) && v <= spec_.norm_cap);
    double e = edge_fraction(g_, density);
    add(name + "_edge_fraction", e, spec_.edge_fraction_cap, e <= spec_.edge_fraction_cap);
  }

  void axis_value(const std::string& name, const ScalarField& delta) {
    double d = axis_defect(delta);
    add(name, d, spec_.axis_tol, d <= spec_.axis_tol);
  }

  // O(r^e) as r -> infinity: fitted slope <= e + tol. A difference vanishing in the window passes.
  void rate_infinity(const std::string& name, const std::vector<double>& f, double p, double e,
                     const Windows& w) {
    double m = radial_slope(g_, f, p, w.outer);
    add(name, m, e + spec_.exponent_tol, std::isnan(m) || m <= e + spec_.exponent_tol);
  }
  // O(r^e) as r -> 0: fitted slope >= e - tol
  void rate_origin(const std::string& name, const std::vector<double>& f, double p, double e, const Windows& w) {
    double m = radial_slope(g_, f, p, w.inner);
    add(name, m, e - spec_.exponent_tol, std::isnan(m) || m >= e - spec_.exponent_tol);
  }
  void rate_axis(const std::string& name, const std::vector<double>& f, double e, const Windows& w) {
    double m = axis_slope(g_, f, w.middle);
    add(name, m, e - spec_.exponent_tol, std::isnan(m) || m >= e - spec_.exponent_tol);
  }
  // o(r^e) conditions are strict
  void little_o_infinity(const std::string& name, const std::vector<double>& f, double e, const Windows& w) {
    double m = radial_slope(g_, f, 0, w.outer);
    add(name, m, e, std::isnan(m) || m < e);
  }
  void little_o_origin(const std::string& name, const std::vector<double>& f, double e, const Windows& w) {
    double m = radial_slope(g_, f, 0, w.inner);
    add(name, m, e, std::isnan(m) || m > e);
  }

  ValidationReport take() { return std::move(rep_); }

 private:
  void add(const std::string& n, double m, double t, bool p) { rep_.rows.push_back({n, m, t, p}); }
  const ClassSpec& spec_;
  const AxisymGrid& g_;
  ValidationReport rep_;
};

inline std::vector<double> grad_magnitude(const ScalarField& f) {
  const auto& g = *f.grid();
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      out[k] = euclid_norm(g, i, f.ds()[k], f.dtheta()[k]);
    }
  return out;
}

inline void u_rates(Validator& v, const ScalarField& U, const Windows& w) {
  const auto& g = *U.grid();
  std::vector<double> u(g.size()), u0(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      u[k] = U[k];
      u0[k] = U[k] - 2 * std::log(g.r(i));
    }
  v.little_o_infinity("U_decay_infinity", u, -0.5, w);
  v.little_o_origin("U_minus_2logr_origin", u0, 0.5, w);
}

}  // namespace detail

// Weighted class in (x, Y): alpha = x - x0, y = Y - Y0.
inline ValidationReport validate(const VacuumMap& base, const VacuumMap& map, const ClassSpec& spec) {
  spec.validate();
  if (spec.id != ClassId::vacuum_weighted) throw ClassError("a reduced (x, Y) map validates only against vacuum_weighted");
  const auto& g = *base.x.grid();
  auto alpha = map.x - base.x;
  auto y = map.Y - base.Y;
  detail::Validator v(spec, g);
  double am = 0;
  for (std::size_t k = 0; k < g.size(); ++k) am = std::max(am, -alpha[k]);
  v.sup("alpha_minus_sup", am, spec.alpha_minus_cap);
  std::vector<double> da(g.size()), dy(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      double rho = g.rho(i, j);
      da[k] = alpha.grad_norm2(k);
      dy[k] = std::exp(-2 * base.x[k]) / (rho * rho * rho * rho) * y.grad_norm2(k);
    }
  v.finite("alpha_H1", da);
  v.finite("y_H1_X0", dy);
  v.axis_value("y_axis", y);
  return v.take();
}

// Asymptotic class in (U, w): U rates, |Dw| rates with lambda, axis values of w.
inline ValidationReport validate(const PotentialMap& base, const PotentialMap& map, const ClassSpec& spec) {
  spec.validate();
  if (spec.id != ClassId::vacuum_asymptotic) throw ClassError("a (U, w) map validates only against vacuum_asymptotic");
  const auto& g = *base.U.grid();
  auto w = detail::radial_windows(g);
  auto y = map.w - base.w;
  detail::Validator v(spec, g);
  detail::u_rates(v, map.U, w);
  auto dy = detail::grad_magnitude(y);
  double L = spec.lambda;
  v.rate_infinity("Dw_rate_infinity", dy, 2, -L, w);
  v.rate_origin("Dw_rate_origin", dy, 2, L - 6, w);
  v.rate_axis("Dw_rate_axis", dy, 2, w);
  v.axis_value("w_axis", y);
  auto dens = detail::densities_I_vacuum(map.U, map.w);
  std::vector<double> total(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) total[k] = dens[0][k] + dens[1][k];
  v.finite("energy_I", total);
  return v.take();
}

inline ValidationReport validate(const EMMap& base, const EMMap& map, const ClassSpec& spec) {
  spec.validate();
  if (spec.id != ClassId::em_weighted && spec.id != ClassId::em_asymptotic)
    throw ClassError("an electromagnetic map validates only against em_weighted or em_asymptotic");
  const auto& g = *base.U.grid();
  auto dU = map.U - base.U, dv = map.v - base.v, dchi = map.chi - base.chi, dpsi = map.psi - base.psi;
  auto [os, ot] = omega_form(map);
  auto [o0s, o0t] = omega_form(base);
  std::vector<double> dom(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      dom[k] = detail::euclid_norm(g, i, os[k] - o0s[k], ot[k] - o0t[k]);
    }
  auto dchi_n = detail::grad_magnitude(dchi), dpsi_n = detail::grad_magnitude(dpsi);
  detail::Validator v(spec, g);
  v.axis_value("v_axis", dv);
  v.axis_value("chi_axis", dchi);
  v.axis_value("psi_axis", dpsi);
  if (spec.id == ClassId::em_weighted) {
    double up = 0, wc = 0, wp = 0;
    for (std::size_t i = 0; i < g.ns(); ++i)
      for (std::size_t j = 0; j < g.nt(); ++j) {
        auto k = g.index(i, j);
        double wgt = std::exp(base.U[k]) / g.rho(i, j);
        up = std::max(up, dU[k]);
        wc = std::max(wc, wgt * std::abs(dchi[k]));
        wp = std::max(wp, wgt * std::abs(dpsi[k]));
      }
    v.sup("dU_plus_sup", up, spec.dU_plus_cap);
    v.sup("weighted_dchi_sup", wc, spec.weighted_cap);
    v.sup("weighted_dpsi_sup", wp, spec.weighted_cap);
    std::vector<double> n1(g.size()), n2(g.size()), n3(g.size()), n4(g.size()), n5(g.size());
    for (std::size_t i = 0; i < g.ns(); ++i)
      for (std::size_t j = 0; j < g.nt(); ++j) {
        auto k = g.index(i, j);
        double rho = g.rho(i, j), e1 = std::exp(base.U[k]) / rho, e2 = e1 * e1;
        double hybrid = std::min(e1, e2);
        n1[k] = dU.grad_norm2(k);
        n2[k] = e2 * e2 * dom[k] * dom[k];
        n3[k] = e2 * dchi_n[k] * dchi_n[k];
        n4[k] = e2 * dpsi_n[k] * dpsi_n[k];
        n5[k] = hybrid * hybrid * dv.grad_norm2(k);
      }
    v.finite("dU_H1", n1);
    v.finite("omega_L2", n2);
    v.finite("dchi_H1", n3);
    v.finite("dpsi_H1", n4);
    v.finite("dv_H1_hybrid", n5);
  } else {
    auto w = detail::radial_windows(g);
    double L = spec.lambda;
    detail::u_rates(v, map.U, w);
    v.rate_infinity("omega_rate_infinity", dom, 2, -L, w);
    v.rate_origin("omega_rate_origin", dom, 2, L - 6, w);
    v.rate_axis("omega_rate_axis", dom, 2, w);
    v.rate_infinity("Dchi_rate_infinity", dchi_n, 1, -L, w);
    v.rate_origin("Dchi_rate_origin", dchi_n, 1, L - 4, w);
    v.rate_axis("Dchi_rate_axis", dchi_n, 1, w);
    v.rate_infinity("Dpsi_rate_infinity", dpsi_n, 1, -L, w);
    v.rate_origin("Dpsi_rate_origin", dpsi_n, 1, L - 4, w);
    v.rate_axis("Dpsi_rate_axis", dpsi_n, 1, w);
    auto dens = detail::densities_em(map);
    std::vector<double> total(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) total[k] = dens[0][k] + dens[1][k] + dens[2][k];
    v.finite("energy_I", total);
  }
  return v.take();
}

// ---------------------------------------------------------------- derived rates

// |f| = rho^a O(r^b)
struct Rate {
  double rho_power = 0.0;
  double r_power = 0.0;

  Rate operator*(const Rate& o) const { return {rho_power + o.rho_power, r_power + o.r_power}; }
  // Trade powers of rho for powers of r (rho <= r); valid at both ends.
  Rate lowered_to(double rho_pow) const { return {rho_pow, r_power + rho_power - rho_pow}; }
  // Integrate the gradient bound off the axis: rho^a -> rho^{a+1}.
  Rate integrated() const { return {rho_power + 1, r_power}; }
  std::string str() const {
    std::ostringstream os;
    os << "rho^" << format_double(rho_power) << " O(r^" << format_double(r_power) << ")";
    return os.str();
  }
};

enum class RateRegime { infinity, origin, axis };

inline std::string regime_name(RateRegime r) {
  switch (r) {
    case RateRegime::infinity: return "infinity";
    case RateRegime::origin: return "origin";
    case RateRegime::axis: return "axis";
  }
  return "?";
}

struct RateRow {
  std::string quantity;
  RateRegime regime = RateRegime::infinity;
  Rate rate;
};

namespace detail {

// bound of a sum, both terms written with the same rho power
inline Rate dominant(Rate a, Rate b, RateRegime regime) {
  double p = std::min(a.rho_power, b.rho_power);
  if (regime == RateRegime::axis) return {p, 0.0};  // axis rates carry no r dependence
  a = a.lowered_to(p);
  b = b.lowered_to(p);
  if (regime == RateRegime::infinity) return a.r_power >= b.r_power ? a : b;
  return a.r_power <= b.r_power ? a : b;
}

}  // namespace detail

// chi, psi from the gradient bounds and the axis values; Dv from
// |Dv| <= |omega| + |chi Dpsi - psi Dchi|.
inline std::vector<RateRow> derived_rates(const ClassSpec& spec) {
  spec.validate();
  double L = spec.lambda;
  std::vector<RateRow> rows;
  struct Inputs {
    RateRegime regime;
    Rate omega, dfield, psi;
  };
  // psi = const + rho^2 O(r^b) is carried as O(r^{b+2}), as in the derivation.
  Inputs in[3] = {{RateRegime::infinity, {2, -L}, {1, -L}, {0, -L + 2}},
                  {RateRegime::origin, {2, L - 6}, {1, L - 4}, {0, L - 2}},
                  {RateRegime::axis, {2, 0}, {1, 0}, {0, 0}}};
  for (const auto& c : in) {
    Rate chi = c.dfield.integrated();
    Rate cross = detail::dominant(chi * c.dfield, c.psi * c.dfield, c.regime);
    Rate dv = detail::dominant(c.omega, cross, c.regime);
    rows.push_back({"chi", c.regime, chi});
    rows.push_back({"psi", c.regime, c.psi});
    rows.push_back({"Dv", c.regime, dv});
  }
  return rows;
}

inline void write_rates_csv(std::ostream& os, const std::vector<RateRow>& rows) {
  os << "quantity,regime,rho_power,r_power,rate\n";
  for (const auto& r : rows)
    os << r.quantity << ',' << regime_name(r.regime) << ',' << format_double(r.rate.rho_power) << ','
       << format_double(r.rate.r_power) << ',' << r.rate.str() << '\n';
}

}  // namespace kerrgap
