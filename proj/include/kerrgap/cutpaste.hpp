#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "kerrgap/energy.hpp"
#include "kerrgap/hyperbolic_targets.hpp"
#include "kerrgap/map_fields.hpp"
#include "kerrgap/variation.hpp"

namespace kerrgap {

struct CutoffSpec {
  double delta = 0.25;
  double eps = 0.25 * 0.25 * 0.25 * 0.25;

  void validate() const {
    if (!(delta >= 1e-3 && delta < 0.5)) throw ConfigError("cutoff delta must lie in [1e-3, 0.5)");
    if (!(eps > 0 && eps < delta)) throw ConfigError("cutoff eps must lie in (0, delta)");
    if (eps > delta * delta * (1 + 1e-12)) throw ConfigError("cutoff eps must not exceed delta^2");
  }
};

// delta_k = 0.25 * 2^{-k}, eps_k = delta_k^4
inline std::vector<CutoffSpec> default_ladder(int rungs = 4) {
  if (rungs < 2) throw ConfigError("a ladder needs at least 2 rungs");
  std::vector<CutoffSpec> out;
  for (int k = 0; k < rungs; ++k) {
    double d = 0.25 * std::ldexp(1.0, -k);
    out.push_back({d, d * d * d * d});
  }
  return out;
}

enum class CutoffKind { phi1_delta, phi_delta, phi_eps };


// phi1_delta: 1 on r <= 1/delta, 0 on r >= 2/delta
// phi_delta: 0 on r <= delta, 1 on r >= 2 delta
// phi_eps: 0 on rho <= eps, 1 on rho >= sqrt(eps), logarithmic in between.
// The argument is r for the first two, rho for the last.
inline double cutoff(CutoffKind kind, double x, const CutoffSpec& c) {
  switch (kind) {
    case CutoffKind::phi1_delta: return 1 - smoothstep5(std::log(x * c.delta) / std::log(2.0));
    case CutoffKind::phi_delta: return smoothstep5(std::log(x / c.delta) / std::log(2.0));
    case CutoffKind::phi_eps: {
      if (x <= c.eps) return 0;
      double top = std::sqrt(c.eps);
      if (x >= top) return 1;
      return std::log(x / c.eps) / std::log(top / c.eps);
    }
  }
  return 0;
}

inline double cutoff_derivative(CutoffKind kind, double x, const CutoffSpec& c) {
  const double l2 = std::log(2.0);
  switch (kind) {
    case CutoffKind::phi1_delta: return -smoothstep5_prime(std::log(x * c.delta) / l2) / (x * l2);
    case CutoffKind::phi_delta: return smoothstep5_prime(std::log(x / c.delta) / l2) / (x * l2);
    case CutoffKind::phi_eps: {
      double top = std::sqrt(c.eps);
      if (x <= c.eps || x >= top) return 0;
      return 1 / (x * std::log(top / c.eps));
    }
  }
  return 0;
}

namespace detail {

inline ScalarField cutoff_field(const GridPtr& gp, CutoffKind kind, const CutoffSpec& c) {
  const auto& g = *gp;
  std::vector<double> v(g.size()), ds(g.size()), dt(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      if (kind == CutoffKind::phi_eps) {
        double rho = g.rho(i, j), d = cutoff_derivative(kind, rho, c);
        v[k] = cutoff(kind, rho, c);
        ds[k] = rho * d;
        dt[k] = rho * g.cos_theta(j) / g.sin_theta(j) * d;
      } else {
        double r = g.r(i);
        v[k] = cutoff(kind, r, c);
        ds[k] = r * cutoff_derivative(kind, r, c);
      }
    }
  return ScalarField(gp, v, ds, dt);
}

// f0 + phi (f - f0), with product-rule partials
inline ScalarField paste(const ScalarField& f0, const ScalarField& f, const ScalarField& phi) {
  const auto& g = *f0.grid();
  std::vector<double> v(g.size()), ds(g.size()), dt(g.size());
  const auto &as = f0.ds(), &at = f0.dtheta(), &bs = f.ds(), &bt = f.dtheta(), &ps = phi.ds(), &pt = phi.dtheta();
  for (std::size_t k = 0; k < g.size(); ++k) {
    // exact copies where the cutoff is flat, so support statements hold node by node
    if ((phi[k] == 0 || phi[k] == 1) && ps[k] == 0 && pt[k] == 0) {
      bool keep = phi[k] == 1;
      v[k] = keep ? f[k] : f0[k];
      ds[k] = keep ? bs[k] : as[k];
      dt[k] = keep ? bt[k] : at[k];
      continue;
    }
    double d = f[k] - f0[k];
    v[k] = f0[k] + phi[k] * d;
    ds[k] = as[k] + phi[k] * (bs[k] - as[k]) + ps[k] * d;
    dt[k] = at[k] + phi[k] * (bt[k] - at[k]) + pt[k] * d;
  }
  return ScalarField(f0.grid(), v, ds, dt);
}

inline void check_regions(const AxisymGrid& g, const CutoffSpec& c) {
  if (g.r_max() < 2 / c.delta) throw ConfigError("grid ends inside the far cutoff annulus");
  if (g.r_min() > c.delta) throw ConfigError("grid starts outside the origin cutoff ball");
  bool axis = false;
  for (std::size_t i = 0; i < g.ns() && !axis; ++i)
    if (g.r(i) >= c.delta && g.r(i) <= 2 / c.delta && g.rho(i, 0) < std::sqrt(c.eps)) axis = true;
  if (!axis) throw ConfigError("axis cutoff wedge holds no grid node");
}

// largest |f| on the rows next to the axis, relative to max |f|
inline double axis_relative(const ScalarField& f) {
  const auto& g = *f.grid();
  double m = f.max_abs(), a = 0;
  if (m == 0) return 0;
  for (std::size_t i = 0; i < g.ns(); ++i) a = std::max({a, std::abs(f.at(i, 0)), std::abs(f.at(i, g.nt() - 1))});
  return a / m;
}

}  // namespace detail

// Stages in order far, origin, axis; stage[0] is the input map.
struct VacuumPaste {
  CutoffSpec spec;
  std::vector<PotentialMap> stage;
  const PotentialMap& result() const { return stage.back(); }
};

struct EMPaste {
  CutoffSpec spec;
  std::vector<EMMap> stage;
  const EMMap& result() const { return stage.back(); }
};

inline VacuumPaste cut_paste_vacuum(const PotentialMap& base, const PotentialMap& map, const CutoffSpec& spec) {
  spec.validate();
  base.U.same_grid(map.U);
  const auto& gp = base.U.grid();
  detail::check_regions(*gp, spec);
  auto far = detail::cutoff_field(gp, CutoffKind::phi1_delta, spec);
  auto orig = detail::cutoff_field(gp, CutoffKind::phi_delta, spec);
  auto axis = detail::cutoff_field(gp, CutoffKind::phi_eps, spec);
  VacuumPaste out{spec, {map}};
  PotentialMap s1{detail::paste(base.U, map.U, far), detail::paste(base.w, map.w, far)};
  PotentialMap s2{s1.U, detail::paste(base.w, s1.w, orig)};
  PotentialMap s3{s2.U, detail::paste(base.w, s2.w, axis)};
  out.stage.push_back(std::move(s1));
  out.stage.push_back(std::move(s2));
  out.stage.push_back(std::move(s3));
  return out;
}

inline EMPaste cut_paste_em(const EMMap& base, const EMMap& map, const CutoffSpec& spec, double axis_tol = 1e-3) {
  spec.validate();
  base.U.same_grid(map.U);
  for (auto [name, a, b] : {std::tuple{"v", &base.v, &map.v}, std::tuple{"chi", &base.chi, &map.chi},
                            std::tuple{"psi", &base.psi, &map.psi}})
    if (detail::axis_relative(*b - *a) > axis_tol)
      throw ClassError(std::string("perturbation of ") + name + " does not vanish on the axis");
  const auto& gp = base.U.grid();
  detail::check_regions(*gp, spec);
  auto far = detail::cutoff_field(gp, CutoffKind::phi1_delta, spec);
  auto orig = detail::cutoff_field(gp, CutoffKind::phi_delta, spec);
  auto axis = detail::cutoff_field(gp, CutoffKind::phi_eps, spec);
  auto step = [&](const EMMap& m, const ScalarField& phi, bool with_u) {
    return EMMap{with_u ? detail::paste(base.U, m.U, phi) : m.U, detail::paste(base.v, m.v, phi),
                 detail::paste(base.chi, m.chi, phi), detail::paste(base.psi, m.psi, phi)};
  };
  EMPaste out{spec, {map}};
  out.stage.push_back(step(map, far, true));
  out.stage.push_back(step(out.stage[1], orig, false));
  out.stage.push_back(step(out.stage[2], axis, false));
  return out;
}

// ---------------------------------------------------------------- study

struct RungResult {
  CutoffSpec spec;
  double far = 0, origin = 0, axis = 0;  // Delta I per stage, signed
  double total = 0;
  double l6 = 0;  // int d^6 between the pasted and the input map
};

struct ConvergenceTable {
  FunctionalId functional = FunctionalId::vacuum_I;
  double lambda = 2.0;
  std::vector<RungResult> rungs;
  // log-log slopes of |Delta I|: against delta, and against 1/|ln eps| for the axis stage.
  // NaN when a stage vanishes on some rung.
  double far_exponent = NAN, origin_exponent = NAN, axis_exponent = NAN, total_exponent = NAN;
};

// Grid resolving every cutoff of the ladder.
inline GridSpec ladder_grid_spec(const std::vector<CutoffSpec>& ladder, double cells_per_efold = 24) {
  if (ladder.empty()) throw ConfigError("empty cutoff ladder");
  double dmin = 1, emin = 1;
  for (const auto& c : ladder) {
    c.validate();
    dmin = std::min(dmin, c.delta);
    emin = std::min(emin, c.eps);
  }
  GridSpec s;
  s.r_min = dmin / 8;
  s.r_max = std::max(1e4, 16 / dmin);
  s.n_r = static_cast<int>(std::ceil(cells_per_efold * std::log(s.r_max / s.r_min)));
  s.axis_cell = std::max(1e-7, 0.25 * emin / (2 / dmin));
  s.cells_per_efold = 8;
  int graded = static_cast<int>(std::ceil(8 * std::log((pi / 64) / s.axis_cell)));
  s.n_theta = 2 * (graded + 32);
  return s;
}

namespace detail {

inline std::vector<double> total_density(const std::vector<std::vector<double>>& d) {
  std::vector<double> t(d[0].size(), 0.0);
  for (const auto& x : d)
    for (std::size_t k = 0; k < t.size(); ++k) t[k] += x[k];
  return t;
}

inline std::vector<double> density(const PotentialMap& m) { return total_density(densities_I_vacuum(m.U, m.w)); }
inline std::vector<double> density(const EMMap& m) { return total_density(densities_em(m)); }

inline double delta_integral(const AxisymGrid& g, const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = a[k] - b[k];
  return integrate(g, d, Region::everywhere());
}

// signed contribution beyond r_max of a difference density decaying like r^{-p}
inline double signed_tail(const AxisymGrid& g, const std::vector<double>& a, const std::vector<double>& b, double p) {
  std::size_t i = g.ns() - 1;
  double shell = 0, vol = 0;
  for (std::size_t j = 0; j < g.nt(); ++j) {
    auto k = g.index(i, j);
    shell += g.weight(i, j) * (a[k] - b[k]);
    vol += g.weight(i, j);
  }
  double R = g.r_max();
  return 4 * pi * (shell / vol) * R * R * R / (p - 3);
}

inline double l6(const PotentialMap& a, const PotentialMap& b) {
  const auto& g = *a.U.grid();
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      double rho2 = g.rho(i, j) * g.rho(i, j);
      double x = h2_distance({rho2 * std::exp(-2 * a.U[k]), 2 * a.w[k]}, {rho2 * std::exp(-2 * b.U[k]), 2 * b.w[k]});
      d[k] = std::pow(x, 6);
    }
  return integrate(g, d, Region::everywhere());
}

inline double l6(const EMMap& a, const EMMap& b) {
  const auto& g = *a.U.grid();
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      double lr = std::log(g.rho(i, j));
      CH2Point p{a.U[k] - lr, a.v[k], a.chi[k], a.psi[k]}, q{b.U[k] - lr, b.v[k], b.chi[k], b.psi[k]};
      bool same = p.u == q.u && p.v == q.v && p.chi == q.chi && p.psi == q.psi;
      d[k] = same ? 0.0 : std::pow(ch2_distance_closed_form(p, q), 6);
    }
  return integrate(g, d, Region::everywhere());
}

template <class Paste, class Map>
RungResult rung(const Map& base, const Paste& P, double lambda, double scale) {
  const auto& g = *base.U.grid();
  auto d0 = density(base);
  std::vector<std::vector<double>> d;
  for (const auto& s : P.stage) d.push_back(density(s));
  RungResult r;
  r.spec = P.spec;
  // The far stage removes the part of the integral beyond r_max as well.
  r.far = scale * (delta_integral(g, d[1], d[0]) - signed_tail(g, d[0], d0, 2 * lambda));
  r.origin = scale * delta_integral(g, d[2], d[1]);
  r.axis = scale * delta_integral(g, d[3], d[2]);
  r.total = r.far + r.origin + r.axis;
  r.l6 = l6(P.stage[3], P.stage[0]);
  return r;
}

inline double safe_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> ay;
  for (double v : y) {
    if (!(std::abs(v) > 0)) return NAN;
    ay.push_back(std::abs(v));
  }
  return fitted_exponent(x, ay);
}

inline void fit(ConvergenceTable& t) {
  std::vector<double> d, il, f, o, a, tot;
  for (const auto& r : t.rungs) {
    d.push_back(r.spec.delta);
    il.push_back(1 / std::abs(std::log(r.spec.eps)));
    f.push_back(r.far);
    o.push_back(r.origin);
    a.push_back(r.axis);
    tot.push_back(r.total);
  }
  t.far_exponent = safe_exponent(d, f);
  t.origin_exponent = safe_exponent(d, o);
  t.axis_exponent = safe_exponent(il, a);
  t.total_exponent = safe_exponent(d, tot);
}

inline void check_ladder(const std::vector<CutoffSpec>& ladder, double lambda) {
  if (ladder.size() < 2) throw ConfigError("a ladder needs at least 2 rungs");
  for (const auto& c : ladder) c.validate();
  if (!(lambda > 1.5)) throw ConfigError("decay exponent needs lambda > 3/2");
}

}  // namespace detail

inline ConvergenceTable convergence_study(const PotentialMap& base, const PotentialMap& map, FunctionalId fn,
                                          const std::vector<CutoffSpec>& ladder, double lambda = 2.0) {
  if (fn == FunctionalId::em_I) throw ClassError("em_I needs an electromagnetic map");
  detail::check_ladder(ladder, lambda);
  ConvergenceTable t;
  t.functional = fn;
  t.lambda = lambda;
  // M density is 4 times the I density pointwise under x = -2U, Y = 2w.
  double scale = fn == FunctionalId::vacuum_M ? 4.0 : 1.0;
  for (const auto& c : ladder) t.rungs.push_back(detail::rung(base, cut_paste_vacuum(base, map, c), lambda, scale));
  detail::fit(t);
  return t;
}

inline ConvergenceTable convergence_study(const EMMap& base, const EMMap& map, FunctionalId fn,
                                          const std::vector<CutoffSpec>& ladder, double lambda = 2.0) {
  if (fn != FunctionalId::em_I) throw ClassError("an electromagnetic map needs em_I");
  detail::check_ladder(ladder, lambda);
  ConvergenceTable t;
  t.functional = fn;
  t.lambda = lambda;
  for (const auto& c : ladder) t.rungs.push_back(detail::rung(base, cut_paste_em(base, map, c), lambda, 1.0));
  detail::fit(t);
  return t;
}

// First rung with |Delta I| below c0.
inline const RungResult& auto_select(const ConvergenceTable& t, double c0) {
  double best = INFINITY;
  for (const auto& r : t.rungs) {
    if (std::abs(r.total) < c0) return r;
    best = std::min(best, std::abs(r.total));
  }
  throw ConvergenceError("no rung of the ladder brings |Delta I| below " + format_double(c0), best);
}

struct LadderVerdict {
  bool total_monotone = false;
  bool far_rate = false;
  bool axis_bounded = false;
  bool pass() const { return total_monotone && far_rate && axis_bounded; }
};

// |Delta I| nonincreasing from the second rung on; far slope within tol of 2 lambda - 3;
// |ln eps| |Delta I_axis| stays within twice its value on the first rung.
inline LadderVerdict evaluate_ladder(const ConvergenceTable& t, double tol = 0.3) {
  LadderVerdict v;
  v.total_monotone = true;
  for (std::size_t k = 2; k < t.rungs.size(); ++k)
    if (std::abs(t.rungs[k].total) > std::abs(t.rungs[k - 1].total)) v.total_monotone = false;
  v.far_rate = std::abs(t.far_exponent - (2 * t.lambda - 3)) <= tol;
  double c1 = std::abs(t.rungs[0].axis * std::log(t.rungs[0].spec.eps));
  v.axis_bounded = true;
  for (const auto& r : t.rungs)
    if (std::abs(r.axis * std::log(r.spec.eps)) > 2 * c1 + 1e-300) v.axis_bounded = false;
  return v;
}

inline void write_study_csv(std::ostream& os, const ConvergenceTable& t) {
  os << "delta,eps,stage,delta_I,fitted_exponent\n";
  for (const auto& r : t.rungs) {
    auto row = [&](const char* st, double v, double e) {
      os << format_double(r.spec.delta) << ',' << format_double(r.spec.eps) << ',' << st << ',' << format_double(v)
         << ',' << format_double(e) << '\n';
    };
    row("far", r.far, t.far_exponent);
    row("origin", r.origin, t.origin_exponent);
    row("axis", r.axis, t.axis_exponent);
    row("total", r.total, t.total_exponent);
  }
}

}  // namespace kerrgap
