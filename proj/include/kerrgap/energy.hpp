#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "kerrgap/grid.hpp"
#include "kerrgap/map_fields.hpp"
#include "kerrgap/quadrature.hpp"

namespace kerrgap {

struct EnergyReport {
  std::string functional;
  Region region;
  double value = 0.0;
  std::array<double, 3> terms{};
  double tail_bound = 0.0;
};

inline void write_energy_header(std::ostream& os) { os << "functional,region,value,term1,term2,term3,tail_bound\n"; }

inline void write_energy_row(std::ostream& os, const EnergyReport& r) {
  os << r.functional << ',' << r.region.name() << ',' << format_double(r.value) << ',' << format_double(r.terms[0])
     << ',' << format_double(r.terms[1]) << ',' << format_double(r.terms[2]) << ',' << format_double(r.tail_bound)
     << '\n';
}

namespace detail {

// Truncation estimate for a region reaching the outer edge of the grid:
// density ~ r^{-p} beyond r_max.
inline double tail_estimate(const AxisymGrid& g, const std::vector<double>& density, double p = 4.0) {
  std::size_t i = g.ns() - 1;
  double shell = 0, vol = 0;
  for (std::size_t j = 0; j < g.nt(); ++j) {
    shell += g.weight(i, j) * std::abs(density[g.index(i, j)]);
    vol += g.weight(i, j);
  }
  double R = g.r_max(), mean = shell / vol;
  return 4 * pi * mean * R * R * R / (p - 3);
}

inline EnergyReport assemble(const std::string& name, const Region& region, const AxisymGrid& g,
                             const std::vector<std::vector<double>>& densities, Quadrature q) {
  EnergyReport rep;
  rep.functional = name;
  rep.region = region;
  std::vector<double> total(g.size(), 0.0);
  for (std::size_t t = 0; t < densities.size(); ++t) {
    rep.terms[t] = integrate(g, densities[t], region, q);
    for (std::size_t k = 0; k < g.size(); ++k) total[k] += densities[t][k];
  }
  for (std::size_t t = 0; t < densities.size(); ++t) rep.value += rep.terms[t];
  if (region.kind == Region::Kind::all) rep.tail_bound = tail_estimate(g, total);
  return rep;
}

inline void require_same_grid(const ScalarField& a, const ScalarField& b) { a.same_grid(b); }

}  // namespace detail

// int |dx|^2 + e^{-2g-2x} |dY|^2, the weight evaluated as e^{-2x}/rho^4.
inline EnergyReport reduced_energy_M(const ScalarField& x, const ScalarField& Y, const Region& region,
                                Quadrature q = Quadrature::midpoint) {
  detail::require_same_grid(x, Y);
  const auto& g = *x.grid();
  check_coverage(g, region);
  std::vector<double> d1(g.size()), d2(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      double rho = g.rho(i, j);
      d1[k] = x.grad_norm2(k);
      d2[k] = std::exp(-2 * x[k]) / (rho * rho * rho * rho) * Y.grad_norm2(k);
    }
  return detail::assemble("reduced_energy_M", region, g, {d1, d2}, q);
}

inline EnergyReport reduced_energy_M(const VacuumMap& m, const Region& region,
                                     Quadrature q = Quadrature::midpoint) {
  return reduced_energy_M(m.x, m.Y, region, q);
}

// int (|dX|^2 + |dY|^2) / X^2; diverges for the singular class near the axis.
inline EnergyReport harmonic_energy_E(const ScalarField& X, const ScalarField& Y, const Region& region,
                                Quadrature q = Quadrature::midpoint) {
  detail::require_same_grid(X, Y);
  if (region.touches_axis()) throw DomainError("harmonic energy E needs a region away from the axis");
  const auto& g = *X.grid();
  check_coverage(g, region);
  std::vector<double> d1(g.size()), d2(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    double X2 = X[k] * X[k];
    d1[k] = X.grad_norm2(k) / X2;
    d2[k] = Y.grad_norm2(k) / X2;
  }
  return detail::assemble("harmonic_energy_E", region, g, {d1, d2}, q);
}

namespace detail {

// pointwise densities |DU|^2 and e^{4U} rho^{-4} |Dw|^2
inline std::vector<std::vector<double>> densities_I_vacuum(const ScalarField& U, const ScalarField& w) {
  require_same_grid(U, w);
  const auto& g = *U.grid();
  std::vector<double> d1(g.size()), d2(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      double rho = g.rho(i, j);
      d1[k] = U.grad_norm2(k);
      d2[k] = std::exp(4 * U[k]) / (rho * rho * rho * rho) * w.grad_norm2(k);
    }
  return {d1, d2};
}

}  // namespace detail

// int |DU|^2 + e^{4U} rho^{-4} |Dw|^2
inline EnergyReport functional_I_vacuum(const ScalarField& U, const ScalarField& w, const Region& region,
                                Quadrature q = Quadrature::midpoint) {
  check_coverage(*U.grid(), region);
  return detail::assemble("functional_I_vacuum", region, *U.grid(), detail::densities_I_vacuum(U, w), q);
}

inline EnergyReport functional_I_vacuum(const PotentialMap& m, const Region& region,
                                        Quadrature q = Quadrature::midpoint) {
  return functional_I_vacuum(m.U, m.w, region, q);
}

// omega = Dv + chi Dpsi - psi Dchi, returned as (d/ds, d/dtheta) components.
inline std::pair<std::vector<double>, std::vector<double>> omega_form(const EMMap& m) {
  const auto& g = *m.U.grid();
  const auto &vs = m.v.ds(), &vt = m.v.dtheta(), &cs = m.chi.ds(), &ct = m.chi.dtheta(), &ps = m.psi.ds(),
             &pt = m.psi.dtheta();
  std::vector<double> os(g.size()), ot(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    os[k] = vs[k] + m.chi[k] * ps[k] - m.psi[k] * cs[k];
    ot[k] = vt[k] + m.chi[k] * pt[k] - m.psi[k] * ct[k];
  }
  return {os, ot};
}

namespace detail {

inline std::vector<std::vector<double>> densities_em(const EMMap& m) {
  require_same_grid(m.U, m.v);
  require_same_grid(m.U, m.chi);
  require_same_grid(m.U, m.psi);
  const auto& g = *m.U.grid();
  auto [os, ot] = omega_form(m);
  std::vector<double> d1(g.size()), d2(g.size()), d3(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      double r = g.r(i), rho = g.rho(i, j);
      double e2 = std::exp(2 * m.U[k]) / (rho * rho);
      d1[k] = m.U.grad_norm2(k);
      d2[k] = e2 * e2 * (os[k] * os[k] + ot[k] * ot[k]) / (r * r);
      d3[k] = e2 * (m.chi.grad_norm2(k) + m.psi.grad_norm2(k));
    }
  return {d1, d2, d3};
}

}  // namespace detail

// int |DU|^2 + e^{4U} rho^{-4} |omega|^2 + e^{2U} rho^{-2} (|Dchi|^2 + |Dpsi|^2)
inline EnergyReport em_energy_I(const EMMap& m, const Region& region,
                                Quadrature q = Quadrature::midpoint) {
  check_coverage(*m.U.grid(), region);
  return detail::assemble("em_energy_I", region, *m.U.grid(), detail::densities_em(m), q);
}

// Harmonic energy of the H2_C-valued map with u = U - log(rho).
inline EnergyReport em_harmonic_energy(const EMMap& m, const Region& region,
                                Quadrature q = Quadrature::midpoint) {
  if (region.touches_axis()) throw DomainError("harmonic energy needs a region away from the axis");
  const auto& g = *m.U.grid();
  check_coverage(g, region);
  auto [os, ot] = omega_form(m);
  const auto &Us = m.U.ds(), &Ut = m.U.dtheta();
  std::vector<double> d1(g.size()), d2(g.size()), d3(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      double r = g.r(i), rho = g.rho(i, j);
      double us = Us[k] - 1.0, ut = Ut[k] - g.cos_theta(j) / g.sin_theta(j);
      double e2u = std::exp(2 * m.U[k]) / (rho * rho);
      d1[k] = (us * us + ut * ut) / (r * r);
      d2[k] = e2u * e2u * (os[k] * os[k] + ot[k] * ot[k]) / (r * r);
      d3[k] = e2u * (m.chi.grad_norm2(k) + m.psi.grad_norm2(k));
    }
  return detail::assemble("em_harmonic_energy", region, g, {d1, d2, d3}, q);
}

struct BoundaryIdentity {
  double lhs = 0.0;      // E (vacuum) or I (em)
  double rhs = 0.0;      // M (vacuum) or E (em)
  double surface = 0.0;  // boundary integral
  double defect = 0.0;   // lhs - rhs - surface
};

namespace detail {

// outward normal derivative of log(rho) on a face
inline double dn_log_rho(const BoundaryFace& f, double r, double theta) {
  return f.sign * (f.radial ? 1 / r : std::cos(theta) / (std::sin(theta) * r));
}

// int over the staircase boundary of dlog(rho)/dn * h(log rho, field)
inline double axis_flux(const ScalarField& field, const Region& region, Quadrature q,
                        const std::function<double(double, double)>& h) {
  const auto& g = *field.grid();
  auto faces = boundary_faces(g, region);
  if (q == Quadrature::corrected) {
    LocalField lf(field);
    return surface_integral(g, faces, [&](const BoundaryFace& f, double r, double t) {
      return dn_log_rho(f, r, t) * h(std::log(r * std::sin(t)), lf.on_face(f, std::log(r), t));
    });
  }
  std::vector<double> terms;
  for (const auto& f : faces) {
    double v = 0.5 * (field[f.inside] + field[f.outside]);
    terms.push_back(dn_log_rho(f, f.r, f.theta) * h(std::log(f.r * std::sin(f.theta)), v) * f.area);
  }
  return pairwise_sum(terms);
}

}  // namespace detail

// E - M - surface integral of dg/dn (g + 2x), with X = rho^2 e^x and g = 2 log rho.
inline BoundaryIdentity boundary_identity_vacuum(const ScalarField& X, const ScalarField& Y, const Region& region,
                                                 Quadrature q = Quadrature::corrected) {
  if (region.touches_axis()) throw DomainError("boundary identity needs a region away from the axis");
  const auto& g = *X.grid();
  auto G = axis_potential(X.grid());
  std::vector<double> xv(g.size()), xs(g.size()), xt(g.size());
  const auto &Xs = X.ds(), &Xt = X.dtheta();
  for (std::size_t k = 0; k < g.size(); ++k) {
    xv[k] = std::log(X[k]) - G[k];
    xs[k] = Xs[k] / X[k] - G.ds()[k];
    xt[k] = Xt[k] / X[k] - G.dtheta()[k];
  }
  ScalarField x(X.grid(), xv, xs, xt);
  BoundaryIdentity out;
  out.lhs = harmonic_energy_E(X, Y, region, q).value;
  out.rhs = reduced_energy_M(x, Y, region, q).value;
  out.surface = detail::axis_flux(x, region, q, [](double l, double xv) { return 2 * (2 * l + 2 * xv); });
  out.defect = out.lhs - out.rhs - out.surface;
  return out;
}

inline BoundaryIdentity boundary_identity_vacuum(const VacuumMap& m, const Region& region,
                                                 Quadrature q = Quadrature::corrected) {
  return boundary_identity_vacuum(full_X(m), m.Y, region, q);
}

// I - E - surface integral of dlog(rho)/dn (2U - log rho).
inline BoundaryIdentity boundary_identity_em(const EMMap& m, const Region& region,
                                             Quadrature q = Quadrature::corrected) {
  if (region.touches_axis()) throw DomainError("boundary identity needs a region away from the axis");
  BoundaryIdentity out;
  out.lhs = em_energy_I(m, region, q).value;
  out.rhs = em_harmonic_energy(m, region, q).value;
  out.surface = detail::axis_flux(m.U, region, q, [](double l, double U) { return 2 * U - l; });
  out.defect = out.lhs - out.rhs - out.surface;
  return out;
}

inline double mass_lower_bound(double I_value) {
  if (!(I_value >= 0)) throw DomainError("mass bound needs a nonnegative energy");
  return I_value / (8 * pi);
}

}  // namespace kerrgap
