#pragma once

#include <cmath>

#include "kerrgap/grid.hpp"
#include "kerrgap/kerr_maps.hpp"

namespace kerrgap {

// H2-valued map in reduced form: X = rho^2 e^x.
struct VacuumMap {
  ScalarField x, Y;
};

// (U, w) with U = -x/2, w = Y/2.
struct PotentialMap {
  ScalarField U, w;
};

// H2_C-valued map with U = u + log(rho) in place of u.
struct EMMap {
  ScalarField U, v, chi, psi;
};

inline VacuumMap kerr_vacuum_map(const GridPtr& g, const KerrParams& p) {
  validate(p);
  VacuumMap m;
  m.x = ScalarField::sample_with_partials(g, [&](double r, double t) {
    auto k = extreme_kerr(r, t, p);
    return ScalarField::ValueAndPartials{k.x0, k.dx0.dr, k.dx0.dtheta};
  });
  m.Y = ScalarField::sample_with_partials(g, [&](double r, double t) {
    auto k = extreme_kerr(r, t, p);
    return ScalarField::ValueAndPartials{k.point.Y, k.dY.dr, k.dY.dtheta};
  });
  return m;
}

inline PotentialMap kerr_potential_map(const GridPtr& g, const KerrParams& p) {
  validate(p);
  PotentialMap m;
  m.U = ScalarField::sample_with_partials(g, [&](double r, double t) {
    auto k = kerr_potentials(r, t, p);
    return ScalarField::ValueAndPartials{k.U0, k.dU0.dr, k.dU0.dtheta};
  });
  m.w = ScalarField::sample_with_partials(g, [&](double r, double t) {
    auto k = kerr_potentials(r, t, p);
    return ScalarField::ValueAndPartials{k.w0, k.dw0.dr, k.dw0.dtheta};
  });
  return m;
}

inline EMMap kerr_newman_map(const GridPtr& g, const KerrNewmanParams& p) {
  validate(p);
  EMMap m;
  auto comp = [&](auto pick) {
    return ScalarField::sample_with_partials(g, [&](double r, double t) { return pick(extreme_kerr_newman(r, t, p)); });
  };
  m.U = comp([](const KerrNewmanSample& k) { return ScalarField::ValueAndPartials{k.U0, k.dU0.dr, k.dU0.dtheta}; });
  m.v = comp([](const KerrNewmanSample& k) { return ScalarField::ValueAndPartials{k.point.v, k.dv.dr, k.dv.dtheta}; });
  m.chi = comp(
      [](const KerrNewmanSample& k) { return ScalarField::ValueAndPartials{k.point.chi, k.dchi.dr, k.dchi.dtheta}; });
  m.psi = comp(
      [](const KerrNewmanSample& k) { return ScalarField::ValueAndPartials{k.point.psi, k.dpsi.dr, k.dpsi.dtheta}; });
  return m;
}

// g = 2 log(rho) with exact partials.
inline ScalarField axis_potential(const GridPtr& g) {
  return ScalarField::sample_with_partials(g, [](double r, double t) {
    return ScalarField::ValueAndPartials{2 * std::log(r * std::sin(t)), 2 / r, 2 * std::cos(t) / std::sin(t)};
  });
}

// X = rho^2 e^x with partials X (dg + dx).
inline ScalarField full_X(const VacuumMap& m) {
  const auto& g = *m.x.grid();
  std::vector<double> v(g.size()), ds(g.size()), dt(g.size());
  const auto &xs = m.x.ds(), &xt = m.x.dtheta();
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      double rho = g.rho(i, j);
      v[k] = rho * rho * std::exp(m.x[k]);
      ds[k] = v[k] * (2 + xs[k]);
      dt[k] = v[k] * (2 * g.cos_theta(j) / g.sin_theta(j) + xt[k]);
    }
  return ScalarField(m.x.grid(), std::move(v), std::move(ds), std::move(dt));
}

inline PotentialMap to_potentials(const VacuumMap& m) { return {m.x.scaled(-0.5), m.Y.scaled(0.5)}; }
inline VacuumMap to_reduced(const PotentialMap& m) { return {m.U.scaled(-2.0), m.w.scaled(2.0)}; }

}  // namespace kerrgap
