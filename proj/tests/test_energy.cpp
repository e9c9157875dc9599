#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kerrgap/bumps.hpp"
#include "kerrgap/energy.hpp"

using namespace kerrgap;

namespace {

// int 4/rho^2 over {eps <= r < R, rho > eps}
double axis_potential_energy(double R, double eps) {
  return 16 * pi * (R * std::acosh(R / eps) - std::sqrt(R * R - eps * eps));
}

GridPtr small_grid() { return build_grid({0.1, 20, 64, 32}); }

}  // namespace

TEST(Energy, ConstantsGiveZero) {
  auto g = small_grid();
  auto c1 = ScalarField::constant(g, 0.7), c2 = ScalarField::constant(g, -1.3);
  auto reg = Region::omega(10, 0.2);
  EXPECT_EQ(reduced_energy_M(c1, c2, reg).value, 0.0);
  EXPECT_EQ(functional_I_vacuum(c1, c2, reg).value, 0.0);
  EXPECT_EQ(harmonic_energy_E(c1, c2, reg).value, 0.0);
  EXPECT_EQ(em_energy_I({c1, c2, c1, c2}, reg).value, 0.0);
}

TEST(Energy, AxisPotentialClosedForm) {
  double R = 2.0, eps = 0.1, exact = axis_potential_energy(R, eps);
  double prev = INFINITY;
  for (int n : {100, 400}) {
    auto g = build_grid({0.05, 4, n, 2 * n, 1e-3, n / 20.0});
    auto X = ScalarField::sample_with_partials(g, [](double r, double t) {
      double s = std::sin(t);
      return ScalarField::ValueAndPartials{r * r * s * s, 2 * r * s * s, 2 * r * r * s * std::cos(t)};
    });
    auto Y = ScalarField::zeros(g);
    auto rep = harmonic_energy_E(X, Y, Region::omega(R, eps));
    double err = std::abs(rep.value - exact) / exact;
    EXPECT_LT(err, 0.03);
    EXPECT_LT(err, prev);
    prev = err;
    EXPECT_EQ(rep.terms[1], 0.0);
  }
}

TEST(Energy, PotentialFormIsQuarterOfReducedForm) {
  auto g = small_grid();
  auto reg = Region::annulus(10, 0.2);
  auto vm = kerr_vacuum_map(g, {1.0});
  auto bump = bump_perturbation(g, reg, 0.3, 5, BumpKind::alpha);
  VacuumMap m{vm.x + bump, vm.Y + bump_perturbation(g, Region::omega(10, 0.2), 0.3, 6, BumpKind::y)};
  double M = reduced_energy_M(m, reg).value;
  double I = functional_I_vacuum(to_potentials(m), reg).value;
  EXPECT_NEAR(I, M / 4, 1e-12 * M);
  auto pm = kerr_potential_map(g, {1.0});
  EXPECT_NEAR(functional_I_vacuum(pm, reg).value, reduced_energy_M(vm, reg).value / 4, 1e-12 * M);
}

TEST(Energy, ElectromagneticReducesToVacuum) {
  auto g = small_grid();
  auto reg = Region::annulus(10, 0.2);
  auto pm = kerr_potential_map(g, {1.0});
  auto z = ScalarField::zeros(g);
  auto I_vac = functional_I_vacuum(pm, reg);
  auto I_em = em_energy_I({pm.U, pm.w, z, z}, reg);
  EXPECT_NEAR(I_em.value, I_vac.value, 1e-13 * I_vac.value);
  EXPECT_EQ(I_em.terms[2], 0.0);
}

TEST(Energy, UnchargedKerrNewmanMatchesKerr) {
  auto g = small_grid();
  auto reg = Region::annulus(10, 0.2);
  double a = 1.0;
  auto kn = kerr_newman_map(g, {a, a, 0.0});
  auto pm = kerr_potential_map(g, {a * a});
  double em = em_energy_I(kn, reg).value, vac = functional_I_vacuum(pm, reg).value;
  EXPECT_NEAR(em, vac, 1e-10 * vac);
}

TEST(Energy, MonotoneInRegion) {
  auto g = small_grid();
  auto kn = kerr_newman_map(g, KerrNewmanParams{});
  double small = em_energy_I(kn, Region::omega(5, 0.5)).value;
  double mid = em_energy_I(kn, Region::omega(10, 0.2)).value;
  double big = em_energy_I(kn, Region::annulus(10, 0.2)).value;
  EXPECT_GT(small, 0.0);
  EXPECT_LT(small, mid);
  EXPECT_LT(mid, big);
}

TEST(Energy, HarmonicEnergyRejectsAxisRegions) {
  auto g = small_grid();
  auto vm = kerr_vacuum_map(g, {1.0});
  auto X = full_X(vm);
  EXPECT_THROW(harmonic_energy_E(X, vm.Y, Region::annulus(10, 0.2)), DomainError);
  EXPECT_THROW(em_harmonic_energy(kerr_newman_map(g, {}), Region::ball(5)), DomainError);
  EXPECT_THROW(reduced_energy_M(vm, Region::annulus(30, 0.2)), CoverageError);
}

TEST(Energy, TailBoundMatchesExtendedGrid) {
  auto pm_small = kerr_potential_map(build_grid({0.1, 20, 96, 32}), {1.0});
  auto pm_big = kerr_potential_map(build_grid({0.1, 2000, 240, 32}), {1.0});
  auto small = functional_I_vacuum(pm_small, Region::everywhere());
  auto big = functional_I_vacuum(pm_big, Region::everywhere());
  double missing = big.value - small.value;
  EXPECT_GT(small.tail_bound, 0.0);
  EXPECT_NEAR(small.tail_bound, missing, 0.2 * missing);
  EXPECT_EQ(functional_I_vacuum(pm_small, Region::ball(10)).tail_bound, 0.0);
}

TEST(Quadrature, CorrectedRuleIsHigherOrder) {
  // int over the shell 1 <= r < 3 of r^2 cos^2(theta) = 4 pi/3 * (3^5 - 1)/5
  double exact = 4 * pi / 3 * (243.0 - 1) / 5;
  std::vector<double> em, ec, hs;
  for (int n : {32, 64, 128}) {
    auto g = build_grid({1.0, 3.0, n, n});
    auto f = ScalarField::sample(g, [](double r, double t) { return r * r * std::cos(t) * std::cos(t); });
    em.push_back(std::abs(integrate(*g, f.values(), Region::everywhere(), Quadrature::midpoint) - exact));
    ec.push_back(std::abs(integrate(*g, f.values(), Region::everywhere(), Quadrature::corrected) - exact));
    hs.push_back(g->h_s());
  }
  EXPECT_NEAR(fitted_exponent(hs, em), 2.0, 0.2);
  EXPECT_GT(fitted_exponent(hs, ec), 3.0);
  EXPECT_LT(ec[2], 0.1 * em[2]);
}

TEST(Quadrature, LocalFieldReproducesQuadratics) {
  auto g = build_grid({0.5, 2.0, 20, 20});
  auto f = ScalarField::sample_with_partials(g, [](double r, double t) {
    double s = std::log(r);
    return ScalarField::ValueAndPartials{1 + 2 * s - s * s + 3 * s * t + t * t, (2 - 2 * s + 3 * t) / r, 3 * s + 2 * t};
  });
  LocalField lf(f);
  auto k = g->index(10, 10);
  double s = g->s_nodes()[10] + 0.01, t = g->theta(10) - 0.02;
  EXPECT_NEAR(lf.from_node(k, s, t), 1 + 2 * s - s * s + 3 * s * t + t * t, 1e-10);
}

TEST(Energy, MassLowerBound) {
  EXPECT_DOUBLE_EQ(mass_lower_bound(8 * pi), 1.0);
  EXPECT_EQ(mass_lower_bound(0.0), 0.0);
  EXPECT_THROW(mass_lower_bound(-1.0), DomainError);
}

TEST(Energy, ReportCsvRow) {
  auto g = small_grid();
  auto rep = functional_I_vacuum(kerr_potential_map(g, {1.0}), Region::omega(10, 0.2));
  std::ostringstream os;
  write_energy_header(os);
  write_energy_row(os, rep);
  auto s = os.str();
  EXPECT_EQ(s.rfind("functional,region,value", 0), 0u);
  EXPECT_NE(s.find("functional_I_vacuum,"), std::string::npos);
}

TEST(BoundaryIdentity, VacuumDefectConverges) {
  auto reg = Region::omega(5, 0.5);
  std::vector<double> defects, hs;
  for (int n : {64, 128, 256}) {
    auto g = build_grid({0.25, 10, n, n / 2});
    auto vm = kerr_vacuum_map(g, {1.0});
    auto bi = boundary_identity_vacuum(vm, reg);
    defects.push_back(std::abs(bi.defect) / std::abs(bi.lhs));
    hs.push_back(g->h_theta());
  }
  EXPECT_LT(defects[2], defects[1]);
  EXPECT_LT(defects[1], defects[0]);
  EXPECT_LT(defects[2], 1e-4);
  EXPECT_GT(fitted_exponent(hs, defects), 1.8);
}

TEST(BoundaryIdentity, ElectromagneticDefectConverges) {
  auto reg = Region::omega(5, 0.5);
  std::vector<double> defects, hs;
  for (int n : {64, 128, 256}) {
    auto g = build_grid({0.25, 10, n, n / 2});
    auto bi = boundary_identity_em(kerr_newman_map(g, {}), reg);
    defects.push_back(std::abs(bi.defect) / std::abs(bi.lhs));
    hs.push_back(g->h_theta());
  }
  EXPECT_LT(defects[2], defects[1]);
  EXPECT_LT(defects[1], defects[0]);
  EXPECT_LT(defects[2], 1e-4);
  EXPECT_GT(fitted_exponent(hs, defects), 1.8);
}

TEST(BoundaryIdentity, MidpointRuleIsSecondOrder) {
  auto reg = Region::omega(5, 0.5);
  std::vector<double> defects, hs;
  for (int n : {64, 128, 256}) {
    auto g = build_grid({0.25, 10, n, n / 2});
    auto bi = boundary_identity_vacuum(kerr_vacuum_map(g, {1.0}), reg, Quadrature::midpoint);
    defects.push_back(std::abs(bi.defect) / std::abs(bi.lhs));
    hs.push_back(g->h_theta());
  }
  EXPECT_NEAR(fitted_exponent(hs, defects), 2.0, 0.3);
}

TEST(BoundaryIdentity, PerturbedMapsClose) {
  auto reg = Region::omega(5, 0.5);
  for (std::uint64_t seed : {1, 2, 3}) {
    std::vector<double> defects, hs;
    for (int n : {64, 128, 256}) {
      auto g = build_grid({0.25, 10, n, n / 2});
      auto vm = kerr_vacuum_map(g, {1.0});
      VacuumMap m{vm.x + bump_perturbation(g, Region::annulus(5, 0.5), 0.5, seed, BumpKind::alpha),
                  vm.Y + bump_perturbation(g, reg, 0.5, seed, BumpKind::y)};
      auto bi = boundary_identity_vacuum(m, reg);
      defects.push_back(std::abs(bi.defect) / std::abs(bi.lhs));
      hs.push_back(g->h_theta());
    }
    EXPECT_LT(defects[2], 1e-4);
    EXPECT_GT(fitted_exponent(hs, defects), 1.8);
  }
}

TEST(BoundaryIdentity, WrongSignIsDetected) {
  // the surface term with (2U + log rho) does not close the identity
  auto g = build_grid({0.25, 10, 128, 64});
  auto kn = kerr_newman_map(g, {});
  auto reg = Region::omega(5, 0.5);
  auto bi = boundary_identity_em(kn, reg);
  double alt = 0;
  for (const auto& f : boundary_faces(*g, reg)) {
    double l = std::log(f.r * std::sin(f.theta));
    double dn = f.sign * (f.radial ? 1 / f.r : std::cos(f.theta) / (std::sin(f.theta) * f.r));
    alt += dn * (kn.U[f.inside] + kn.U[f.outside] + l) * f.area;
  }
  EXPECT_GT(std::abs(bi.lhs - bi.rhs - alt), 100 * std::abs(bi.defect));
}
