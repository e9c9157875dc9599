#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kerrgap/bumps.hpp"
#include "kerrgap/grid.hpp"

using namespace kerrgap;

namespace {

double shell_integral_exp(double a, double b) {
  // 4 pi int_a^b r^2 e^{-r} dr
  auto F = [](double r) { return -std::exp(-r) * (r * r + 2 * r + 2); };
  return 4 * pi * (F(b) - F(a));
}

double wedge_volume(double delta, double eps) {
  double A = 2 / delta, B = delta;
  auto F = [&](double rho) {
    return -std::pow(A * A - rho * rho, 1.5) / 3 + std::pow(B * B - rho * rho, 1.5) / 3;
  };
  return 4 * pi * (F(std::sqrt(eps)) - F(eps));
}

double wedge_axis_potential(double delta, double eps) {
  // 16 pi int_eps^sqrt(eps) (sqrt(A^2-rho^2) - sqrt(B^2-rho^2)) / rho drho
  double A = 2 / delta, B = delta;
  auto G = [](double a, double rho) {
    double w = std::sqrt(a * a - rho * rho);
    return w - a * std::log((a + w) / rho);
  };
  auto F = [&](double rho) { return G(A, rho) - G(B, rho); };
  return 16 * pi * (F(std::sqrt(eps)) - F(eps));
}

}  // namespace

TEST(FdWeights, ReproduceKnownStencils) {
  auto w = fd_weights(0.0, {-1.0, 0.0, 1.0}, 1);
  EXPECT_NEAR(w[0], -0.5, 1e-15);
  EXPECT_NEAR(w[1], 0.0, 1e-15);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
  auto w2 = fd_weights(0.0, {0.0, 1.0, 2.0, 3.0}, 2);
  EXPECT_NEAR(w2[0], 2, 1e-13);
  EXPECT_NEAR(w2[1], -5, 1e-13);
  EXPECT_NEAR(w2[2], 4, 1e-13);
  EXPECT_NEAR(w2[3], -1, 1e-13);
}

TEST(BuildGrid, ShellVolume) {
  auto g = build_grid({1.0, std::exp(1.0), 8, 8});
  double sum = 0;
  for (double w : g->weights()) sum += w;
  double exact = 2 * pi * (std::exp(3.0) - 1) / 3 * 2;
  EXPECT_NEAR(sum, exact, 1e-10 * exact);
}

TEST(BuildGrid, WideGridIsMonotoneAndOffAxis) {
  auto g = build_grid({1e-3, 1e3, 256, 128});
  for (std::size_t i = 1; i < g->ns(); ++i) EXPECT_GT(g->s_nodes()[i], g->s_nodes()[i - 1]);
  EXPECT_GT(g->theta(0), 0);
  EXPECT_LT(g->theta(g->nt() - 1), pi);
  for (double w : g->weights()) EXPECT_GT(w, 0);
  EXPECT_NEAR(g->r_min(), 1e-3, 1e-15);
  EXPECT_NEAR(g->r_max(), 1e3, 1e-9);
}

TEST(BuildGrid, RejectsBadSpecs) {
  EXPECT_THROW(build_grid({0.0, 1.0, 8, 8}), ConfigError);
  EXPECT_THROW(build_grid({2.0, 1.0, 8, 8}), ConfigError);
  EXPECT_THROW(build_grid({1.0, 2.0, 7, 8}), ConfigError);
  EXPECT_THROW(build_grid({1.0, 2.0, 8, 4}), ConfigError);
}

TEST(BuildGrid, AxisGradedThetaNodes) {
  GridSpec spec{0.1, 10, 16, 200, 1e-6, 6};
  auto g = build_grid(spec);
  EXPECT_EQ(g->nt(), 200u);
  EXPECT_NEAR(g->theta(0), 0.5e-6, 1e-12);
  EXPECT_NEAR(g->theta(199), pi - 0.5e-6, 1e-12);
  for (std::size_t j = 0; j < g->nt(); ++j) EXPECT_NEAR(g->theta(j) + g->theta(g->nt() - 1 - j), pi, 1e-14);
  double sum = 0;
  for (double w : g->weights()) sum += w;
  double exact = 2 * pi * (1000 - 1e-3) / 3 * 2;
  EXPECT_NEAR(sum, exact, 1e-10 * exact);
}

TEST(Integrate, SecondOrderConvergence) {
  double exact = shell_integral_exp(0.05, 20);
  double prev = 0;
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    auto g = build_grid({0.05, 20, n, n / 2});
    auto f = ScalarField::sample(g, [](double r, double) { return std::exp(-r); });
    errs.push_back(std::abs(integrate(f, Region::everywhere()) - exact));
    (void)prev;
  }
  EXPECT_GT(errs[0] / errs[1], 3.5);
  EXPECT_GT(errs[1] / errs[2], 3.5);
}

TEST(Integrate, BallAlignedWithFaces) {
  auto g = build_grid({0.5, 4.0, 64, 32});
  auto one = ScalarField::constant(g, 1.0);
  double v = integrate(one, Region::ball(4.0));
  double exact = 4.0 / 3 * pi * (64 - 0.125);
  EXPECT_NEAR(v, exact, 1e-10 * exact);
}

TEST(Integrate, BallMaskedCellsConverge) {
  double R = 2.9;
  double exact = 4.0 / 3 * pi * (R * R * R - 0.125);
  for (int n : {64, 256}) {
    auto g = build_grid({0.5, 4.0, n, 16});
    double v = integrate(ScalarField::constant(g, 1.0), Region::ball(R));
    EXPECT_NEAR(v, exact, 3.0 * g->h_s() * exact);
  }
}

TEST(Integrate, WedgeVolumeAndAxisPotential) {
  double delta = 0.5, eps = 0.01;
  double vexact = wedge_volume(delta, eps), pexact = wedge_axis_potential(delta, eps);
  double prev_v = INFINITY, prev_p = INFINITY;
  for (int n : {200, 800}) {
    auto g = build_grid({delta * 0.9, 2 / delta * 1.1, n, n, 1e-4, n / 25.0});
    auto one = ScalarField::constant(g, 1.0);
    auto pot = ScalarField::sample(g, [](double r, double t) { return 4 / std::pow(r * std::sin(t), 2); });
    double ev = std::abs(integrate(one, Region::wedge(delta, eps)) - vexact) / vexact;
    double ep = std::abs(integrate(pot, Region::wedge(delta, eps)) - pexact) / pexact;
    EXPECT_LT(ev, 0.05);
    EXPECT_LT(ep, 0.05);
    EXPECT_LT(ev, prev_v);
    EXPECT_LT(ep, prev_p);
    prev_v = ev;
    prev_p = ep;
  }
}

TEST(Integrate, AxisPotentialOnCylinderDivergesLogarithmically) {
  double delta = 0.5, eps = 0.05;
  std::vector<double> vals;
  for (double cell : {1e-3, 1e-5, 1e-7}) {
    auto g = build_grid({0.4, 5, 64, 400, cell, 10});
    auto pot = ScalarField::sample(g, [](double r, double t) { return 4 / std::pow(r * std::sin(t), 2); });
    vals.push_back(integrate(pot, Region::cylinder(delta, eps)));
  }
  // 8 pi * (z-length ~ 2*(4 - 0.5)) * ln(100) per two decades of axis resolution
  double step = 8 * pi * 7.0 * std::log(100.0);
  EXPECT_NEAR(vals[1] - vals[0], step, 0.1 * step);
  EXPECT_NEAR(vals[2] - vals[1], step, 0.1 * step);
}

TEST(Integrate, CoverageErrors) {
  auto g = build_grid({0.5, 4.0, 16, 8});
  auto one = ScalarField::constant(g, 1.0);
  EXPECT_THROW(integrate(one, Region::ball(5.0)), CoverageError);
  EXPECT_THROW(integrate(one, Region::annulus(3.0, 0.1)), CoverageError);
  EXPECT_NO_THROW(integrate(one, Region::annulus(3.0, 0.6)));
  try {
    integrate(one, Region::omega(10, 0.1));
    FAIL();
  } catch (const CoverageError& e) {
    EXPECT_NE(std::string(e.what()).find("both ends"), std::string::npos);
  }
}

TEST(Integrate, LinearAndMonotone) {
  auto g = build_grid({0.2, 5.0, 32, 16});
  auto f = ScalarField::sample(g, [](double r, double t) { return std::exp(-r) * (1 + std::cos(t) * std::cos(t)); });
  auto h = ScalarField::sample(g, [](double r, double) { return 1 / (1 + r); });
  Region reg = Region::annulus(4, 0.3);
  double a = integrate(f, reg), b = integrate(h, reg);
  EXPECT_NEAR(integrate(f.combine(2.0, h, -3.0), reg), 2 * a - 3 * b, 1e-12 * (std::abs(a) + std::abs(b)));
  auto bigger = f.combine(1.0, ScalarField::constant(g, 0.01), 1.0);
  EXPECT_GE(integrate(bigger, reg), a);
  EXPECT_LE(integrate(f, Region::annulus(3, 0.5)), a + 1e-12);
}

TEST(Regions, PartitionOfTheBall) {
  double delta = 0.3, eps = 0.01;
  auto om = Region::omega_delta(delta, eps), co = Region::complement(delta, eps), ball = Region::ball(2 / delta);
  Rng r(5);
  for (int k = 0; k < 20000; ++k) {
    double rr = std::exp(r.uniform(std::log(1e-3), std::log(10.0))), t = r.uniform(0, pi);
    bool in_ball = ball.contains(rr, t), a = om.contains(rr, t), b = co.contains(rr, t);
    EXPECT_FALSE(a && b);
    EXPECT_EQ(in_ball, a || b);
  }
}

TEST(Regions, MembershipDefinitions) {
  EXPECT_TRUE(Region::annulus(10, 0.2).contains(0.2, 0.0001));
  EXPECT_FALSE(Region::annulus(10, 0.2).contains(10, 1));
  EXPECT_FALSE(Region::omega(10, 0.2).contains(1, 0.1));
  EXPECT_TRUE(Region::omega(10, 0.2).contains(1, 1.0));
  EXPECT_TRUE(Region::cylinder(0.5, 0.1).contains(1, 0.05));
  EXPECT_FALSE(Region::cylinder(0.5, 0.1).contains(0.3, 0.05));
  EXPECT_TRUE(Region::wedge(0.5, 0.01).contains(1, 0.05));
  EXPECT_FALSE(Region::wedge(0.5, 0.01).contains(1, 0.5));
  EXPECT_TRUE(Region::parse("omega:10:0.2").contains(1, 1));
  EXPECT_THROW(Region::parse("omega:10"), ConfigError);
  EXPECT_THROW(Region::parse("circle:1"), ConfigError);
  EXPECT_THROW(Region::parse("omega:0.1:10"), ConfigError);
  EXPECT_EQ(Region::parse("ball:3").name(), "ball:3");
}

TEST(Gradient, LogRadius) {
  auto g = build_grid({0.1, 10, 64, 16});
  auto f = ScalarField::sample(g, [](double r, double) { return std::log(r); });
  auto gr = gradient(f);
  for (std::size_t i = 0; i < g->ns(); ++i)
    for (std::size_t j = 0; j < g->nt(); ++j) EXPECT_NEAR(gr.norm(g->index(i, j)) * g->r(i), 1.0, 1e-12);
}

TEST(Gradient, AxisPotentialSecondOrder) {
  std::vector<double> err;
  for (int n : {32, 64}) {
    auto g = build_grid({0.5, 4, n, n});
    auto f = ScalarField::sample(g, [](double r, double t) { return 2 * std::log(r * std::sin(t)); });
    auto gr = gradient(f);
    double e = 0;
    for (std::size_t i = 1; i + 1 < g->ns(); ++i)
      for (std::size_t j = g->nt() / 4; j < 3 * g->nt() / 4; ++j) {
        auto k = g->index(i, j);
        e = std::max(e, std::abs(gr.norm(k) - 2 / g->rho(i, j)) * g->rho(i, j));
      }
    err.push_back(e);
  }
  EXPECT_LT(err[0], 1e-2);
  EXPECT_GT(err[0] / err[1], 3.5);
}

TEST(Gradient, ConstantIsExactlyZero) {
  auto g = build_grid({0.1, 10, 16, 64, 1e-3, 4});
  auto f = ScalarField(g, std::vector<double>(g->size(), 3.25));
  auto gr = gradient(f);
  for (std::size_t k = 0; k < g->size(); ++k) EXPECT_EQ(gr.norm(k), 0.0);
}

TEST(Laplacian, MatchesKnownHarmonicAndQuadratic) {
  auto g = build_grid({0.5, 4, 64, 64});
  auto z = ScalarField::sample(g, [](double r, double t) { return r * std::cos(t); });
  auto r2 = ScalarField::sample(g, [](double r, double) { return r * r; });
  auto lz = laplacian(z), lr = laplacian(r2);
  for (std::size_t i = 1; i + 1 < g->ns(); ++i)
    for (std::size_t j = 1; j + 1 < g->nt(); ++j) {
      EXPECT_NEAR(lz[g->index(i, j)], 0.0, 2e-3);
      EXPECT_NEAR(lr[g->index(i, j)], 6.0, 2e-3 * 6);
    }
}

TEST(BoundaryFaces, DivergenceTheoremIsExactForRadialFlux) {
  auto g = build_grid({0.3, 6, 48, 40});
  Region reg = Region::omega(5, 0.5);
  auto faces = boundary_faces(*g, reg);
  double flux = 0;
  for (auto& f : faces)
    if (f.radial) flux += f.sign * 2 * f.r * f.area;
  double vol = integrate(ScalarField::constant(g, 1.0), reg);
  EXPECT_NEAR(flux, 6 * vol, 1e-10 * vol);
}

TEST(BoundaryFaces, HarmonicFluxIsSmall) {
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    auto g = build_grid({0.3, 6, n, n});
    auto faces = boundary_faces(*g, Region::omega(5, 0.5));
    double flux = 0, total = 0;
    for (auto& f : faces) {
      // grad z = (cos t, -sin t) in (r, theta) components
      double dn = f.radial ? std::cos(f.theta) : -std::sin(f.theta);
      flux += f.sign * dn * f.area;
      total += std::abs(dn * f.area);
    }
    errs.push_back(std::abs(flux) / total);
  }
  EXPECT_LT(errs[2], 1e-3);
}

TEST(FieldCsv, RoundTripIsBitExact) {
  auto g = build_grid({0.137, 13.1, 12, 60, 1e-4, 3});
  auto f = ScalarField::sample(g, [](double r, double t) { return std::sin(r) * std::cos(3 * t) / 7; });
  std::stringstream ss;
  write_fields_csv(ss, {"f"}, {&f});
  auto t = read_fields_csv(ss);
  ASSERT_EQ(t.grid->size(), g->size());
  EXPECT_EQ(t.grid->s_nodes(), g->s_nodes());
  EXPECT_EQ(t.grid->theta_nodes(), g->theta_nodes());
  EXPECT_EQ(t.grid->weights(), g->weights());
  EXPECT_EQ(t.fields[0].values(), f.values());
  EXPECT_EQ(t.names[0], "f");
}

TEST(FieldCsv, RejectsMalformedInput) {
  std::stringstream a("x,theta,f\n");
  EXPECT_THROW(read_fields_csv(a), DataError);
  std::stringstream b("s,theta,f\n0,1,abc\n");
  EXPECT_THROW(read_fields_csv(b), DataError);
}

TEST(Bumps, ZeroAmplitudeIsZero) {
  auto g = build_grid({0.1, 20, 64, 32});
  auto b = bump_perturbation(g, Region::annulus(10, 0.2), 0.0, 3, BumpKind::alpha);
  EXPECT_EQ(b.max_abs(), 0.0);
}

TEST(Bumps, NormalizedSupportedAndDeterministic) {
  auto g = build_grid({0.1, 20, 64, 32});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto kind : {BumpKind::alpha, BumpKind::y}) {
      Region reg = kind == BumpKind::alpha ? Region::annulus(10, 0.2) : Region::omega(10, 0.2);
      auto b = bump_perturbation(g, reg, 0.37, seed, kind);
      EXPECT_NEAR(b.max_abs(), 0.37, 1e-12);
      for (std::size_t i = 0; i < g->ns(); ++i)
        for (std::size_t j = 0; j < g->nt(); ++j)
          if (!reg.contains(g->r(i), g->theta(j))) {
            EXPECT_EQ(b.at(i, j), 0.0);
          }
      auto again = bump_perturbation(g, reg, 0.37, seed, kind);
      EXPECT_EQ(again.values(), b.values());
    }
  }
}

TEST(Bumps, AnalyticPartialsMatchDifferences) {
  auto g = build_grid({0.1, 20, 256, 128});
  auto b = bump_perturbation(g, Region::omega(10, 0.2), 1.0, 7, BumpKind::y);
  auto fd = b.with_fd_partials();
  double err = 0, scale = 0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    err = std::max(err, std::abs(fd.ds()[k] - b.ds()[k]) + std::abs(fd.dtheta()[k] - b.dtheta()[k]));
    scale = std::max(scale, std::abs(b.ds()[k]) + std::abs(b.dtheta()[k]));
  }
  EXPECT_LT(err, 0.02 * scale);
}

TEST(Bumps, KindRegionPairing) {
  auto g = build_grid({0.1, 20, 32, 16});
  EXPECT_THROW(bump_perturbation(g, Region::omega(10, 0.2), 1, 1, BumpKind::alpha), UsageError);
  EXPECT_THROW(bump_perturbation(g, Region::annulus(10, 0.2), 1, 1, BumpKind::y), UsageError);
  EXPECT_THROW(em_bump_perturbation(g, Region::annulus(10, 0.2), 1, 1), UsageError);
  auto em = em_bump_perturbation(g, Region::omega(10, 0.2), 0.5, 1);
  EXPECT_NEAR(em.dchi.max_abs(), 0.5, 1e-12);
}
