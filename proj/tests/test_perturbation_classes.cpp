#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "kerrgap/perturbation_classes.hpp"

using namespace kerrgap;

namespace {

GridPtr wide_grid() {
  static GridPtr g = build_grid({1e-3, 1e3, 192, 96});
  return g;
}

ClassSpec spec(ClassId id, double lambda) {
  ClassSpec s;
  s.id = id;
  s.lambda = lambda;
  return s;
}

void expect_all_pass(const ValidationReport& rep) {
  for (const auto& r : rep.rows) EXPECT_TRUE(r.pass) << r.condition << " measured " << r.measured;
}

}  // namespace

TEST(ClassSpec, Limits) {
  EXPECT_THROW(spec(ClassId::vacuum_asymptotic, 1.5).validate(), ConfigError);
  auto s = spec(ClassId::vacuum_asymptotic, 2);
  s.norm_cap = INFINITY;
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_EQ(parse_class("em_weighted"), ClassId::em_weighted);
  EXPECT_THROW(parse_class("bogus"), ConfigError);
}

TEST(Validate, GeneratedVacuumMemberRoundTrips) {
  auto g = wide_grid();
  KerrParams kp;
  auto b = kerr_potential_map(g, kp);
  auto m = class_member_vacuum(g, kp, 2.0);
  auto rep = validate(b, m, spec(ClassId::vacuum_asymptotic, 2.0));
  expect_all_pass(rep);
  EXPECT_NEAR(rep.row("Dw_rate_infinity").measured, -2.0, 0.1);
  EXPECT_NEAR(rep.row("Dw_rate_origin").measured, -4.0, 0.1);
  EXPECT_GE(rep.row("Dw_rate_axis").measured, 1.9);
  EXPECT_EQ(rep.sampled_nodes, g->size());
}

TEST(Validate, GeneratedEMMemberRoundTrips) {
  auto g = wide_grid();
  KerrNewmanParams kn;
  auto b = kerr_newman_map(g, kn);
  for (double lambda : {1.8, 2.0, 2.6}) {
    auto m = class_member_em(g, kn, lambda);
    auto rep = validate(b, m, spec(ClassId::em_asymptotic, lambda));
    expect_all_pass(rep);
    EXPECT_NEAR(rep.row("omega_rate_infinity").measured, -lambda, 0.1);
    EXPECT_NEAR(rep.row("Dchi_rate_infinity").measured, -lambda, 0.1);
    EXPECT_NEAR(rep.row("Dchi_rate_origin").measured, lambda - 4, 0.1);
    EXPECT_NEAR(rep.row("omega_rate_origin").measured, lambda - 6, 0.1);
  }
}

TEST(Validate, WeightedSpacesNeedFasterOriginDecay) {
  // base-weighted norms of the asymptotic class converge at the origin only for lambda > 5/2
  auto g = wide_grid();
  KerrParams kp;
  KerrNewmanParams kn;
  auto b = kerr_potential_map(g, kp);
  auto be = kerr_newman_map(g, kn);
  expect_all_pass(validate(to_reduced(b), to_reduced(class_member_vacuum(g, kp, 3.0)), spec(ClassId::vacuum_weighted, 3.0)));
  expect_all_pass(validate(be, class_member_em(g, kn, 3.0), spec(ClassId::em_weighted, 3.0)));
  auto rep = validate(to_reduced(b), to_reduced(class_member_vacuum(g, kp, 2.0)), spec(ClassId::vacuum_weighted, 2.0));
  EXPECT_FALSE(rep.row("y_H1_X0_edge_fraction").pass);
  EXPECT_TRUE(rep.row("alpha_H1").pass);
  auto rep2 = validate(be, class_member_em(g, kn, 2.0), spec(ClassId::em_weighted, 2.0));
  EXPECT_FALSE(rep2.row("omega_L2_edge_fraction").pass);
  EXPECT_TRUE(rep2.row("dchi_H1_edge_fraction").pass);
}

TEST(Validate, ZeroPerturbation) {
  auto g = wide_grid();
  auto b = kerr_potential_map(g, {});
  auto be = kerr_newman_map(g, {});
  expect_all_pass(validate(to_reduced(b), to_reduced(b), spec(ClassId::vacuum_weighted, 2.0)));
  expect_all_pass(validate(be, be, spec(ClassId::em_weighted, 2.0)));
  // The extreme background has a cylindrical end (U0 ~ log r), not the
  // asymptotically flat second end of the rate class; only that row fails.
  auto rep = validate(b, b, spec(ClassId::vacuum_asymptotic, 2.0));
  for (const auto& r : rep.rows) EXPECT_EQ(r.pass, r.condition != "U_minus_2logr_origin") << r.condition;
}

TEST(Validate, AxisValueViolationIsFlagged) {
  auto g = wide_grid();
  KerrNewmanParams kn;
  auto b = kerr_newman_map(g, kn);
  auto m = class_member_em(g, kn, 2.0);
  m.chi = m.chi + ScalarField::sample_with_partials(g, [](double r, double) {
            double f = 1 / (1 + r * r);
            return ScalarField::ValueAndPartials{f, -2 * r * f * f, 0.0};
          });
  for (auto id : {ClassId::em_weighted, ClassId::em_asymptotic}) {
    auto rep = validate(b, m, spec(id, 2.0));
    EXPECT_FALSE(rep.row("chi_axis").pass);
    EXPECT_TRUE(rep.row("psi_axis").pass);
  }
}

TEST(Validate, SupBoundsAreSampled) {
  auto g = wide_grid();
  KerrParams kp;
  auto b = to_reduced(kerr_potential_map(g, kp));
  auto m = b;
  m.x = b.x + ScalarField::constant(g, -0.3);
  auto s = spec(ClassId::vacuum_weighted, 2.0);
  EXPECT_NEAR(validate(b, m, s).row("alpha_minus_sup").measured, 0.3, 1e-12);
  s.alpha_minus_cap = 0.2;
  EXPECT_FALSE(validate(b, m, s).row("alpha_minus_sup").pass);
}

TEST(Validate, MonotoneInCaps) {
  auto g = wide_grid();
  KerrNewmanParams kn;
  auto b = kerr_newman_map(g, kn);
  auto m = class_member_em(g, kn, 2.0, 3.0);
  auto tight = spec(ClassId::em_weighted, 2.0);
  tight.dU_plus_cap = 0.01;
  tight.weighted_cap = 0.1;
  tight.norm_cap = 5;
  tight.edge_fraction_cap = 0.01;
  auto loose = tight;
  loose.dU_plus_cap *= 100;
  loose.weighted_cap *= 100;
  loose.norm_cap *= 1e6;
  loose.edge_fraction_cap = 0.9;
  loose.axis_tol *= 10;
  auto a = validate(b, m, tight), c = validate(b, m, loose);
  ASSERT_EQ(a.rows.size(), c.rows.size());
  int flipped = 0;
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    if (a.rows[k].pass) {
      EXPECT_TRUE(c.rows[k].pass) << a.rows[k].condition;
    }
    flipped += !a.rows[k].pass && c.rows[k].pass;
  }
  EXPECT_GT(flipped, 0);
}

TEST(Validate, Errors) {
  auto shortg = build_grid({0.1, 2, 64, 32});
  auto b = kerr_potential_map(shortg, {});
  EXPECT_THROW(validate(b, b, spec(ClassId::vacuum_asymptotic, 2.0)), DataError);
  auto g = wide_grid();
  auto w = kerr_potential_map(g, {});
  EXPECT_THROW(validate(w, w, spec(ClassId::em_weighted, 2.0)), ClassError);
  auto e = kerr_newman_map(g, {});
  EXPECT_THROW(validate(e, e, spec(ClassId::vacuum_weighted, 2.0)), ClassError);
}

TEST(Validate, CsvLayout) {
  auto g = wide_grid();
  auto b = kerr_potential_map(g, {});
  std::ostringstream os;
  write_validation_csv(os, validate(to_reduced(b), to_reduced(b), spec(ClassId::vacuum_weighted, 2.0)));
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "condition,measured,threshold,pass");
  EXPECT_NE(os.str().find("sampled_nodes," + std::to_string(g->size())), std::string::npos);
}

TEST(DerivedRates, LambdaTwo) {
  auto rows = derived_rates(spec(ClassId::em_asymptotic, 2.0));
  auto find = [&](const std::string& q, RateRegime r) {
    for (const auto& x : rows)
      if (x.quantity == q && x.regime == r) return x.rate;
    ADD_FAILURE() << q;
    return Rate{};
  };
  EXPECT_EQ(find("Dv", RateRegime::infinity).rho_power, 1);
  EXPECT_EQ(find("Dv", RateRegime::infinity).r_power, -1);
  EXPECT_EQ(find("Dv", RateRegime::origin).rho_power, 1);
  EXPECT_EQ(find("Dv", RateRegime::origin).r_power, -3);
  EXPECT_EQ(find("Dv", RateRegime::axis).rho_power, 1);
  EXPECT_EQ(find("Dv", RateRegime::axis).r_power, 0);
}

TEST(DerivedRates, RandomLambdas) {
  Rng rng(11);
  for (int n = 0; n < 10; ++n) {
    double L = rng.uniform(1.5 + 1e-9, 3.0);
    auto rows = derived_rates(spec(ClassId::em_asymptotic, L));
    ASSERT_EQ(rows.size(), 9u);
    for (const auto& x : rows) {
      double rp = 0, rr = 0;
      if (x.quantity == "chi") {
        rp = 2;
        rr = x.regime == RateRegime::infinity ? -L : (x.regime == RateRegime::origin ? L - 4 : 0);
      } else if (x.quantity == "psi") {
        rr = x.regime == RateRegime::infinity ? 2 - L : (x.regime == RateRegime::origin ? L - 2 : 0);
      } else {
        rp = 1;
        rr = x.regime == RateRegime::infinity ? 1 - L : (x.regime == RateRegime::origin ? L - 5 : 0);
      }
      EXPECT_NEAR(x.rate.rho_power, rp, 1e-12) << x.quantity << regime_name(x.regime);
      EXPECT_NEAR(x.rate.r_power, rr, 1e-12) << x.quantity << regime_name(x.regime);
    }
  }
}
