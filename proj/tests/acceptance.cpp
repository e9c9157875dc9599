// Runs every acceptance criterion and prints one line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "kerrgap/bumps.hpp"
#include "kerrgap/cli.hpp"
#include "kerrgap/cutpaste.hpp"
#include "kerrgap/geometry_audit.hpp"
#include "kerrgap/kerr_maps.hpp"
#include "kerrgap/variation.hpp"

using namespace kerrgap;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Outcome el_residuals() {
  std::vector<double> h, rx, rY;
  for (int n : {64, 128, 256}) {
    auto g = build_grid({0.1, 20, n, n / 2});
    auto r = el_residual_kerr(g, {1.0}, Region::omega(10, 0.2));
    h.push_back(g->h_s());
    rx.push_back(r.rel_x());
    rY.push_back(r.rel_Y());
  }
  double ox = fitted_exponent(h, rx), oY = fitted_exponent(h, rY);
  bool ok = ox >= 1.8 && oY >= 1.8 && rx[2] <= 1e-3 && rY[2] <= 1e-3 && rx[2] < rx[1] && rx[1] < rx[0] &&
            rY[2] < rY[1] && rY[1] < rY[0];
  return {ok, "order x " + num(ox) + " Y " + num(oY) + ", finest " + num(rx[2]) + " / " + num(rY[2])};
}

Outcome boundary_identity() {
  auto reg = Region::omega(5, 0.5);
  double worst_order = INFINITY, worst_finest = 0;
  for (int m = 0; m <= 5; ++m) {
    std::vector<double> d, h;
    for (int n : {64, 128, 256}) {
      auto g = build_grid({0.25, 10, n, n / 2});
      auto vm = kerr_vacuum_map(g, {1.0});
      if (m > 0) {
        auto seed = static_cast<std::uint64_t>(100 + m);
        vm = {vm.x + bump_perturbation(g, Region::annulus(5, 0.5), 0.5, seed, BumpKind::alpha),
              vm.Y + bump_perturbation(g, reg, 0.5, seed, BumpKind::y)};
      }
      auto bi = boundary_identity_vacuum(vm, reg);
      d.push_back(std::abs(bi.defect) / std::abs(bi.lhs));
      h.push_back(g->h_theta());
    }
    worst_order = std::min(worst_order, fitted_exponent(h, d));
    worst_finest = std::max(worst_finest, d[2]);
  }
  return {worst_order >= 1.8 && worst_finest <= 1e-4,
          "min order " + num(worst_order) + ", max finest relative defect " + num(worst_finest)};
}

Outcome first_variation_vanishes() {
  VariationSetup s;
  auto g = build_grid(s.grid);
  const double amps[] = {0.01, 0.1, 0.5, 1.0};
  double worst = 0;
  int fails = 0;
  for (auto id : {FunctionalId::vacuum_M, FunctionalId::vacuum_I, FunctionalId::em_I})
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto fv = first_variation(random_family(id, g, s, amps[seed % 4], seed), s.energy_region());
      worst = std::max(worst, std::abs(fv.derivative) / fv.scale);
      fails += !fv.pass;
    }
  return {fails == 0, "30 families, worst |dE/dt| / (|E(0)| + gap) " + num(worst) + " (bound 1e-4)"};
}

Outcome convexity() {
  VariationSetup s;
  auto g = build_grid(s.grid);
  std::size_t samples = 0, violations = 0;
  for (auto id : {FunctionalId::vacuum_M, FunctionalId::vacuum_I, FunctionalId::em_I})
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      auto rep = second_variation_profile(random_family(id, g, s, 0.05 + 0.95 * (seed % 5) / 4, seed),
                                          s.energy_region());
      samples += rep.t.size();
      violations += rep.violations();
    }
  return {violations == 0, "150 families, " + std::to_string(samples) + " interior samples, " +
                               std::to_string(violations) + " violations"};
}

Outcome gap_inequalities() {
  auto sob = sobolev_bubble_check();
  if (!sob.trusted()) return {false, "Sobolev constant not reproduced: error " + num(sob.rel_error)};
  VariationSetup s;
  auto g = build_grid(s.grid);
  const double amps[] = {0.01, 0.1, 0.5, 1.0};
  int fails = 0;
  double min_ratio = INFINITY;
  for (auto id : {FunctionalId::vacuum_M, FunctionalId::vacuum_I, FunctionalId::em_I})
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto r = gap_check(random_family(id, g, s, amps[seed % 4], seed), s.energy_region());
      fails += !r.pass();
      min_ratio = std::min(min_ratio, r.sobolev_ratio);
    }
  return {fails == 0, "60 perturbations, bubble error " + num(sob.rel_error) + ", min Dirichlet/L6 " +
                          num(min_ratio) + " vs S " + num(sobolev_S3) + ", " + std::to_string(fails) + " failures"};
}

Outcome cut_and_paste() {
  auto ladder = default_ladder(4);
  auto g = build_grid(ladder_grid_spec(ladder));
  KerrParams kp;
  auto t = convergence_study(kerr_potential_map(g, kp), class_member_vacuum(g, kp, 2.0), FunctionalId::vacuum_I,
                             ladder, 2.0);
  auto v = evaluate_ladder(t);
  return {v.pass(), std::string("total monotone ") + (v.total_monotone ? "yes" : "no") + ", far exponent " +
                        num(t.far_exponent) + " (target 1), axis bound " + (v.axis_bounded ? "held" : "broken")};
}

Outcome axis_and_reduction() {
  bool ok = true;
  double worst = 0;
  for (double a : {0.5, 1.0, 2.0})
    for (double q : {0.0, 0.7, -1.3}) {
      auto p = KerrNewmanParams::from_aq(a, q);
      auto up = kerr_newman_axis_limit(p, Branch::upper), lo = kerr_newman_axis_limit(p, Branch::lower);
      ok = ok && up.v == 2 * p.m * p.a && lo.v == -2 * p.m * p.a && up.chi == 0 && lo.chi == 0 && up.psi == q &&
           lo.psi == -q;
    }
  for (double a : {0.5, 1.0, 2.0}) {
    KerrNewmanParams p{a, a, 0.0};
    KerrParams kp{a * a};
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        double r = std::exp(-2.0 + 4.0 * i / 19), th = 0.02 + (pi - 0.04) * j / 19;
        auto kn = extreme_kerr_newman(r, th, p);
        auto k = extreme_kerr(r, th, kp);
        double rho = r * std::sin(th);
        worst = std::max(worst, std::abs(kn.point.v + 0.5 * k.point.Y) / (1 + std::abs(k.point.Y)));
        worst = std::max(worst, std::abs(rho * rho * std::exp(-2 * kn.U0) - k.point.X) / k.point.X);
      }
  }
  return {ok && worst <= 1e-10,
          std::string("axis values ") + (ok ? "exact" : "wrong") + ", worst reduction error " + num(worst)};
}

Outcome geometry() {
  auto r = geometry_audit();
  return {r.pass(), "distance error " + num(r.max_distance_error) + ", max K " + num(r.max_curvature) +
                        ", slice error " + num(r.slice_error) + ", Kato violations " +
                        std::to_string(r.kato_violations)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  auto root = fs::temp_directory_path() / ("kerrgap_acceptance_" + std::to_string(::getpid()));
  std::string csv[2];
  std::ostringstream sink;
  for (int k = 0; k < 2; ++k) {
    auto dir = (root / std::to_string(k)).string();
    std::vector<const char*> argv = {"kerrgap", "gap-check", "--seeds", "20", "--amplitude", "0.01,0.1,0.5,1",
                                     "--out", dir.c_str()};
    int rc = cli::run(static_cast<int>(argv.size()), argv.data(), sink, sink);
    if (rc != 0) return {false, "gap-check exited " + std::to_string(rc)};
    csv[k] = slurp(fs::path(dir) / "gap-check.csv");
  }
  fs::remove_all(root);
  return {!csv[0].empty() && csv[0] == csv[1], std::to_string(csv[0].size()) + " bytes, identical " +
                                                   (csv[0] == csv[1] ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"euler-lagrange residuals", el_residuals},
      {"boundary identity", boundary_identity},
      {"first variation vanishes", first_variation_vanishes},
      {"convexity lower bounds", convexity},
      {"gap inequalities", gap_inequalities},
      {"cut-and-paste convergence", cut_and_paste},
      {"axis limits and q=0 reduction", axis_and_reduction},
      {"geometry audit", geometry},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("AC%zu %s  %-30s %s [%.1fs]\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first, o.detail.c_str(),
                sec);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
