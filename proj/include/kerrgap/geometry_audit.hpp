#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>

#include "kerrgap/grid.hpp"
#include "kerrgap/hyperbolic_targets.hpp"

namespace kerrgap {

struct AuditOptions {
  std::uint64_t seed = 7;
  int distance_pairs = 1000;
  int curvature_planes = 200;
  int kato_samples = 1000;
  double distance_tol = 1e-8;
  double curvature_tol = 1e-6;  // sampled K <= tol
  double slice_tol = 1e-4;      // |K_slice + 4| <= tol
};

struct AuditReport {
  double max_distance_error = 0.0;
  double max_curvature = -INFINITY;
  double min_curvature = INFINITY;
  double slice_error = 0.0;
  int kato_violations = 0;
  double worst_kato_margin = INFINITY;  // min of |nabla V| - |d|V||
  AuditOptions opt;
  bool distance_ok() const { return max_distance_error <= opt.distance_tol; }
  bool curvature_ok() const { return max_curvature <= opt.curvature_tol; }
  bool slice_ok() const { return slice_error <= opt.slice_tol; }
  bool kato_ok() const { return kato_violations == 0; }
  bool pass() const { return distance_ok() && curvature_ok() && slice_ok() && kato_ok(); }
};

inline AuditReport geometry_audit(const AuditOptions& opt = {}) {
  AuditReport rep;
  rep.opt = opt;
  Rng rng(opt.seed);

  H2Metric h2;
  for (int k = 0; k < opt.distance_pairs; ++k) {
    H2Point p{std::exp(rng.uniform(-1.5, 1.5)), rng.uniform(-2, 2)};
    H2Point q{std::exp(rng.uniform(-1.5, 1.5)), rng.uniform(-2, 2)};
    auto sh = shoot(h2, p.coords(), q.coords());
    double ode = metric_norm(h2, p.coords(), sh.velocity);
    rep.max_distance_error = std::max(rep.max_distance_error, std::abs(ode - h2_distance(p, q)));
  }

  MetricSampler<4> g = [](const Vec<4>& p) { return CH2Metric{}.metric(p); };
  for (int k = 0; k < opt.curvature_planes; ++k) {
    Vec<4> p{}, a{}, b{};
    for (int i = 0; i < 4; ++i) {
      p[i] = rng.uniform(-1, 1);
      a[i] = rng.uniform(-1, 1);
      b[i] = rng.uniform(-1, 1);
    }
    double K = sectional_curvature<4>(g, p, a, b);
    rep.max_curvature = std::max(rep.max_curvature, K);
    rep.min_curvature = std::min(rep.min_curvature, K);
  }
  for (int k = 0; k < 8; ++k) {
    Vec<4> p{rng.uniform(-1, 1), rng.uniform(-1, 1), 0, 0};
    double K = sectional_curvature<4>(g, p, {1, 0, 0, 0}, {0, 1, 0, 0});
    rep.slice_error = std::max(rep.slice_error, std::abs(K + 4));
  }

  CH2Metric m;
  for (int k = 0; k < opt.kato_samples; ++k) {
    Vec<4> c0{}, c1{}, v0{}, v1{}, w{};
    for (int i = 0; i < 4; ++i) {
      c0[i] = rng.uniform(-0.5, 0.5);
      c1[i] = rng.uniform(-1, 1);
      v0[i] = rng.uniform(-1, 1);
      v1[i] = rng.uniform(-1, 1);
      w[i] = rng.uniform(0.5, 3);
    }
    auto curve = [&](double s) {
      Vec<4> p;
      for (int i = 0; i < 4; ++i) p[i] = c0[i] + c1[i] * std::sin(s);
      return p;
    };
    auto curve_dot = [&](double s) {
      Vec<4> p;
      for (int i = 0; i < 4; ++i) p[i] = c1[i] * std::cos(s);
      return p;
    };
    auto field = [&](double s) {
      Vec<4> p;
      for (int i = 0; i < 4; ++i) p[i] = v0[i] + v1[i] * std::cos(w[i] * s);
      return p;
    };
    auto field_dot = [&](double s) {
      Vec<4> p;
      for (int i = 0; i < 4; ++i) p[i] = -v1[i] * w[i] * std::sin(w[i] * s);
      return p;
    };
    auto ks = kato_check<CH2Metric>(m, curve, curve_dot, field, field_dot, rng.uniform(-1, 1));
    double margin = ks.norm_of_derivative - ks.derivative_of_norm;
    rep.worst_kato_margin = std::min(rep.worst_kato_margin, margin);
    // finite-difference noise floor on d|V|/ds
    if (margin < -1e-8) ++rep.kato_violations;
  }
  return rep;
}

inline void write_audit_csv(std::ostream& os, const AuditReport& r) {
  os << "check,measured,threshold,pass\n";
  os << "h2_distance_vs_ode," << format_double(r.max_distance_error) << ',' << format_double(r.opt.distance_tol) << ','
     << r.distance_ok() << '\n';
  os << "max_sectional_curvature," << format_double(r.max_curvature) << ',' << format_double(r.opt.curvature_tol)
     << ',' << r.curvature_ok() << '\n';
  os << "slice_curvature_error," << format_double(r.slice_error) << ',' << format_double(r.opt.slice_tol) << ','
     << r.slice_ok() << '\n';
  os << "kato_violations," << r.kato_violations << ",0," << r.kato_ok() << '\n';
}

}  // namespace kerrgap
