#pragma once

#include <algorithm>
#include <functional>
#include <cmath>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "kerrgap/bumps.hpp"
#include "kerrgap/energy.hpp"
#include "kerrgap/hyperbolic_targets.hpp"
#include "kerrgap/map_fields.hpp"

namespace kerrgap {

enum class FunctionalId { vacuum_M, vacuum_I, em_I };

inline std::string functional_name(FunctionalId id) {
  switch (id) {
    case FunctionalId::vacuum_M: return "M";
    case FunctionalId::vacuum_I: return "I";
    case FunctionalId::em_I: return "em";
  }
  return "?";
}

inline FunctionalId parse_functional(const std::string& s) {
  if (s == "M" || s == "vacuum_M") return FunctionalId::vacuum_M;
  if (s == "I" || s == "vacuum_I") return FunctionalId::vacuum_I;
  if (s == "em" || s == "em_I") return FunctionalId::em_I;
  throw ConfigError("unknown functional '" + s + "' (expected M, I or em)");
}

// Constant c in d^2/dt^2 F(t) >= c int |grad d|^2 for the matched distance.
inline double convexity_constant(FunctionalId id) { return id == FunctionalId::vacuum_I ? 0.5 : 2.0; }

// Sharp constant in int |grad f|^2 >= S3 (int f^6)^{1/3} on R^3.
inline constexpr double sobolev_S3 = 5.477904089531331;  // 3 (pi/2)^{4/3}

namespace detail {

inline double g_s() { return 2.0; }
inline double g_t(double theta) { return 2 * std::cos(theta) / std::sin(theta); }

struct NodeValue {
  double v = 0, s = 0, t = 0;
};

}  // namespace detail

// Per-node geodesic deformation between two maps. Partials of F_t are central
// differences of the closed-form geodesic map along the endpoint partials.
class GeodesicFamily {
 public:
  static GeodesicFamily vacuum(const VacuumMap& base, const VacuumMap& end,
                               FunctionalId id = FunctionalId::vacuum_M) {
    base.x.same_grid(end.x);
    GeodesicFamily f;
    f.id_ = id;
    f.grid_ = base.x.grid();
    f.vac0_ = base;
    f.vac1_ = end;
    f.setup_vacuum();
    return f;
  }

  // (U, w) endpoints; distances are those of (rho^2 e^{-2U}, 2w).
  static GeodesicFamily potential(const PotentialMap& base, const PotentialMap& end) {
    return vacuum(to_reduced(base), to_reduced(end), FunctionalId::vacuum_I);
  }

  static GeodesicFamily electromagnetic(const EMMap& base, const EMMap& end) {
    base.U.same_grid(end.U);
    GeodesicFamily f;
    f.id_ = FunctionalId::em_I;
    f.grid_ = base.U.grid();
    f.em0_ = base;
    f.em1_ = end;
    f.setup_em();
    return f;
  }

  FunctionalId functional() const { return id_; }
  const GridPtr& grid() const { return grid_; }
  const ScalarField& distance() const { return dist_; }
  std::size_t geodesic_nodes() const { return n_general_; }

  VacuumMap vacuum_at(double t) const {
    if (id_ == FunctionalId::em_I) throw UsageError("vacuum_at on an electromagnetic family");
    const auto& g = *grid_;
    std::size_t n = g.size();
    std::vector<double> xv(n), xs(n), xt(n), Yv(n), Ys(n), Yt(n);
    const auto &x0 = vac0_.x, &x1 = vac1_.x, &Y0 = vac0_.Y;
    const auto &x0s = x0.ds(), &x0t = x0.dtheta(), &x1s = x1.ds(), &x1t = x1.dtheta();
    const auto &Y0s = Y0.ds(), &Y0t = Y0.dtheta();
    for (std::size_t i = 0; i < g.ns(); ++i)
      for (std::size_t j = 0; j < g.nt(); ++j) {
        auto k = g.index(i, j);
        if (kind_[k] != Kind::general) {
          xv[k] = x0[k] + t * (x1[k] - x0[k]);
          xs[k] = x0s[k] + t * (x1s[k] - x0s[k]);
          xt[k] = x0t[k] + t * (x1t[k] - x0t[k]);
          Yv[k] = Y0[k];
          Ys[k] = Y0s[k];
          Yt[k] = Y0t[k];
          continue;
        }
        const auto& e = h2_[slot_[k]];
        auto c = h2_geodesic(e.p, e.q, t);
        auto ps = h2_geodesic(e.p_sp, e.q_sp, t), ms = h2_geodesic(e.p_sm, e.q_sm, t);
        auto pt = h2_geodesic(e.p_tp, e.q_tp, t), mt = h2_geodesic(e.p_tm, e.q_tm, t);
        double Xs = (ps.X - ms.X) / (2 * e.eps_s), Xt = (pt.X - mt.X) / (2 * e.eps_t);
        double rho = g.rho(i, j);
        xv[k] = std::log(c.X) - 2 * std::log(rho);
        xs[k] = Xs / c.X - detail::g_s();
        xt[k] = Xt / c.X - detail::g_t(g.theta(j));
        Yv[k] = c.Y;
        Ys[k] = (ps.Y - ms.Y) / (2 * e.eps_s);
        Yt[k] = (pt.Y - mt.Y) / (2 * e.eps_t);
      }
    return {ScalarField(grid_, xv, xs, xt), ScalarField(grid_, Yv, Ys, Yt)};
  }

  PotentialMap potential_at(double t) const { return to_potentials(vacuum_at(t)); }

  EMMap em_at(double t) const {
    if (id_ != FunctionalId::em_I) throw UsageError("em_at on a vacuum family");
    const auto& g = *grid_;
    std::size_t n = g.size();
    std::vector<std::vector<double>> val(4, std::vector<double>(n)), ds(4, std::vector<double>(n)),
        dt(4, std::vector<double>(n));
    const ScalarField* c0[4] = {&em0_.U, &em0_.v, &em0_.chi, &em0_.psi};
    const ScalarField* c1[4] = {&em1_.U, &em1_.v, &em1_.chi, &em1_.psi};
    for (std::size_t i = 0; i < g.ns(); ++i)
      for (std::size_t j = 0; j < g.nt(); ++j) {
        auto k = g.index(i, j);
        if (kind_[k] != Kind::general) {
          for (int c = 0; c < 4; ++c) {
            double w = c == 0 ? t : 0.0;
            val[c][k] = (*c0[c])[k] + w * ((*c1[c])[k] - (*c0[c])[k]);
            ds[c][k] = c0[c]->ds()[k] + w * (c1[c]->ds()[k] - c0[c]->ds()[k]);
            dt[c][k] = c0[c]->dtheta()[k] + w * (c1[c]->dtheta()[k] - c0[c]->dtheta()[k]);
          }
          continue;
        }
        const auto& e = ch2_[slot_[k]];
        auto cc = e.seg[0].at(t).coords();
        auto ps = e.seg[1].at(t).coords(), ms = e.seg[2].at(t).coords();
        auto pt = e.seg[3].at(t).coords(), mt = e.seg[4].at(t).coords();
        double lr = std::log(g.rho(i, j));
        for (int c = 0; c < 4; ++c) {
          val[c][k] = cc[c];
          ds[c][k] = (ps[c] - ms[c]) / (2 * e.eps_s);
          dt[c][k] = (pt[c] - mt[c]) / (2 * e.eps_t);
        }
        val[0][k] += lr;  // U = u + log(rho)
        ds[0][k] += 1.0;
        dt[0][k] += std::cos(g.theta(j)) / std::sin(g.theta(j));
      }
    return {ScalarField(grid_, val[0], ds[0], dt[0]), ScalarField(grid_, val[1], ds[1], dt[1]),
            ScalarField(grid_, val[2], ds[2], dt[2]), ScalarField(grid_, val[3], ds[3], dt[3])};
  }

  double energy(double t, const Region& region, Quadrature q = Quadrature::midpoint) const {
    switch (id_) {
      case FunctionalId::vacuum_M: return reduced_energy_M(vacuum_at(t), region, q).value;
      case FunctionalId::vacuum_I: return functional_I_vacuum(potential_at(t), region, q).value;
      case FunctionalId::em_I: return em_energy_I(em_at(t), region, q).value;
    }
    return 0.0;
  }

 private:
  enum class Kind : unsigned char { same, linear, general };

  struct H2Node {
    H2Point p, q, p_sp, q_sp, p_sm, q_sm, p_tp, q_tp, p_tm, q_tm;
    double eps_s = 0, eps_t = 0;
  };
  struct CH2Node {
    std::vector<CH2Segment> seg;  // centre, +s, -s, +theta, -theta
    double eps_s = 0, eps_t = 0;
  };

  static double step_for(double n1, double n2) { return 1e-6 / std::max({1.0, n1, n2}); }

  void setup_vacuum() {
    const auto& g = *grid_;
    std::size_t n = g.size();
    kind_.assign(n, Kind::same);
    slot_.assign(n, 0);
    std::vector<double> dv(n), dsv(n), dtv(n);
    const auto &x0 = vac0_.x, &x1 = vac1_.x, &Y0 = vac0_.Y, &Y1 = vac1_.Y;
    const auto &x0s = x0.ds(), &x0t = x0.dtheta(), &x1s = x1.ds(), &x1t = x1.dtheta();
    const auto &Y0s = Y0.ds(), &Y0t = Y0.dtheta(), &Y1s = Y1.ds(), &Y1t = Y1.dtheta();
    for (std::size_t i = 0; i < g.ns(); ++i)
      for (std::size_t j = 0; j < g.nt(); ++j) {
        auto k = g.index(i, j);
        bool y_same = Y0[k] == Y1[k] && Y0s[k] == Y1s[k] && Y0t[k] == Y1t[k];
        if (y_same) {
          double a = x1[k] - x0[k], as = x1s[k] - x0s[k], at = x1t[k] - x0t[k];
          kind_[k] = (a == 0 && as == 0 && at == 0) ? Kind::same : Kind::linear;
          // d = |alpha|, one-sided where alpha vanishes
          double sg = a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
          dv[k] = std::abs(a);
          dsv[k] = sg * as;
          dtv[k] = sg * at;
          continue;
        }
        kind_[k] = Kind::general;
        slot_[k] = h2_.size();
        double rho2 = g.rho(i, j) * g.rho(i, j), gt = detail::g_t(g.theta(j));
        H2Point p{rho2 * std::exp(x0[k]), Y0[k]}, q{rho2 * std::exp(x1[k]), Y1[k]};
        Vec<2> dps{p.X * (detail::g_s() + x0s[k]), Y0s[k]}, dpt{p.X * (gt + x0t[k]), Y0t[k]};
        Vec<2> dqs{q.X * (detail::g_s() + x1s[k]), Y1s[k]}, dqt{q.X * (gt + x1t[k]), Y1t[k]};
        auto hn = [](const H2Point& a, const Vec<2>& d) { return std::hypot(d[0], d[1]) / a.X; };
        H2Node e;
        e.p = p;
        e.q = q;
        e.eps_s = step_for(hn(p, dps), hn(q, dqs));
        e.eps_t = step_for(hn(p, dpt), hn(q, dqt));
        auto mv = [](const H2Point& a, const Vec<2>& d, double h) { return H2Point{a.X + h * d[0], a.Y + h * d[1]}; };
        e.p_sp = mv(p, dps, e.eps_s);
        e.q_sp = mv(q, dqs, e.eps_s);
        e.p_sm = mv(p, dps, -e.eps_s);
        e.q_sm = mv(q, dqs, -e.eps_s);
        e.p_tp = mv(p, dpt, e.eps_t);
        e.q_tp = mv(q, dqt, e.eps_t);
        e.p_tm = mv(p, dpt, -e.eps_t);
        e.q_tm = mv(q, dqt, -e.eps_t);
        dv[k] = h2_distance(p, q);
        dsv[k] = (h2_distance(e.p_sp, e.q_sp) - h2_distance(e.p_sm, e.q_sm)) / (2 * e.eps_s);
        dtv[k] = (h2_distance(e.p_tp, e.q_tp) - h2_distance(e.p_tm, e.q_tm)) / (2 * e.eps_t);
        h2_.push_back(e);
      }
    n_general_ = h2_.size();
    dist_ = ScalarField(grid_, dv, dsv, dtv);
  }

  void setup_em() {
    const auto& g = *grid_;
    std::size_t n = g.size();
    kind_.assign(n, Kind::same);
    slot_.assign(n, 0);
    std::vector<double> dv(n), dsv(n), dtv(n);
    const ScalarField* c0[4] = {&em0_.U, &em0_.v, &em0_.chi, &em0_.psi};
    const ScalarField* c1[4] = {&em1_.U, &em1_.v, &em1_.chi, &em1_.psi};
    CH2Metric metric;
    for (std::size_t i = 0; i < g.ns(); ++i)
      for (std::size_t j = 0; j < g.nt(); ++j) {
        auto k = g.index(i, j);
        bool rest_same = true;
        for (int c = 1; c < 4; ++c)
          rest_same = rest_same && (*c0[c])[k] == (*c1[c])[k] && c0[c]->ds()[k] == c1[c]->ds()[k] &&
                      c0[c]->dtheta()[k] == c1[c]->dtheta()[k];
        if (rest_same) {
          double a = em1_.U[k] - em0_.U[k], as = em1_.U.ds()[k] - em0_.U.ds()[k],
                 at = em1_.U.dtheta()[k] - em0_.U.dtheta()[k];
          kind_[k] = (a == 0 && as == 0 && at == 0) ? Kind::same : Kind::linear;
          double sg = a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
          dv[k] = std::abs(a);
          dsv[k] = sg * as;
          dtv[k] = sg * at;
          continue;
        }
        kind_[k] = Kind::general;
        slot_[k] = ch2_.size();
        double lr = std::log(g.rho(i, j)), cot = std::cos(g.theta(j)) / std::sin(g.theta(j));
        Vec<4> p, q, dps, dpt, dqs, dqt;
        for (int c = 0; c < 4; ++c) {
          p[c] = (*c0[c])[k];
          q[c] = (*c1[c])[k];
          dps[c] = c0[c]->ds()[k];
          dpt[c] = c0[c]->dtheta()[k];
          dqs[c] = c1[c]->ds()[k];
          dqt[c] = c1[c]->dtheta()[k];
        }
        p[0] -= lr;
        q[0] -= lr;
        dps[0] -= 1.0;
        dqs[0] -= 1.0;
        dpt[0] -= cot;
        dqt[0] -= cot;
        CH2Node e;
        e.eps_s = step_for(metric_norm(metric, p, dps), metric_norm(metric, q, dqs));
        e.eps_t = step_for(metric_norm(metric, p, dpt), metric_norm(metric, q, dqt));
        auto mv = [](const Vec<4>& a, const Vec<4>& d, double h) {
          Vec<4> r;
          for (int c = 0; c < 4; ++c) r[c] = a[c] + h * d[c];
          return CH2Point::from(r);
        };
        e.seg.reserve(5);
        e.seg.emplace_back(CH2Point::from(p), CH2Point::from(q));
        e.seg.emplace_back(mv(p, dps, e.eps_s), mv(q, dqs, e.eps_s));
        e.seg.emplace_back(mv(p, dps, -e.eps_s), mv(q, dqs, -e.eps_s));
        e.seg.emplace_back(mv(p, dpt, e.eps_t), mv(q, dqt, e.eps_t));
        e.seg.emplace_back(mv(p, dpt, -e.eps_t), mv(q, dqt, -e.eps_t));
        dv[k] = e.seg[0].length();
        dsv[k] = (e.seg[1].length() - e.seg[2].length()) / (2 * e.eps_s);
        dtv[k] = (e.seg[3].length() - e.seg[4].length()) / (2 * e.eps_t);
        ch2_.push_back(std::move(e));
      }
    n_general_ = ch2_.size();
    dist_ = ScalarField(grid_, dv, dsv, dtv);
  }

  FunctionalId id_ = FunctionalId::vacuum_M;
  GridPtr grid_;
  VacuumMap vac0_, vac1_;
  EMMap em0_, em1_;
  std::vector<Kind> kind_;
  std::vector<std::size_t> slot_;
  std::vector<H2Node> h2_;
  std::vector<CH2Node> ch2_;
  std::size_t n_general_ = 0;
  ScalarField dist_;
};

// ---------------------------------------------------------------- t-derivatives

struct FirstVariation {
  double derivative = 0.0;
  double E0 = 0.0, E1 = 0.0;
  double scale = 0.0;  // E(1) - E(0) + |E(0)|
  double tolerance = 1e-4;
  bool pass = false;
};

namespace detail {

// one-sided 5-point first derivative at 0, O(h^4)
inline double one_sided_d1(const std::function<double(double)>& f, double h) {
  return (-25 * f(0) + 48 * f(h) - 36 * f(2 * h) + 16 * f(3 * h) - 3 * f(4 * h)) / (12 * h);
}

// centred 5-point second derivative, O(h^4)
inline double centred_d2(const std::function<double(double)>& f, double t, double h) {
  return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) / (12 * h * h);
}

// memoised E(t) on exact t keys
class EnergyCache {
 public:
  EnergyCache(const GeodesicFamily& f, const Region& r) : f_(f), r_(r) {}
  double operator()(double t) {
    for (auto& [k, v] : cache_)
      if (k == t) return v;
    double v = f_.energy(t, r_);
    cache_.emplace_back(t, v);
    return v;
  }

 private:
  const GeodesicFamily& f_;
  Region r_;
  std::vector<std::pair<double, double>> cache_;
};

}  // namespace detail

inline FirstVariation first_variation(const GeodesicFamily& fam, const Region& region, double step = 1e-3,
                                      double tol = 1e-4) {
  detail::EnergyCache E(fam, region);
  std::function<double(double)> f = [&](double t) { return E(t); };
  double d1 = detail::one_sided_d1(f, step), d2 = detail::one_sided_d1(f, 2 * step);
  FirstVariation out;
  out.derivative = (16 * d1 - d2) / 15;
  out.E0 = E(0.0);
  out.E1 = E(1.0);
  out.scale = out.E1 - out.E0 + std::abs(out.E0);
  out.tolerance = tol;
  out.pass = std::abs(out.derivative) <= tol * out.scale;
  return out;
}

struct VariationReport {
  FunctionalId functional = FunctionalId::vacuum_M;
  std::vector<double> t, E, second_diff;
  double rhs_bound = 0.0;  // c int |grad d|^2
  double dirichlet = 0.0;  // int |grad d|^2
  double step = 1e-2;
  double slack = 0.05;
  std::vector<bool> pass;
  bool all_pass() const { return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; }); }
  std::size_t violations() const { return std::count(pass.begin(), pass.end(), false); }
};

inline double dirichlet_of_distance(const GeodesicFamily& fam, const Region& region) {
  const auto& d = fam.distance();
  const auto& g = *d.grid();
  std::vector<double> dens(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) dens[k] = d.grad_norm2(k);
  return integrate(g, dens, region);
}

inline std::vector<double> default_t_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }

inline VariationReport second_variation_profile(const GeodesicFamily& fam, const Region& region,
                                                const std::vector<double>& t_grid = default_t_grid(),
                                                double step = 1e-2, double slack = 0.05) {
  detail::EnergyCache E(fam, region);
  std::function<double(double)> f = [&](double t) { return E(t); };
  VariationReport rep;
  rep.functional = fam.functional();
  rep.step = step;
  rep.slack = slack;
  rep.dirichlet = dirichlet_of_distance(fam, region);
  rep.rhs_bound = convexity_constant(fam.functional()) * rep.dirichlet;
  for (double t : t_grid) {
    double a = detail::centred_d2(f, t, step), b = detail::centred_d2(f, t, 2 * step);
    double d2 = (16 * a - b) / 15;
    rep.t.push_back(t);
    double roundoff = 1e-12 * std::abs(E(t)) / (step * step);
    rep.E.push_back(E(t));
    rep.second_diff.push_back(d2);
    rep.pass.push_back(d2 >= rep.rhs_bound - slack * std::abs(rep.rhs_bound) - roundoff);
  }
  return rep;
}

inline void write_variation_csv(std::ostream& os, const VariationReport& r) {
  os << "t,E,second_diff,rhs_bound,pass\n";
  for (std::size_t k = 0; k < r.t.size(); ++k)
    os << format_double(r.t[k]) << ',' << format_double(r.E[k]) << ',' << format_double(r.second_diff[k]) << ','
       << format_double(r.rhs_bound) << ',' << (r.pass[k] ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------- Euler-Lagrange residuals

struct ElResidual {
  ScalarField res_x, res_Y;
  double norm_x = 0.0, norm_Y = 0.0;  // weighted L2 norms of the residuals
  double rhs_x = 0.0, rhs_Y = 0.0;    // weighted L2 norms of the right-hand sides
  double rel_x() const { return norm_x / rhs_x; }
  double rel_Y() const { return norm_Y / rhs_Y; }
};

// Delta x = -e^{-2x} rho^{-4} |dY|^2 and Delta Y = 2 <dY, dg + dx>, Laplacians
// by finite differences on the analytic first partials.
inline ElResidual el_residual(const VacuumMap& m, const Region& region) {
  const auto& g = *m.x.grid();
  check_coverage(g, region);
  auto lx = laplacian(m.x), lY = laplacian(m.Y);
  std::size_t n = g.size();
  std::vector<double> rx(n), rY(n), fx(n), fY(n);
  const auto &xs = m.x.ds(), &xt = m.x.dtheta(), &Ys = m.Y.ds(), &Yt = m.Y.dtheta();
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      double r = g.r(i), rho = g.rho(i, j);
      double sx = -std::exp(-2 * m.x[k]) / (rho * rho * rho * rho) * m.Y.grad_norm2(k);
      double sY = 2 * (Ys[k] * (detail::g_s() + xs[k]) + Yt[k] * (detail::g_t(g.theta(j)) + xt[k])) / (r * r);
      rx[k] = lx[k] - sx;
      rY[k] = lY[k] - sY;
      fx[k] = sx * sx;
      fY[k] = sY * sY;
    }
  ElResidual out;
  std::vector<double> qx(n), qY(n);
  for (std::size_t k = 0; k < n; ++k) {
    qx[k] = rx[k] * rx[k];
    qY[k] = rY[k] * rY[k];
  }
  out.norm_x = std::sqrt(integrate(g, qx, region));
  out.norm_Y = std::sqrt(integrate(g, qY, region));
  out.rhs_x = std::sqrt(integrate(g, fx, region));
  out.rhs_Y = std::sqrt(integrate(g, fY, region));
  out.res_x = ScalarField(m.x.grid(), rx);
  out.res_Y = ScalarField(m.x.grid(), rY);
  return out;
}

inline ElResidual el_residual_kerr(const GridPtr& grid, const KerrParams& params, const Region& region) {
  return el_residual(kerr_vacuum_map(grid, params), region);
}

// ---------------------------------------------------------------- gap inequality

struct GapReport {
  double gap = 0.0;        // F(map) - F(background)
  double dirichlet = 0.0;  // int |grad d|^2
  double l6_term = 0.0;    // (int d^6)^{1/3}
  double ratio = 0.0;      // gap / l6_term
  double sobolev_ratio = 0.0;
  double convexity_constant = 0.0;
  double sobolev_constant = sobolev_S3;
  bool convexity_step = false;  // gap >= (c/2) dirichlet
  bool sobolev_step = false;    // dirichlet >= S3 l6_term
  bool pass() const { return convexity_step && sobolev_step; }
};

inline GapReport gap_check(const GeodesicFamily& fam, const Region& region, double tol = 1e-9) {
  GapReport r;
  double E0 = fam.energy(0.0, region), E1 = fam.energy(1.0, region);
  r.gap = E1 - E0;
  r.dirichlet = dirichlet_of_distance(fam, region);
  const auto& d = fam.distance();
  const auto& g = *d.grid();
  std::vector<double> d6(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) d6[k] = std::pow(d[k], 6);
  r.l6_term = std::cbrt(integrate(g, d6, region));
  r.ratio = r.l6_term > 0 ? r.gap / r.l6_term : 0.0;
  r.sobolev_ratio = r.l6_term > 0 ? r.dirichlet / r.l6_term : 0.0;
  r.convexity_constant = convexity_constant(fam.functional());
  double scale = tol * (std::abs(E0) + std::abs(r.gap));
  r.convexity_step = r.gap >= 0.5 * r.convexity_constant * r.dirichlet - scale;
  r.sobolev_step = r.dirichlet >= sobolev_S3 * r.l6_term * (1 - tol);
  return r;
}

// Dirichlet / L6 ratio of the bubble (1 + r^2)^{-1/2}, evaluated on a grid.
struct SobolevCheck {
  double dirichlet = 0.0, l6 = 0.0, ratio = 0.0, closed_form = sobolev_S3, rel_error = 0.0;
  bool trusted() const { return rel_error <= 5e-3; }
};

inline SobolevCheck sobolev_bubble_check(int n_r = 400, double r_min = 1e-4, double r_max = 1e4) {
  auto g = build_grid({r_min, r_max, n_r, 16});
  auto u = ScalarField::sample_with_partials(g, [](double r, double) {
    double q = 1 + r * r;
    return ScalarField::ValueAndPartials{1 / std::sqrt(q), -r / (q * std::sqrt(q)), 0.0};
  });
  std::vector<double> grad(g->size()), u6(g->size());
  for (std::size_t k = 0; k < g->size(); ++k) {
    grad[k] = u.grad_norm2(k);
    u6[k] = std::pow(u[k], 6);
  }
  auto all = Region::everywhere();
  SobolevCheck c;
  // |grad u|^2 ~ r^{-4} beyond r_max; the rest is negligible
  c.dirichlet = integrate(*g, grad, all) + 4 * pi / g->r_max();
  c.l6 = integrate(*g, u6, all);
  c.ratio = c.dirichlet / std::cbrt(c.l6);
  c.rel_error = std::abs(c.ratio - c.closed_form) / c.closed_form;
  return c;
}

// ---------------------------------------------------------------- random admissible families

struct VariationSetup {
  GridSpec grid{};
  double R = 10.0, eps = 0.2;
  KerrParams kerr{};
  KerrNewmanParams kerr_newman{};
  Region energy_region() const { return Region::annulus(R, eps); }
};

// Family from the matched extremal background to a bump perturbation of it.
inline GeodesicFamily random_family(FunctionalId id, const GridPtr& g, const VariationSetup& s, double amplitude,
                                    std::uint64_t seed) {
  auto ann = Region::annulus(s.R, s.eps), om = Region::omega(s.R, s.eps);
  switch (id) {
    case FunctionalId::vacuum_M: {
      auto bg = kerr_vacuum_map(g, s.kerr);
      VacuumMap end{bg.x + bump_perturbation(g, ann, amplitude, seed, BumpKind::alpha),
                    bg.Y + bump_perturbation(g, om, amplitude, seed, BumpKind::y)};
      return GeodesicFamily::vacuum(bg, end);
    }
    case FunctionalId::vacuum_I: {
      auto bg = kerr_potential_map(g, s.kerr);
      PotentialMap end{bg.U + bump_perturbation(g, ann, amplitude, seed, BumpKind::alpha),
                       bg.w + bump_perturbation(g, om, amplitude, seed, BumpKind::y)};
      return GeodesicFamily::potential(bg, end);
    }
    case FunctionalId::em_I: {
      auto bg = kerr_newman_map(g, s.kerr_newman);
      auto b = em_bump_perturbation(g, om, amplitude, seed);
      EMMap end{bg.U + b.dU, bg.v + b.dv, bg.chi + b.dchi, bg.psi + b.dpsi};
      return GeodesicFamily::electromagnetic(bg, end);
    }
  }
  throw UsageError("unknown functional");
}

}  // namespace kerrgap
