#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kerrgap/core.hpp"

namespace kerrgap {

// Finite-difference weights for the k-th derivative at x0 from nodes xs
// (Fornberg's recursion).
inline std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int k) {
  int n = static_cast<int>(xs.size()) - 1;
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(k + 1, 0.0));
  double c1 = 1.0, c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    int mn = std::min(i, k);
    double c2 = 1.0, c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int m = mn; m >= 1; --m) c[i][m] = c1 * (m * c[i - 1][m - 1] - c5 * c[i - 1][m]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int m = mn; m >= 1; --m) c[j][m] = (c4 * c[j][m] - m * c[j][m - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][k];
  return w;
}

struct Stencil {
  int first = 0;  // index of the first node
  std::vector<double> w;
};

struct GridSpec {
  double r_min = 0.1;
  double r_max = 20.0;
  int n_r = 128;
  int n_theta = 64;
  // When positive, theta cells are log-graded toward the axis starting from a
  // first cell of this size, with cells_per_efold cells per e-fold.
  double axis_cell = 0.0;
  double cells_per_efold = 8.0;
};

// Tensor grid in (s = log r, theta). Nodes are cell centres; faces sit halfway
// between nodes, and the outer faces mirror the first/last spacing in s and sit
// at 0 and pi in theta. Everything is a function of the node arrays alone.
class AxisymGrid {
 public:
  AxisymGrid(std::vector<double> s_nodes, std::vector<double> theta_nodes)
      : s_(std::move(s_nodes)), th_(std::move(theta_nodes)) {
    if (s_.size() < 3 || th_.size() < 3) throw ConfigError("grid needs at least 3 nodes per direction");
    for (std::size_t i = 1; i < s_.size(); ++i)
      if (!(s_[i] > s_[i - 1])) throw ConfigError("s nodes must increase strictly");
    for (std::size_t j = 1; j < th_.size(); ++j)
      if (!(th_[j] > th_[j - 1])) throw ConfigError("theta nodes must increase strictly");
    if (!(th_.front() > 0) || !(th_.back() < pi)) throw ConfigError("theta nodes must avoid the axis");
    for (double s : s_)
      if (!std::isfinite(s)) throw ConfigError("non-finite s node");

    std::size_t ns = s_.size(), nt = th_.size();
    sf_.resize(ns + 1);
    sf_[0] = s_[0] - 0.5 * (s_[1] - s_[0]);
    for (std::size_t i = 1; i < ns; ++i) sf_[i] = 0.5 * (s_[i - 1] + s_[i]);
    sf_[ns] = s_[ns - 1] + 0.5 * (s_[ns - 1] - s_[ns - 2]);
    tf_.resize(nt + 1);
    tf_[0] = 0.0;
    for (std::size_t j = 1; j < nt; ++j) tf_[j] = 0.5 * (th_[j - 1] + th_[j]);
    tf_[nt] = pi;

    r_.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) r_[i] = std::exp(s_[i]);
    sin_.resize(nt);
    cos_.resize(nt);
    for (std::size_t j = 0; j < nt; ++j) {
      sin_[j] = std::sin(th_[j]);
      cos_[j] = std::cos(th_[j]);
    }
    // 2 pi/3 (r+^3 - r-^3) (cos t- - cos t+), both differences cancellation-free
    std::vector<double> radial(ns), polar(nt);
    for (std::size_t i = 0; i < ns; ++i)
      radial[i] = 2.0 * pi / 3.0 * std::exp(3 * sf_[i]) * std::expm1(3 * (sf_[i + 1] - sf_[i]));
    for (std::size_t j = 0; j < nt; ++j)
      polar[j] = 2.0 * std::sin(0.5 * (tf_[j] + tf_[j + 1])) * std::sin(0.5 * (tf_[j + 1] - tf_[j]));
    w_.resize(ns * nt);
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = 0; j < nt; ++j) w_[i * nt + j] = radial[i] * polar[j];

    d1s_ = stencils(s_, 1);
    d2s_ = stencils(s_, 2);
    d1t_ = stencils(th_, 1);
    d2t_ = stencils(th_, 2);
  }

  std::size_t ns() const { return s_.size(); }
  std::size_t nt() const { return th_.size(); }
  std::size_t size() const { return s_.size() * th_.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * th_.size() + j; }

  const std::vector<double>& s_nodes() const { return s_; }
  const std::vector<double>& theta_nodes() const { return th_; }
  const std::vector<double>& s_faces() const { return sf_; }
  const std::vector<double>& theta_faces() const { return tf_; }
  const std::vector<double>& weights() const { return w_; }

  double r(std::size_t i) const { return r_[i]; }
  double theta(std::size_t j) const { return th_[j]; }
  double sin_theta(std::size_t j) const { return sin_[j]; }
  double cos_theta(std::size_t j) const { return cos_[j]; }
  double rho(std::size_t i, std::size_t j) const { return r_[i] * sin_[j]; }
  double weight(std::size_t i, std::size_t j) const { return w_[index(i, j)]; }
  double r_min() const { return std::exp(sf_.front()); }
  double r_max() const { return std::exp(sf_.back()); }

  const Stencil& d1s(std::size_t i) const { return d1s_[i]; }
  const Stencil& d2s(std::size_t i) const { return d2s_[i]; }
  const Stencil& d1t(std::size_t j) const { return d1t_[j]; }
  const Stencil& d2t(std::size_t j) const { return d2t_[j]; }

  // Largest s and theta spacings.
  double h_s() const { return max_gap(s_); }
  double h_theta() const { return max_gap(th_); }

 private:
  static double max_gap(const std::vector<double>& x) {
    double h = 0;
    for (std::size_t i = 1; i < x.size(); ++i) h = std::max(h, x[i] - x[i - 1]);
    return h;
  }

  // 3-point stencils (4-point one-sided for second derivatives at the ends).
  static std::vector<Stencil> stencils(const std::vector<double>& x, int k) {
    std::size_t n = x.size();
    std::vector<Stencil> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      int width = (k == 2 && (i == 0 || i + 1 == n)) ? 4 : 3;
      int first = static_cast<int>(i) - 1;
      first = std::clamp(first, 0, static_cast<int>(n) - width);
      std::vector<double> pts(x.begin() + first, x.begin() + first + width);
      out[i] = {first, fd_weights(x[i], pts, k)};
    }
    return out;
  }

  std::vector<double> s_, th_, sf_, tf_, r_, sin_, cos_, w_;
  std::vector<Stencil> d1s_, d2s_, d1t_, d2t_;
};

using GridPtr = std::shared_ptr<const AxisymGrid>;

namespace detail {

inline std::vector<double> graded_theta_nodes(int n_theta, double axis_cell, double cells_per_efold) {
  // Faces on (0, pi/2]: geometric from axis_cell until the spacing reaches the
  // uniform spacing, then uniform; mirrored onto (pi/2, pi).
  int half = n_theta / 2;
  double q = std::exp(1.0 / cells_per_efold);
  std::vector<double> faces{0.0};
  double h = axis_cell;
  while (true) {
    double remaining = pi / 2 - faces.back();
    int cells_left = half - static_cast<int>(faces.size() - 1);
    if (cells_left <= 0) throw ConfigError("axis grading leaves no room for the uniform part; raise n_theta");
    double uniform = remaining / cells_left;
    if (h >= uniform) {
      for (int k = 1; k <= cells_left; ++k) faces.push_back(faces.back() + uniform);
      faces.back() = pi / 2;
      break;
    }
    faces.push_back(faces.back() + h);
    h *= q;
  }
  std::vector<double> nodes;
  for (std::size_t k = 0; k + 1 < faces.size(); ++k) nodes.push_back(0.5 * (faces[k] + faces[k + 1]));
  std::vector<double> all(nodes.begin(), nodes.end());
  if (n_theta % 2 == 1) all.push_back(pi / 2);
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) all.push_back(pi - *it);
  return all;
}

}  // namespace detail

inline GridPtr build_grid(const GridSpec& spec) {
  if (!(spec.r_min > 0) || !(spec.r_max > spec.r_min) || !std::isfinite(spec.r_max))
    throw ConfigError("grid needs 0 < r_min < r_max");
  if (spec.n_r < 8 || spec.n_theta < 8) throw ConfigError("grid needs n_r, n_theta >= 8");
  double lo = std::log(spec.r_min), hi = std::log(spec.r_max), h = (hi - lo) / spec.n_r;
  std::vector<double> s(spec.n_r);
  for (int i = 0; i < spec.n_r; ++i) s[i] = lo + (i + 0.5) * h;
  std::vector<double> th;
  if (spec.axis_cell > 0) {
    if (spec.axis_cell < 1e-7) throw ConfigError("axis cell below 1e-7 is not resolvable near the axis");
    if (!(spec.cells_per_efold >= 1)) throw ConfigError("cells_per_efold must be >= 1");
    th = detail::graded_theta_nodes(spec.n_theta, spec.axis_cell, spec.cells_per_efold);
  } else {
    double ht = pi / spec.n_theta;
    th.resize(spec.n_theta);
    for (int j = 0; j < spec.n_theta; ++j) th[j] = (j + 0.5) * ht;
  }
  return std::make_shared<const AxisymGrid>(std::move(s), std::move(th));
}

// ---------------------------------------------------------------- regions

struct Region {
  enum class Kind { annulus, omega, omega_delta, cylinder, wedge, complement, ball, all };
  Kind kind = Kind::all;
  double a = 0.0;  // R (annulus, omega, ball) or delta
  double b = 0.0;  // eps

  static Region annulus(double R, double eps) { return {Kind::annulus, R, eps}; }
  static Region omega(double R, double eps) { return {Kind::omega, R, eps}; }
  static Region omega_delta(double delta, double eps) { return {Kind::omega_delta, delta, eps}; }
  static Region cylinder(double delta, double eps) { return {Kind::cylinder, delta, eps}; }
  static Region wedge(double delta, double eps) { return {Kind::wedge, delta, eps}; }
  static Region complement(double delta, double eps) { return {Kind::complement, delta, eps}; }
  static Region ball(double R) { return {Kind::ball, R, 0.0}; }
  static Region everywhere() { return {Kind::all, 0.0, 0.0}; }

  bool contains(double r, double theta) const {
    double rho = r * std::sin(theta);
    switch (kind) {
      case Kind::annulus:  // B_R \ B_eps
        return r < a && r >= b;
      case Kind::omega:  // A_{R,eps} \ C_eps
        return r < a && r >= b && rho > b;
      case Kind::omega_delta:
        return r > a && r < 2 / a && rho > b;
      case Kind::cylinder:
        return rho <= b && r >= a && r <= 2 / a;
      case Kind::wedge:
        return rho >= b && rho <= std::sqrt(b) && r >= a && r <= 2 / a;
      case Kind::complement:  // B_{2/delta} \ Omega_{delta,eps}
        return r < 2 / a && !(r > a && rho > b);
      case Kind::ball:
        return r < a;
      case Kind::all:
        return true;
    }
    return false;
  }

  // Radial extent; inner 0 means the region reaches the origin.
  std::pair<double, double> radial_extent() const {
    switch (kind) {
      case Kind::annulus:
      case Kind::omega:
        return {b, a};
      case Kind::omega_delta:
      case Kind::cylinder:
      case Kind::wedge:
        return {a, 2 / a};
      case Kind::complement:
        return {0.0, 2 / a};
      case Kind::ball:
        return {0.0, a};
      case Kind::all:
        return {0.0, INFINITY};
    }
    return {0.0, 0.0};
  }

  bool touches_axis() const {
    return !(kind == Kind::omega || kind == Kind::omega_delta || kind == Kind::wedge);
  }

  void validate() const {
    auto bad = [](const std::string& m) { throw ConfigError("region: " + m); };
    switch (kind) {
      case Kind::annulus:
      case Kind::omega:
        if (!(a > 0 && b > 0 && b < a)) bad("need 0 < eps < R");
        break;
      case Kind::omega_delta:
      case Kind::cylinder:
      case Kind::wedge:
      case Kind::complement:
        if (!(a > 0 && a < 1 && b > 0 && b < 1)) bad("need 0 < delta, eps < 1");
        break;
      case Kind::ball:
        if (!(a > 0)) bad("need R > 0");
        break;
      case Kind::all:
        break;
    }
  }

  std::string name() const {
    char buf[96];
    switch (kind) {
      case Kind::annulus: std::snprintf(buf, sizeof buf, "annulus:%g:%g", a, b); break;
      case Kind::omega: std::snprintf(buf, sizeof buf, "omega:%g:%g", a, b); break;
      case Kind::omega_delta: std::snprintf(buf, sizeof buf, "omega_delta:%g:%g", a, b); break;
      case Kind::cylinder: std::snprintf(buf, sizeof buf, "cylinder:%g:%g", a, b); break;
      case Kind::wedge: std::snprintf(buf, sizeof buf, "wedge:%g:%g", a, b); break;
      case Kind::complement: std::snprintf(buf, sizeof buf, "complement:%g:%g", a, b); break;
      case Kind::ball: std::snprintf(buf, sizeof buf, "ball:%g", a); break;
      case Kind::all: std::snprintf(buf, sizeof buf, "all"); break;
    }
    return buf;
  }

  // "kind:param:param", e.g. omega:10:0.2
  static Region parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw ConfigError("empty region");
    auto num = [&](std::size_t k) {
      if (k >= parts.size()) throw ConfigError("region '" + text + "' is missing a parameter");
      try {
        std::size_t used = 0;
        double v = std::stod(parts[k], &used);
        if (used != parts[k].size()) throw ConfigError("bad number in region '" + text + "'");
        return v;
      } catch (const std::logic_error&) {
        throw ConfigError("bad number in region '" + text + "'");
      }
    };
    const std::string& k = parts[0];
    Region r;
    if (k == "annulus") r = annulus(num(1), num(2));
    else if (k == "omega") r = omega(num(1), num(2));
    else if (k == "omega_delta") r = omega_delta(num(1), num(2));
    else if (k == "cylinder") r = cylinder(num(1), num(2));
    else if (k == "wedge") r = wedge(num(1), num(2));
    else if (k == "complement") r = complement(num(1), num(2));
    else if (k == "ball") r = ball(num(1));
    else if (k == "all") r = everywhere();
    else throw ConfigError("unknown region kind '" + k + "'");
    r.validate();
    return r;
  }
};

inline void check_coverage(const AxisymGrid& g, const Region& region) {
  region.validate();
  auto [lo, hi] = region.radial_extent();
  double glo = g.r_min(), ghi = g.r_max();
  bool outer = region.kind != Region::Kind::all && hi > ghi * (1 + 1e-12);
  bool inner = lo > 0 && lo < glo * (1 - 1e-12);
  if (outer || inner) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "region %s needs r in [%g, %g] but the grid covers [%g, %g]; uncovered: %s",
                  region.name().c_str(), lo, hi, glo, ghi,
                  outer && inner ? "both ends" : (outer ? "outer radii" : "inner radii"));
    throw CoverageError(buf);
  }
}

inline std::vector<char> region_mask(const AxisymGrid& g, const Region& region) {
  std::vector<char> m(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) m[g.index(i, j)] = region.contains(g.r(i), g.theta(j)) ? 1 : 0;
  return m;
}

// ---------------------------------------------------------------- fields

// Stencil derivative of nodal data along s or theta. Differences are taken
// against the centre value so constants give exact zeros.
inline std::vector<double> fd_apply(const AxisymGrid& g, const std::vector<double>& v, bool along_s, int order) {
  if (v.size() != g.size()) throw UsageError("nodal data size does not match the grid");
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      double acc = 0, c = v[g.index(i, j)];
      if (along_s) {
        const auto& st = order == 1 ? g.d1s(i) : g.d2s(i);
        for (std::size_t k = 0; k < st.w.size(); ++k) acc += st.w[k] * (v[g.index(st.first + k, j)] - c);
      } else {
        const auto& st = order == 1 ? g.d1t(j) : g.d2t(j);
        for (std::size_t k = 0; k < st.w.size(); ++k) acc += st.w[k] * (v[g.index(i, st.first + k)] - c);
      }
      out[g.index(i, j)] = acc;
    }
  return out;
}


class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridPtr g, std::vector<double> v) : grid_(std::move(g)), v_(std::move(v)) { check(); }
  ScalarField(GridPtr g, std::vector<double> v, std::vector<double> ds, std::vector<double> dt)
      : grid_(std::move(g)), v_(std::move(v)), ds_(std::move(ds)), dt_(std::move(dt)) {
    check();
  }

  static ScalarField zeros(GridPtr g, bool with_partials = true) {
    std::size_t n = g->size();
    if (with_partials) return ScalarField(g, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n));
    return ScalarField(g, std::vector<double>(n));
  }

  static ScalarField constant(GridPtr g, double c) {
    std::size_t n = g->size();
    return ScalarField(g, std::vector<double>(n, c), std::vector<double>(n), std::vector<double>(n));
  }

  // f(r, theta) -> value
  static ScalarField sample(GridPtr g, const std::function<double(double, double)>& f) {
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < g->ns(); ++i)
      for (std::size_t j = 0; j < g->nt(); ++j) v[g->index(i, j)] = f(g->r(i), g->theta(j));
    return ScalarField(g, std::move(v));
  }

  struct ValueAndPartials {
    double value, d_r, d_theta;
  };

  // f(r, theta) -> value and (r, theta) partials; stored as (s, theta) partials.
  static ScalarField sample_with_partials(GridPtr g, const std::function<ValueAndPartials(double, double)>& f) {
    std::size_t n = g->size();
    std::vector<double> v(n), ds(n), dt(n);
    for (std::size_t i = 0; i < g->ns(); ++i)
      for (std::size_t j = 0; j < g->nt(); ++j) {
        auto k = g->index(i, j);
        auto s = f(g->r(i), g->theta(j));
        v[k] = s.value;
        ds[k] = g->r(i) * s.d_r;
        dt[k] = s.d_theta;
      }
    return ScalarField(g, std::move(v), std::move(ds), std::move(dt));
  }

  const GridPtr& grid() const { return grid_; }
  const std::vector<double>& values() const { return v_; }
  double operator[](std::size_t k) const { return v_[k]; }
  double at(std::size_t i, std::size_t j) const { return v_[grid_->index(i, j)]; }
  bool has_partials() const { return !ds_.empty(); }

  // (d/ds, d/dtheta): analytic when stored, finite differences otherwise.
  const std::vector<double>& ds() const {
    ensure_partials();
    return has_partials() ? ds_ : fd_ds_;
  }
  const std::vector<double>& dtheta() const {
    ensure_partials();
    return has_partials() ? dt_ : fd_dt_;
  }

  // Copy whose stored partials are the finite-difference ones.
  ScalarField with_fd_partials() const {
    return ScalarField(grid_, v_, fd_derivative(true), fd_derivative(false));
  }
  ScalarField without_partials() const { return ScalarField(grid_, v_); }

  std::vector<double> fd_derivative(bool along_s) const { return fd_apply(*grid_, v_, along_s, 1); }
  std::vector<double> fd_second_derivative(bool along_s) const { return fd_apply(*grid_, v_, along_s, 2); }

  // Pointwise linear combination a*this + b*other; partials combine linearly,
  // falling back to finite differences for an operand without stored partials.
  ScalarField combine(double a, const ScalarField& other, double b) const {
    same_grid(other);
    std::size_t n = v_.size();
    std::vector<double> v(n), ds(n), dt(n);
    const auto &ds1 = this->ds(), &dt1 = this->dtheta(), &ds2 = other.ds(), &dt2 = other.dtheta();
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = a * v_[k] + b * other.v_[k];
      ds[k] = a * ds1[k] + b * ds2[k];
      dt[k] = a * dt1[k] + b * dt2[k];
    }
    return ScalarField(grid_, std::move(v), std::move(ds), std::move(dt));
  }
  ScalarField operator+(const ScalarField& o) const { return combine(1.0, o, 1.0); }
  ScalarField operator-(const ScalarField& o) const { return combine(1.0, o, -1.0); }
  ScalarField scaled(double a) const {
    std::size_t n = v_.size();
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = a * v_[k];
    if (!has_partials()) return ScalarField(grid_, std::move(v));
    std::vector<double> ds(n), dt(n);
    for (std::size_t k = 0; k < n; ++k) {
      ds[k] = a * ds_[k];
      dt[k] = a * dt_[k];
    }
    return ScalarField(grid_, std::move(v), std::move(ds), std::move(dt));
  }

  // |grad f|^2 at node k
  double grad_norm2(std::size_t k) const {
    const auto &ds = this->ds(), &dt = this->dtheta();
    double r = grid_->r(k / grid_->nt());
    return (ds[k] * ds[k] + dt[k] * dt[k]) / (r * r);
  }
  double grad_dot(const ScalarField& o, std::size_t k) const {
    const auto &a = ds(), &b = dtheta(), &c = o.ds(), &d = o.dtheta();
    double r = grid_->r(k / grid_->nt());
    return (a[k] * c[k] + b[k] * d[k]) / (r * r);
  }

  double max_abs() const {
    double m = 0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  void same_grid(const ScalarField& o) const {
    if (grid_ != o.grid_) throw UsageError("fields live on different grids");
  }

 private:
  void check() const {
    if (!grid_) throw UsageError("field without a grid");
    if (v_.size() != grid_->size()) throw UsageError("field size does not match its grid");
    if (!ds_.empty() && (ds_.size() != v_.size() || dt_.size() != v_.size()))
      throw UsageError("partials size does not match the grid");
    for (double x : v_)
      if (!std::isfinite(x)) throw DataError("non-finite field value");
  }

  void ensure_partials() const {
    if (has_partials() || !fd_ds_.empty()) return;
    fd_ds_ = fd_derivative(true);
    fd_dt_ = fd_derivative(false);
  }

  GridPtr grid_;
  std::vector<double> v_, ds_, dt_;
  mutable std::vector<double> fd_ds_, fd_dt_;
};

// Physical gradient components (d/dr, r^{-1} d/dtheta) at every node.
struct GradientField {
  std::vector<double> r, theta;
  double norm(std::size_t k) const { return std::hypot(r[k], theta[k]); }
};

inline GradientField gradient(const ScalarField& f) {
  const auto& g = *f.grid();
  const auto &ds = f.ds(), &dt = f.dtheta();
  GradientField out{std::vector<double>(g.size()), std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      out.r[k] = ds[k] / g.r(i);
      out.theta[k] = dt[k] / g.r(i);
    }
  return out;
}

// Flat-space Laplacian: second derivatives by finite differences, first
// derivatives from the stored partials when present.
inline std::vector<double> laplacian(const ScalarField& f) {
  const auto& g = *f.grid();
  auto fss = f.fd_second_derivative(true), ftt = f.fd_second_derivative(false);
  const auto &fs = f.ds(), &ft = f.dtheta();
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      double r = g.r(i);
      out[k] = (fss[k] + fs[k] + ftt[k] + g.cos_theta(j) / g.sin_theta(j) * ft[k]) / (r * r);
    }
  return out;
}

// Weighted sum over the nodes inside the region.
inline double integrate(const AxisymGrid& g, const std::vector<double>& density, const Region& region) {
  if (density.size() != g.size()) throw UsageError("density size does not match the grid");
  check_coverage(g, region);
  std::vector<double> terms(g.size(), 0.0);
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j)
      if (region.contains(g.r(i), g.theta(j))) {
        auto k = g.index(i, j);
        terms[k] = g.weights()[k] * density[k];
      }
  return pairwise_sum(terms);
}

inline double integrate(const ScalarField& f, const Region& region) {
  return integrate(*f.grid(), f.values(), region);
}

// ---------------------------------------------------------------- boundary faces

struct BoundaryFace {
  std::size_t inside = 0;   // node index inside the region
  std::size_t outside = 0;  // neighbour outside (== inside on the grid edge)
  bool radial = true;       // face of constant r (true) or constant theta
  double sign = 1.0;        // outward normal is sign * (r-hat or theta-hat)
  double r = 0.0, theta = 0.0;  // face centre
  double area = 0.0;
};

inline std::vector<BoundaryFace> boundary_faces(const AxisymGrid& g, const Region& region) {
  check_coverage(g, region);
  auto mask = region_mask(g, region);
  const auto &sf = g.s_faces(), &tf = g.theta_faces();
  std::vector<BoundaryFace> out;
  auto radial_face = [&](std::size_t fi, std::size_t j, std::size_t in, std::size_t outn, double sign) {
    double rf = std::exp(sf[fi]);
    double area = 2 * pi * rf * rf * 2 * std::sin(0.5 * (tf[j] + tf[j + 1])) * std::sin(0.5 * (tf[j + 1] - tf[j]));
    out.push_back({in, outn, true, sign, rf, g.theta(j), area});
  };
  auto polar_face = [&](std::size_t i, std::size_t fj, std::size_t in, std::size_t outn, double sign) {
    double r0 = std::exp(sf[i]), r1 = std::exp(sf[i + 1]);
    double area = 2 * pi * std::sin(tf[fj]) * 0.5 * (r1 * r1 - r0 * r0);
    out.push_back({in, outn, false, sign, g.r(i), tf[fj], area});
  };
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      auto k = g.index(i, j);
      if (!mask[k]) continue;
      if (i == 0) radial_face(0, j, k, k, -1.0);
      else if (!mask[g.index(i - 1, j)]) radial_face(i, j, k, g.index(i - 1, j), -1.0);
      if (i + 1 == g.ns()) radial_face(i + 1, j, k, k, 1.0);
      else if (!mask[g.index(i + 1, j)]) radial_face(i + 1, j, k, g.index(i + 1, j), 1.0);
      if (j > 0 && !mask[g.index(i, j - 1)]) polar_face(i, j, k, g.index(i, j - 1), -1.0);
      if (j + 1 < g.nt() && !mask[g.index(i, j + 1)]) polar_face(i, j + 1, k, g.index(i, j + 1), 1.0);
    }
  return out;
}

// ---------------------------------------------------------------- CSV

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_fields_csv(std::ostream& os, const std::vector<std::string>& names,
                             const std::vector<const ScalarField*>& fields) {
  if (names.size() != fields.size() || fields.empty()) throw UsageError("field CSV needs matching names");
  const auto& g = *fields[0]->grid();
  os << "s,theta";
  for (auto& n : names) os << ',' << n;
  os << '\n';
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      os << format_double(g.s_nodes()[i]) << ',' << format_double(g.theta(j));
      for (auto* f : fields) os << ',' << format_double(f->at(i, j));
      os << '\n';
    }
}

struct FieldTable {
  GridPtr grid;
  std::vector<std::string> names;
  std::vector<ScalarField> fields;
};

inline FieldTable read_fields_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("empty field CSV");
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
  };
  auto header = split(line);
  if (header.size() < 2 || header[0] != "s" || header[1] != "theta") throw DataError("field CSV header must start s,theta");
  std::size_t nc = header.size() - 2;
  std::vector<double> s_all, t_all;
  std::vector<std::vector<double>> cols(nc);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto parts = split(line);
    if (parts.size() != header.size()) throw DataError("field CSV line " + std::to_string(lineno) + " has wrong width");
    try {
      s_all.push_back(std::stod(parts[0]));
      t_all.push_back(std::stod(parts[1]));
      for (std::size_t c = 0; c < nc; ++c) cols[c].push_back(std::stod(parts[c + 2]));
    } catch (const std::logic_error&) {
      throw DataError("field CSV line " + std::to_string(lineno) + " has a bad number");
    }
  }
  std::vector<double> th;
  for (double t : t_all) {
    if (!th.empty() && t == th.front()) break;
    th.push_back(t);
  }
  if (th.empty() || s_all.size() % th.size() != 0) throw DataError("field CSV is not a tensor grid");
  std::vector<double> s;
  for (std::size_t k = 0; k < s_all.size(); k += th.size()) s.push_back(s_all[k]);
  for (std::size_t k = 0; k < s_all.size(); ++k)
    if (s_all[k] != s[k / th.size()] || t_all[k] != th[k % th.size()]) throw DataError("field CSV is not a tensor grid");
  FieldTable t;
  t.grid = std::make_shared<const AxisymGrid>(std::move(s), std::move(th));
  t.names.assign(header.begin() + 2, header.end());
  for (auto& c : cols) t.fields.emplace_back(t.grid, std::move(c));
  return t;
}

}  // namespace kerrgap
