#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kerrgap/core.hpp"

namespace kerrgap {

template <std::size_t N>
using Vec = std::array<double, N>;
template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

// ---------------------------------------------------------------- points

struct H2Point {
  double X = 1.0;
  double Y = 0.0;
  Vec<2> coords() const { return {X, Y}; }
  static H2Point from(const Vec<2>& c) { return {c[0], c[1]}; }
};

struct CH2Point {
  double u = 0.0;
  double v = 0.0;
  double chi = 0.0;
  double psi = 0.0;
  Vec<4> coords() const { return {u, v, chi, psi}; }
  static CH2Point from(const Vec<4>& c) { return {c[0], c[1], c[2], c[3]}; }
};

inline void validate(const H2Point& p) {
  if (!std::isfinite(p.X) || !std::isfinite(p.Y)) throw DomainError("H2 point is not finite");
  if (!(p.X > 0)) throw DomainError("H2 point needs X > 0");
}

inline void validate(const CH2Point& p) {
  if (!std::isfinite(p.u) || !std::isfinite(p.v) || !std::isfinite(p.chi) || !std::isfinite(p.psi))
    throw DomainError("CH2 point is not finite");
}

// ---------------------------------------------------------------- small linear algebra

template <std::size_t N>
double dot(const Vec<N>& a, const Vec<N>& b) {
  double s = 0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
Vec<N> mat_vec(const Mat<N>& m, const Vec<N>& v) {
  Vec<N> r{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) r[i] += m[i][j] * v[j];
  return r;
}

template <std::size_t N>
double quad_form(const Mat<N>& g, const Vec<N>& a, const Vec<N>& b) {
  return dot(a, mat_vec(g, b));
}

// Gaussian elimination with partial pivoting; returns false on a singular system.
template <std::size_t N>
bool solve_linear(Mat<N> a, Vec<N> b, Vec<N>& x) {
  for (std::size_t c = 0; c < N; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < N; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < N; ++r) {
      double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < N; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = N; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < N; ++k) s -= a[c][k] * x[k];
    x[c] = s / a[c][c];
  }
  return true;
}

template <std::size_t N>
Mat<N> inverse(const Mat<N>& a) {
  Mat<N> inv{};
  for (std::size_t c = 0; c < N; ++c) {
    Vec<N> e{}, col{};
    e[c] = 1;
    if (!solve_linear(a, e, col)) throw DomainError("singular metric");
    for (std::size_t r = 0; r < N; ++r) inv[r][c] = col[r];
  }
  return inv;
}

// ---------------------------------------------------------------- H2 closed forms

// Well-conditioned form of acosh(1 + |p-q|^2 / (2 Xp Xq)).
inline double h2_distance(const H2Point& p, const H2Point& q) {
  validate(p);
  validate(q);
  double chord = std::hypot(p.X - q.X, p.Y - q.Y);
  return 2.0 * std::asinh(chord / (2.0 * std::sqrt(p.X * q.X)));
}

namespace detail {

// q seen from p after the isometry z -> (z - Yp)/Xp of the upper half plane
// z = Y + iX, then the Cayley map to the disk; returns the unit direction.
inline std::complex<double> h2_disk_direction(const H2Point& p, const H2Point& q) {
  std::complex<double> w((q.Y - p.Y) / p.X, q.X / p.X);
  const std::complex<double> i(0, 1);
  std::complex<double> zeta = (w - i) / (w + i);
  return zeta / std::abs(zeta);
}

}  // namespace detail

inline H2Point h2_geodesic(const H2Point& p, const H2Point& q, double t) {
  validate(p);
  validate(q);
  if (p.X == q.X && p.Y == q.Y) return p;
  if (p.Y == q.Y) return {p.X * std::pow(q.X / p.X, t), p.Y};
  double d = h2_distance(p, q);
  std::complex<double> zeta = std::tanh(0.5 * t * d) * detail::h2_disk_direction(p, q);
  double den = std::norm(1.0 - zeta);
  double im_w = (1.0 - std::norm(zeta)) / den;
  double re_w = -2.0 * zeta.imag() / den;
  return {p.X * im_w, p.Y + p.X * re_w};
}

// Initial velocity (dX/dt, dY/dt) of t -> h2_geodesic(p, q, t).
inline Vec<2> h2_initial_velocity(const H2Point& p, const H2Point& q) {
  validate(p);
  validate(q);
  if (p.X == q.X && p.Y == q.Y) return {0.0, 0.0};
  if (p.Y == q.Y) return {p.X * std::log(q.X / p.X), 0.0};
  double d = h2_distance(p, q);
  auto e = detail::h2_disk_direction(p, q);
  return {p.X * d * e.real(), -p.X * d * e.imag()};
}

// ---------------------------------------------------------------- metrics in coordinates

struct H2Metric {
  static constexpr std::size_t dim = 2;
  using Point = Vec<2>;

  bool in_domain(const Point& p) const { return p[0] > 0 && std::isfinite(p[0]) && std::isfinite(p[1]); }

  Mat<2> metric(const Point& p) const {
    double f = 1.0 / (p[0] * p[0]);
    return {{{f, 0}, {0, f}}};
  }

  // d[k][i][j] = d g_ij / d x^k
  std::array<Mat<2>, 2> metric_derivatives(const Point& p) const {
    double f = -2.0 / (p[0] * p[0] * p[0]);
    return {{{{{f, 0}, {0, f}}}, {{{0, 0}, {0, 0}}}}};
  }

  Point acceleration(const Point& p, const Point& v) const {
    double X = p[0];
    return {(v[0] * v[0] - v[1] * v[1]) / X, 2.0 * v[0] * v[1] / X};
  }
};

// du^2 + e^{4u}(dv + chi dpsi - psi dchi)^2 + e^{2u}(dchi^2 + dpsi^2)
struct CH2Metric {
  static constexpr std::size_t dim = 4;
  using Point = Vec<4>;

  bool in_domain(const Point& p) const {
    return std::all_of(p.begin(), p.end(), [](double c) { return std::isfinite(c); }) && p[0] < 300.0 &&
           p[0] > -300.0;
  }

  Mat<4> metric(const Point& p) const {
    double A = std::exp(4 * p[0]), B = std::exp(2 * p[0]);
    double chi = p[2], psi = p[3];
    Mat<4> g{};
    g[0][0] = 1;
    g[1][1] = A;
    g[1][2] = g[2][1] = -A * psi;
    g[1][3] = g[3][1] = A * chi;
    g[2][2] = B + A * psi * psi;
    g[3][3] = B + A * chi * chi;
    g[2][3] = g[3][2] = -A * chi * psi;
    return g;
  }

  std::array<Mat<4>, 4> metric_derivatives(const Point& p) const {
    double A = std::exp(4 * p[0]), B = std::exp(2 * p[0]);
    double chi = p[2], psi = p[3];
    std::array<Mat<4>, 4> d{};
    auto& du = d[0];
    du[1][1] = 4 * A;
    du[1][2] = du[2][1] = -4 * A * psi;
    du[1][3] = du[3][1] = 4 * A * chi;
    du[2][2] = 2 * B + 4 * A * psi * psi;
    du[3][3] = 2 * B + 4 * A * chi * chi;
    du[2][3] = du[3][2] = -4 * A * chi * psi;
    auto& dchi = d[2];
    dchi[1][3] = dchi[3][1] = A;
    dchi[3][3] = 2 * A * chi;
    dchi[2][3] = dchi[3][2] = -A * psi;
    auto& dpsi = d[3];
    dpsi[1][2] = dpsi[2][1] = -A;
    dpsi[2][2] = 2 * A * psi;
    dpsi[2][3] = dpsi[3][2] = -A * chi;
    return d;
  }

  // Euler-Lagrange form of the geodesic equation; A*omega_dot is conserved.
  Point acceleration(const Point& p, const Point& vel) const {
    double e2u = std::exp(2 * p[0]);
    double chi = p[2], psi = p[3];
    double ud = vel[0], vd = vel[1], cd = vel[2], pd = vel[3];
    double om = vd + chi * pd - psi * cd;
    double udd = 2 * e2u * e2u * om * om + e2u * (cd * cd + pd * pd);
    double cdd = 2 * e2u * om * pd - 2 * ud * cd;
    double pdd = -2 * e2u * om * cd - 2 * ud * pd;
    double vdd = -4 * ud * om - chi * pdd + psi * cdd;
    return {udd, vdd, cdd, pdd};
  }
};

inline Mat<4> ch2_metric(const CH2Point& p) {
  validate(p);
  return CH2Metric{}.metric(p.coords());
}

// Gamma[k][i][j] = Gamma^k_ij from analytic metric derivatives.
template <class M>
std::array<Mat<M::dim>, M::dim> christoffel(const M& m, const typename M::Point& p) {
  constexpr std::size_t N = M::dim;
  auto ginv = inverse<N>(m.metric(p));
  auto d = m.metric_derivatives(p);
  std::array<Mat<N>, N> low{};  // Gamma_{l i j}
  for (std::size_t l = 0; l < N; ++l)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) low[l][i][j] = 0.5 * (d[i][l][j] + d[j][l][i] - d[l][i][j]);
  std::array<Mat<N>, N> G{};
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        double s = 0;
        for (std::size_t l = 0; l < N; ++l) s += ginv[k][l] * low[l][i][j];
        G[k][i][j] = s;
      }
  return G;
}

// ---------------------------------------------------------------- geodesic ODE

struct IntegratorOptions {
  double atol = 1e-12;
  double rtol = 1e-12;
  double initial_step = 0.05;
  int max_steps = 200000;
};

// Runge-Kutta-Fehlberg 4(5); the 4th-order solution is propagated.
template <class M>
class GeodesicIntegrator {
 public:
  static constexpr std::size_t N = M::dim;
  using State = Vec<2 * N>;

  explicit GeodesicIntegrator(M metric = {}, IntegratorOptions opt = {}) : m_(metric), opt_(opt) {}

  // Integrates from t=0 and records the state at each requested (ascending) time.
  std::vector<State> integrate(const typename M::Point& x0, const typename M::Point& v0,
                               const std::vector<double>& times) const {
    State y{};
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = x0[i];
      y[N + i] = v0[i];
    }
    std::vector<State> out;
    out.reserve(times.size());
    double t = 0.0, h = opt_.initial_step;
    int steps = 0;
    for (double target : times) {
      while (t < target) {
        if (++steps > opt_.max_steps) throw ConvergenceError("geodesic integrator step budget exhausted", target - t);
        double step = std::min(h, target - t);
        bool last = step == target - t;
        State y4, err;
        rkf_step(y, step, y4, err);
        double e = 0;
        for (std::size_t i = 0; i < 2 * N; ++i) {
          double sc = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y4[i]));
          e = std::max(e, std::abs(err[i]) / sc);
        }
        if (!std::isfinite(e)) {
          h = 0.25 * step;
          if (h < 1e-14) throw ConvergenceError("geodesic integrator blew up", target - t);
          continue;
        }
        if (e <= 1.0) {
          t = last ? target : t + step;
          y = y4;
          if (!m_.in_domain(head(y))) throw ConvergenceError("geodesic left the coordinate domain", target - t);
        }
        double fac = e == 0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
        if (!(last && e <= 1.0)) h = step * fac;
      }
      out.push_back(y);
    }
    return out;
  }

  static typename M::Point head(const State& y) {
    typename M::Point x{};
    for (std::size_t i = 0; i < N; ++i) x[i] = y[i];
    return x;
  }
  static typename M::Point tail(const State& y) {
    typename M::Point v{};
    for (std::size_t i = 0; i < N; ++i) v[i] = y[N + i];
    return v;
  }

 private:
  State rhs(const State& y) const {
    auto a = m_.acceleration(head(y), tail(y));
    State f{};
    for (std::size_t i = 0; i < N; ++i) {
      f[i] = y[N + i];
      f[N + i] = a[i];
    }
    return f;
  }

  void rkf_step(const State& y, double h, State& y4, State& err) const {
    auto axpy = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State r = y;
      for (auto [c, k] : terms)
        for (std::size_t i = 0; i < 2 * N; ++i) r[i] += h * c * (*k)[i];
      return r;
    };
    State k1 = rhs(y);
    State k2 = rhs(axpy({{1.0 / 4, &k1}}));
    State k3 = rhs(axpy({{3.0 / 32, &k1}, {9.0 / 32, &k2}}));
    State k4 = rhs(axpy({{1932.0 / 2197, &k1}, {-7200.0 / 2197, &k2}, {7296.0 / 2197, &k3}}));
    State k5 = rhs(axpy({{439.0 / 216, &k1}, {-8.0, &k2}, {3680.0 / 513, &k3}, {-845.0 / 4104, &k4}}));
    State k6 = rhs(axpy(
        {{-8.0 / 27, &k1}, {2.0, &k2}, {-3544.0 / 2565, &k3}, {1859.0 / 4104, &k4}, {-11.0 / 40, &k5}}));
    for (std::size_t i = 0; i < 2 * N; ++i) {
      double inc4 = 25.0 / 216 * k1[i] + 1408.0 / 2565 * k3[i] + 2197.0 / 4104 * k4[i] - 0.2 * k5[i];
      double inc5 = 16.0 / 135 * k1[i] + 6656.0 / 12825 * k3[i] + 28561.0 / 56430 * k4[i] - 9.0 / 50 * k5[i] +
                    2.0 / 55 * k6[i];
      y4[i] = y[i] + h * inc4;
      err[i] = h * (inc5 - inc4);
    }
  }

  M m_;
  IntegratorOptions opt_;
};

// ---------------------------------------------------------------- shooting

struct ShootingOptions {
  int max_newton = 50;
  double tolerance = 1e-9;  // endpoint error, scaled by max(1, |q_i|)
  IntegratorOptions integrator{};
  int max_continuation_levels = 6;
};

template <class M>
struct ShootingResult {
  typename M::Point velocity{};  // initial velocity for t in [0,1]
  double residual = 0.0;
  int iterations = 0;
  bool used_continuation = false;
};

namespace detail {

template <class M>
double endpoint_residual(const typename M::Point& x, const typename M::Point& q) {
  double r = 0;
  for (std::size_t i = 0; i < M::dim; ++i) r = std::max(r, std::abs(x[i] - q[i]) / std::max(1.0, std::abs(q[i])));
  return r;
}

template <class M>
bool newton_shoot(const GeodesicIntegrator<M>& integ, const typename M::Point& p, const typename M::Point& q,
                  typename M::Point& v, const ShootingOptions& opt, int& iters, double& res) {
  constexpr std::size_t N = M::dim;
  using P = typename M::Point;
  const std::vector<double> one{1.0};
  auto endpoint = [&](const P& vel, P& out) {
    try {
      out = GeodesicIntegrator<M>::head(integ.integrate(p, vel, one)[0]);
      return true;
    } catch (const ConvergenceError&) {
      return false;
    }
  };
  P x{};
  if (!endpoint(v, x)) return false;
  res = endpoint_residual<M>(x, q);
  while (res > opt.tolerance) {
    if (++iters > opt.max_newton) return false;
    Mat<N> J{};
    for (std::size_t c = 0; c < N; ++c) {
      double h = 1e-7 * std::max(1.0, std::abs(v[c]));
      P vp = v;
      vp[c] += h;
      P xp{};
      if (!endpoint(vp, xp)) return false;
      for (std::size_t r = 0; r < N; ++r) J[r][c] = (xp[r] - x[r]) / h;
    }
    P f{}, dv{};
    for (std::size_t i = 0; i < N; ++i) f[i] = q[i] - x[i];
    if (!solve_linear<N>(J, f, dv)) return false;
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      P vt = v, xt{};
      for (std::size_t i = 0; i < N; ++i) vt[i] += lambda * dv[i];
      if (endpoint(vt, xt)) {
        double rt = endpoint_residual<M>(xt, q);
        if (rt < res) {
          v = vt;
          x = xt;
          res = rt;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) return false;
  }
  return true;
}

}  // namespace detail

// Boundary-value geodesic from p to q. Newton on the initial velocity; if that
// stalls, march the target along the coordinate chord from p to q.
template <class M>
ShootingResult<M> shoot(const M& metric, const typename M::Point& p, const typename M::Point& q,
                        const ShootingOptions& opt = {}, const typename M::Point* guess = nullptr) {
  constexpr std::size_t N = M::dim;
  using P = typename M::Point;
  GeodesicIntegrator<M> integ(metric, opt.integrator);
  ShootingResult<M> out;
  if (p == q) return out;
  P v{};
  for (std::size_t i = 0; i < N; ++i) v[i] = guess ? (*guess)[i] : q[i] - p[i];
  int iters = 0;
  double res = 0;
  if (detail::newton_shoot<M>(integ, p, q, v, opt, iters, res)) {
    out.velocity = v;
    out.residual = res;
    out.iterations = iters;
    return out;
  }
  double worst = res;
  for (int level = 1; level <= opt.max_continuation_levels; ++level) {
    int pieces = 1 << level;
    P vc{};
    bool ok = true;
    int total = 0;
    for (int k = 1; k <= pieces && ok; ++k) {
      double s = static_cast<double>(k) / pieces;
      P qk{};
      for (std::size_t i = 0; i < N; ++i) qk[i] = p[i] + s * (q[i] - p[i]);
      if (k == 1)
        for (std::size_t i = 0; i < N; ++i) vc[i] = qk[i] - p[i];
      else
        for (std::size_t i = 0; i < N; ++i) vc[i] *= static_cast<double>(k) / (k - 1);
      int it = 0;
      double r = 0;
      ok = detail::newton_shoot<M>(integ, p, qk, vc, opt, it, r);
      total += it;
      worst = r;
    }
    if (ok) {
      out.velocity = vc;
      out.residual = worst;
      out.iterations = iters + total;
      out.used_continuation = true;
      return out;
    }
  }
  throw ConvergenceError("geodesic shooting did not converge", worst);
}

template <class M>
double metric_norm(const M& m, const typename M::Point& p, const typename M::Point& v) {
  return std::sqrt(std::max(0.0, quad_form<M::dim>(m.metric(p), v, v)));
}

template <class P>
struct GeodesicCurve {
  struct Sample {
    double t = 0.0;
    P point{};
    P velocity{};
  };
  std::pair<P, P> endpoints{};
  std::vector<Sample> samples;
  double length = 0.0;
};

template <class M>
GeodesicCurve<typename M::Point> solve_geodesic(const M& metric, const typename M::Point& p,
                                                const typename M::Point& q, int n_samples = 33,
                                                const ShootingOptions& opt = {}) {
  using P = typename M::Point;
  if (n_samples < 2) throw UsageError("geodesic needs at least two samples");
  GeodesicCurve<P> c;
  c.endpoints = {p, q};
  auto sh = shoot(metric, p, q, opt);
  c.length = metric_norm(metric, p, sh.velocity);
  std::vector<double> ts;
  for (int k = 0; k < n_samples; ++k) ts.push_back(static_cast<double>(k) / (n_samples - 1));
  std::vector<typename GeodesicIntegrator<M>::State> ys;
  if (c.length == 0.0) {
    for (double t : ts) c.samples.push_back({t, p, P{}});
    return c;
  }
  ys = GeodesicIntegrator<M>(metric, opt.integrator).integrate(p, sh.velocity, {ts.begin() + 1, ts.end()});
  c.samples.push_back({0.0, p, sh.velocity});
  for (std::size_t k = 0; k < ys.size(); ++k)
    c.samples.push_back(
        {ts[k + 1], GeodesicIntegrator<M>::head(ys[k]), GeodesicIntegrator<M>::tail(ys[k])});
  return c;
}

inline GeodesicCurve<CH2Point> ch2_geodesic(const CH2Point& p, const CH2Point& q, int n_samples = 33,
                                            const ShootingOptions& opt = {}) {
  validate(p);
  validate(q);
  auto raw = solve_geodesic(CH2Metric{}, p.coords(), q.coords(), n_samples, opt);
  GeodesicCurve<CH2Point> c;
  c.endpoints = {p, q};
  c.length = raw.length;
  for (auto& s : raw.samples) c.samples.push_back({s.t, CH2Point::from(s.point), CH2Point::from(s.velocity)});
  return c;
}

inline double ch2_distance(const CH2Point& p, const CH2Point& q, const ShootingOptions& opt = {}) {
  validate(p);
  validate(q);
  CH2Metric m;
  auto sh = shoot(m, p.coords(), q.coords(), opt);
  return metric_norm(m, p.coords(), sh.velocity);
}

// The totally geodesic slice {chi = psi = 0} is a copy of H2 scaled by 1/2.
inline CH2Point ch2_from_h2_slice(const H2Point& p) {
  validate(p);
  return {-0.5 * std::log(p.X), 0.5 * p.Y, 0.0, 0.0};
}

// ---------------------------------------------------------------- H2_C projective model

// Lift Z = (-|zeta|^2 - e^{-2u} + 2iv, sqrt(2) zeta, 1), zeta = chi + i psi, with
// <Z, W> = Z0 conj(W2) + Z2 conj(W0) + Z1 conj(W1), negative on lifts.
// Geodesics are sinh-interpolations of unit lifts with <Z, W> real.
class CH2Segment {
 public:
  using C = std::complex<double>;
  using Lift = std::array<C, 3>;

  CH2Segment(const CH2Point& p, const CH2Point& q) : p_(p), q_(q) {
    validate(p);
    validate(q);
    Z_ = unit_lift(p);
    W_ = unit_lift(q);
    C h = form(Z_, W_);
    double a = std::abs(h);
    if (a > 0) {
      C phase = h / a;  // <Z, lambda W> = conj(lambda) h
      for (auto& w : W_) w *= -phase;
    }
    Lift diff{W_[0] - Z_[0], W_[1] - Z_[1], W_[2] - Z_[2]};
    double n2 = std::max(0.0, form(diff, diff).real());
    d_ = 2 * std::asinh(0.5 * std::sqrt(n2));
  }

  double length() const { return d_; }

  CH2Point at(double t) const {
    if (t == 0.0 || d_ == 0.0) return p_;
    if (t == 1.0) return q_;
    double sd = std::sinh(d_), a = std::sinh((1 - t) * d_) / sd, b = std::sinh(t * d_) / sd;
    Lift g{a * Z_[0] + b * W_[0], a * Z_[1] + b * W_[1], a * Z_[2] + b * W_[2]};
    return project(g);
  }

  static double form_norm(const Lift& Z) { return form(Z, Z).real(); }

  static Lift lift(const CH2Point& p) {
    C zeta(p.chi, p.psi);
    return {C(-std::norm(zeta) - std::exp(-2 * p.u), 2 * p.v), std::sqrt(2.0) * zeta, C(1, 0)};
  }

  static CH2Point project(const Lift& g) {
    C w0 = g[0] / g[2], zeta = g[1] / (std::sqrt(2.0) * g[2]);
    double e = -w0.real() - std::norm(zeta);
    if (!(e > 0)) throw DomainError("projective point outside the complex hyperbolic plane");
    return {-0.5 * std::log(e), 0.5 * w0.imag(), zeta.real(), zeta.imag()};
  }

 private:
  static C form(const Lift& Z, const Lift& W) {
    return Z[0] * std::conj(W[2]) + Z[2] * std::conj(W[0]) + Z[1] * std::conj(W[1]);
  }
  static Lift unit_lift(const CH2Point& p) {
    auto Z = lift(p);
    double s = 1 / (std::sqrt(2.0) * std::exp(-p.u));  // -<Z, Z> = 2 e^{-2u}
    for (auto& z : Z) z *= s;
    return Z;
  }

  CH2Point p_, q_;
  Lift Z_{}, W_{};
  double d_ = 0.0;
};

inline double ch2_distance_closed_form(const CH2Point& p, const CH2Point& q) { return CH2Segment(p, q).length(); }

// ---------------------------------------------------------------- curvature

template <std::size_t N>
using MetricSampler = std::function<Mat<N>(const Vec<N>&)>;

namespace detail {

template <std::size_t N>
std::array<Mat<N>, N> fd_christoffel(const MetricSampler<N>& g, const Vec<N>& p, double h) {
  std::array<Mat<N>, N> dg{};
  for (std::size_t k = 0; k < N; ++k) {
    Vec<N> pp = p, pm = p;
    pp[k] += h;
    pm[k] -= h;
    auto gp = g(pp), gm = g(pm);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) dg[k][i][j] = (gp[i][j] - gm[i][j]) / (2 * h);
  }
  auto ginv = inverse<N>(g(p));
  std::array<Mat<N>, N> G{};
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        double s = 0;
        for (std::size_t l = 0; l < N; ++l) s += ginv[k][l] * 0.5 * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
        G[k][i][j] = s;
      }
  return G;
}

template <std::size_t N>
double fd_sectional(const MetricSampler<N>& g, const Vec<N>& p, const Vec<N>& a, const Vec<N>& b, double h) {
  auto G = fd_christoffel<N>(g, p, h);
  std::array<std::array<Mat<N>, N>, N> dG{};  // dG[c][k][i][j] = d_c Gamma^k_ij
  for (std::size_t c = 0; c < N; ++c) {
    Vec<N> pp = p, pm = p;
    pp[c] += h;
    pm[c] -= h;
    auto Gp = fd_christoffel<N>(g, pp, h), Gm = fd_christoffel<N>(g, pm, h);
    for (std::size_t k = 0; k < N; ++k)
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) dG[c][k][i][j] = (Gp[k][i][j] - Gm[k][i][j]) / (2 * h);
  }
  // R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
  // <R(a,b)b, a> with R(X,Y)Z = R^e_{fcd} Z^f X^c Y^d
  auto gm = g(p);
  Vec<N> Rv{};
  for (std::size_t e = 0; e < N; ++e) {
    double s = 0;
    for (std::size_t f = 0; f < N; ++f)
      for (std::size_t c = 0; c < N; ++c)
        for (std::size_t d = 0; d < N; ++d) {
          double w = b[f] * a[c] * b[d];
          if (w == 0) continue;
          double r = dG[c][e][d][f] - dG[d][e][c][f];
          for (std::size_t m = 0; m < N; ++m) r += G[e][c][m] * G[m][d][f] - G[e][d][m] * G[m][c][f];
          s += r * w;
        }
    Rv[e] = s;
  }
  double num = quad_form<N>(gm, Rv, a);
  double den = quad_form<N>(gm, a, a) * quad_form<N>(gm, b, b) - std::pow(quad_form<N>(gm, a, b), 2);
  return num / den;
}

}  // namespace detail

// Sectional curvature of span{a, b} at p from finite-difference Christoffels,
// with one Richardson level (h, 2h).
template <std::size_t N>
double sectional_curvature(const MetricSampler<N>& metric_at, const Vec<N>& p, const Vec<N>& a, const Vec<N>& b,
                           double h = 1e-4) {
  auto g = metric_at(p);
  double aa = quad_form<N>(g, a, a), bb = quad_form<N>(g, b, b), ab = quad_form<N>(g, a, b);
  if (!(aa * bb - ab * ab > 1e-14 * aa * bb)) throw DomainError("degenerate span for sectional curvature");
  double k1 = detail::fd_sectional<N>(metric_at, p, a, b, h);
  double k2 = detail::fd_sectional<N>(metric_at, p, a, b, 2 * h);
  return (4 * k1 - k2) / 3;
}

// ---------------------------------------------------------------- Kato inequality

struct KatoSample {
  double derivative_of_norm = 0.0;  // |e <V,V>^{1/2}|
  double norm_of_derivative = 0.0;  // |nabla_e V|
};

// Curve c(s) with tangent e = c'(s) and a vector field V(s) along it, both with
// exact derivatives supplied; d|V|/ds is taken by Richardson-extrapolated
// central differences.
template <class M>
KatoSample kato_check(const M& metric, const std::function<typename M::Point(double)>& curve,
                      const std::function<typename M::Point(double)>& curve_dot,
                      const std::function<typename M::Point(double)>& field,
                      const std::function<typename M::Point(double)>& field_dot, double s, double h = 1e-3) {
  constexpr std::size_t N = M::dim;
  auto norm_at = [&](double t) { return metric_norm(metric, curve(t), field(t)); };
  auto central = [&](double hh) { return (norm_at(s + hh) - norm_at(s - hh)) / (2 * hh); };
  double dn = (4 * central(h) - central(2 * h)) / 3;
  auto p = curve(s);
  auto e = curve_dot(s);
  auto V = field(s);
  auto Vd = field_dot(s);
  auto G = christoffel(metric, p);
  typename M::Point cov{};
  for (std::size_t k = 0; k < N; ++k) {
    double acc = Vd[k];
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) acc += G[k][i][j] * e[i] * V[j];
    cov[k] = acc;
  }
  return {std::abs(dn), metric_norm(metric, p, cov)};
}

}  // namespace kerrgap
