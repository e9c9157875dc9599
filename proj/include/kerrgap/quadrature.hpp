#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "kerrgap/grid.hpp"

namespace kerrgap {

// midpoint: node value times exact cell volume.
// corrected: adds first and second moment terms of the cell measure, with the
// density derivatives taken by finite differences.
enum class Quadrature { midpoint, corrected };

namespace detail {

struct Gauss5 {
  static constexpr std::array<double, 5> x{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                           0.9061798459386640};
  static constexpr std::array<double, 5> w{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                           0.4786286704993665, 0.2369268850561891};
};

// int_lo^hi (x - x0)^a m(x) dx for a = 0, 1, 2
template <class Measure>
std::array<double, 3> moments(double lo, double hi, double x0, Measure m) {
  std::array<double, 3> out{};
  double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  for (std::size_t q = 0; q < 5; ++q) {
    double x = c + h * Gauss5::x[q], d = x - x0, wm = h * Gauss5::w[q] * m(x);
    out[0] += wm;
    out[1] += wm * d;
    out[2] += wm * d * d;
  }
  return out;
}

}  // namespace detail

inline double integrate_corrected(const AxisymGrid& g, const std::vector<double>& f, const Region& region) {
  if (f.size() != g.size()) throw UsageError("density size does not match the grid");
  check_coverage(g, region);
  auto fs = fd_apply(g, f, true, 1), ft = fd_apply(g, f, false, 1);
  auto fss = fd_apply(g, f, true, 2), ftt = fd_apply(g, f, false, 2);
  auto fst = fd_apply(g, fs, false, 1);
  const auto &sf = g.s_faces(), &tf = g.theta_faces();
  std::vector<std::array<double, 3>> R(g.ns()), T(g.nt());
  for (std::size_t i = 0; i < g.ns(); ++i)
    R[i] = detail::moments(sf[i], sf[i + 1], g.s_nodes()[i], [](double s) { return std::exp(3 * s); });
  for (std::size_t j = 0; j < g.nt(); ++j)
    T[j] = detail::moments(tf[j], tf[j + 1], g.theta(j), [](double t) { return std::sin(t); });
  std::vector<double> terms(g.size(), 0.0);
  for (std::size_t i = 0; i < g.ns(); ++i)
    for (std::size_t j = 0; j < g.nt(); ++j) {
      if (!region.contains(g.r(i), g.theta(j))) continue;
      auto k = g.index(i, j);
      double corr = fs[k] * R[i][1] * T[j][0] + ft[k] * R[i][0] * T[j][1] + 0.5 * fss[k] * R[i][2] * T[j][0] +
                    0.5 * ftt[k] * R[i][0] * T[j][2] + fst[k] * R[i][1] * T[j][1];
      terms[k] = g.weights()[k] * f[k] + 2 * pi * corr;
    }
  return pairwise_sum(terms);
}

inline double integrate(const AxisymGrid& g, const std::vector<double>& f, const Region& region, Quadrature q) {
  return q == Quadrature::midpoint ? integrate(g, f, region) : integrate_corrected(g, f, region);
}

// Second-order Taylor reconstruction of a field around its nodes, using the
// stored first partials and differences of them.
class LocalField {
 public:
  explicit LocalField(const ScalarField& f)
      : g_(f.grid()), v_(f.values()), fs_(f.ds()), ft_(f.dtheta()) {
    fss_ = fd_apply(*g_, fs_, true, 1);
    ftt_ = fd_apply(*g_, ft_, false, 1);
    fst_ = fd_apply(*g_, fs_, false, 1);
  }

  double from_node(std::size_t k, double s, double theta) const {
    double ds = s - g_->s_nodes()[k / g_->nt()], dt = theta - g_->theta(k % g_->nt());
    return v_[k] + fs_[k] * ds + ft_[k] * dt + 0.5 * fss_[k] * ds * ds + fst_[k] * ds * dt + 0.5 * ftt_[k] * dt * dt;
  }

  // value at a point on a boundary face, averaged over the two adjacent nodes
  double on_face(const BoundaryFace& f, double s, double theta) const {
    if (f.inside == f.outside) return from_node(f.inside, s, theta);
    return 0.5 * (from_node(f.inside, s, theta) + from_node(f.outside, s, theta));
  }

 private:
  GridPtr g_;
  std::vector<double> v_, fs_, ft_, fss_, ftt_, fst_;
};

// Sum over faces of int_face fn(face, r, theta) dA, five Gauss points per face.
inline double surface_integral(const AxisymGrid& g, const std::vector<BoundaryFace>& faces,
                               const std::function<double(const BoundaryFace&, double, double)>& fn) {
  const auto &sf = g.s_faces(), &tf = g.theta_faces();
  std::vector<double> terms;
  terms.reserve(faces.size());
  for (const auto& f : faces) {
    double acc = 0;
    if (f.radial) {
      std::size_t j = f.inside % g.nt();
      double c = 0.5 * (tf[j] + tf[j + 1]), h = 0.5 * (tf[j + 1] - tf[j]);
      for (std::size_t q = 0; q < 5; ++q) {
        double t = c + h * detail::Gauss5::x[q];
        acc += h * detail::Gauss5::w[q] * 2 * pi * f.r * f.r * std::sin(t) * fn(f, f.r, t);
      }
    } else {
      std::size_t i = f.inside / g.nt();
      double c = 0.5 * (sf[i] + sf[i + 1]), h = 0.5 * (sf[i + 1] - sf[i]);
      for (std::size_t q = 0; q < 5; ++q) {
        double r = std::exp(c + h * detail::Gauss5::x[q]);
        acc += h * detail::Gauss5::w[q] * 2 * pi * std::sin(f.theta) * r * r * fn(f, r, f.theta);
      }
    }
    terms.push_back(acc);
  }
  return pairwise_sum(terms);
}

}  // namespace kerrgap
