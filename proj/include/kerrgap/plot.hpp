#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kerrgap/core.hpp"

namespace kerrgap {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  }
  double number(std::size_t row, int col) const {
    const auto& s = rows[row][col];
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::logic_error&) {
    }
    if (s == "nan" || s == "-nan") return NAN;
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw DataError("column '" + header[col] + "' row " + std::to_string(row + 1) + ": '" + s + "' is not a number");
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line) || line.empty()) throw DataError("table has no header");
  t.header = split_csv_line(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != t.header.size())
      throw DataError("row " + std::to_string(t.rows.size() + 1) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

enum class PlotKind { convergence, profile };

inline PlotKind parse_plot_kind(const std::string& s) {
  if (s == "convergence") return PlotKind::convergence;
  if (s == "profile") return PlotKind::profile;
  throw ConfigError("unknown plot kind '" + s + "' (expected convergence or profile)");
}

namespace detail {

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 70, kTop = 30, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double map(double v, double p0, double p1) const {
    double a = log ? std::log10(v) : v;
    return p0 + (a - lo) / (hi - lo) * (p1 - p0);
  }
};

inline Axis make_axis(std::vector<double> v, bool log) {
  Axis ax;
  ax.log = log;
  std::vector<double> u;
  for (double x : v)
    if (std::isfinite(x) && (!log || x > 0)) u.push_back(log ? std::log10(x) : x);
  if (u.empty()) {
    ax.lo = 0;
    ax.hi = 1;
    return ax;
  }
  auto [mn, mx] = std::minmax_element(u.begin(), u.end());
  ax.lo = *mn;
  ax.hi = *mx;
  if (log) {
    ax.lo = std::floor(ax.lo);
    ax.hi = std::ceil(ax.hi);
  }
  if (ax.hi - ax.lo < 1e-12) {
    ax.lo -= 0.5;
    ax.hi += 0.5;
  }
  return ax;
}

inline std::vector<double> ticks(const Axis& ax) {
  std::vector<double> t;
  if (ax.log) {
    for (double e = ax.lo; e <= ax.hi + 1e-9; e += 1) t.push_back(std::pow(10.0, e));
    return t;
  }
  for (int k = 0; k <= 4; ++k) t.push_back(ax.lo + k * (ax.hi - ax.lo) / 4);
  return t;
}

class Svg {
 public:
  Svg() {
    os_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  }
  void frame() {
    os_ << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(kWidth - kLeft - kRight)
        << "\" height=\"" << fmt(kHeight - kTop - kBottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
  }
  void text(double x, double y, const std::string& s, const char* anchor = "middle") {
    os_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\""
        << anchor << "\">" << s << "</text>\n";
  }
  void line(double x0, double y0, double x1, double y1) {
    os_ << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(y1)
        << "\" stroke=\"black\"/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const char* colour, bool dashed) {
    if (pts.empty()) return;
    os_ << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"";
    if (dashed) os_ << " stroke-dasharray=\"5,3\"";
    os_ << " points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) os_ << (k ? " " : "") << fmt(pts[k].first) << ',' << fmt(pts[k].second);
    os_ << "\"/>\n";
    for (const auto& p : pts)
      os_ << "<circle cx=\"" << fmt(p.first) << "\" cy=\"" << fmt(p.second) << "\" r=\"2.5\" fill=\"" << colour << "\"/>\n";
  }
  std::string finish() {
    os_ << "</svg>\n";
    return os_.str();
  }

 private:
  std::ostringstream os_;
};

inline void x_axis(Svg& s, const Axis& ax, const std::string& name) {
  double y = kHeight - kBottom;
  for (double t : ticks(ax)) {
    double x = ax.map(t, kLeft, kWidth - kRight);
    s.line(x, y, x, y + 5);
    s.text(x, y + 18, label(t));
  }
  s.text(0.5 * (kLeft + kWidth - kRight), kHeight - 10, name);
}

inline void y_axis(Svg& s, const Axis& ax, const std::string& name, bool right) {
  double x = right ? kWidth - kRight : kLeft;
  for (double t : ticks(ax)) {
    double y = ax.map(t, kHeight - kBottom, kTop);
    s.line(x, y, right ? x + 5 : x - 5, y);
    s.text(right ? x + 8 : x - 8, y + 4, label(t), right ? "start" : "end");
  }
  s.text(right ? kWidth - 12 : 14, kTop - 10, name, right ? "end" : "start");
}

inline void require(const CsvTable& t, std::initializer_list<const char*> cols, const char* kind) {
  for (const char* c : cols)
    if (t.column(c) < 0) throw ConfigError(std::string(kind) + " plot needs a '" + c + "' column");
}

}  // namespace detail

// |delta_I| against delta on log-log axes, one series per stage.
inline std::string render_convergence(const CsvTable& t) {
  using namespace detail;
  require(t, {"delta", "delta_I"}, "convergence");
  int cx = t.column("delta"), cy = t.column("delta_I"), cs = t.column("stage");
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    double x = t.number(r, cx), y = std::abs(t.number(r, cy));
    if (!(x > 0) || !(y > 0) || !std::isfinite(x) || !std::isfinite(y)) continue;
    std::string key = cs >= 0 ? t.rows[r][cs] : "delta_I";
    if (!series.count(key)) order.push_back(key);
    series[key].push_back({x, y});
    xs.push_back(x);
    ys.push_back(y);
  }
  Axis ax = make_axis(xs, true), ay = make_axis(ys, true);
  Svg s;
  s.frame();
  x_axis(s, ax, "delta");
  y_axis(s, ay, "|delta_I|", false);
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto pts = series[order[k]];
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<double, double>> px;
    for (auto [x, y] : pts) px.push_back({ax.map(x, kLeft, kWidth - kRight), ay.map(y, kHeight - kBottom, kTop)});
    const char* c = kPalette[k % 6];
    s.polyline(px, c, false);
    s.text(kLeft + 10, kTop + 16 + 14 * k, order[k], "start");
  }
  return s.finish();
}

// E(t) with the second differences as a dashed secondary series on the right axis.
inline std::string render_profile(const CsvTable& t) {
  using namespace detail;
  require(t, {"t", "E"}, "profile");
  int ct = t.column("t"), ce = t.column("E"), cd = t.column("second_diff");
  std::vector<double> ts, es, ds;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ts.push_back(t.number(r, ct));
    es.push_back(t.number(r, ce));
    if (cd >= 0) ds.push_back(t.number(r, cd));
  }
  Axis ax = make_axis(ts, false), ay = make_axis(es, false), ad = make_axis(ds, false);
  Svg s;
  s.frame();
  x_axis(s, ax, "t");
  y_axis(s, ay, "E", false);
  std::vector<std::pair<double, double>> pe, pd;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    double x = ax.map(ts[k], kLeft, kWidth - kRight);
    pe.push_back({x, ay.map(es[k], kHeight - kBottom, kTop)});
    if (cd >= 0) pd.push_back({x, ad.map(ds[k], kHeight - kBottom, kTop)});
  }
  s.polyline(pe, kPalette[0], false);
  if (cd >= 0) {
    y_axis(s, ad, "second_diff", true);
    s.polyline(pd, kPalette[1], true);
  }
  return s.finish();
}

inline std::string render_plot(const CsvTable& t, PlotKind kind) {
  return kind == PlotKind::convergence ? render_convergence(t) : render_profile(t);
}

}  // namespace kerrgap
