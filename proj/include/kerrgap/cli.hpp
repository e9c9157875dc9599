#pragma once

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kerrgap/cutpaste.hpp"
#include "kerrgap/energy.hpp"
#include "kerrgap/geometry_audit.hpp"
#include "kerrgap/perturbation_classes.hpp"
#include "kerrgap/plot.hpp"
#include "kerrgap/variation.hpp"

namespace kerrgap::cli {

enum ExitCode { ok = 0, check_failed = 1, config_error = 2 };

struct KeySpec {
  const char* key;
  const char* flag;
  const char* fallback;
  const char* help;
};

// Every configuration key, its command-line flag and default.
inline const std::vector<KeySpec>& keys() {
  static const std::vector<KeySpec> k = {
      {"grid.r_min", "--r-min", "0.1", "inner radius of the grid"},
      {"grid.r_max", "--r-max", "20", "outer radius of the grid"},
      {"grid.n_r", "--n-r", "128", "radial cells"},
      {"grid.n_theta", "--n-theta", "64", "polar cells"},
      {"background.kind", "--background", "kerr", "kerr or kn"},
      {"background.J", "--J", "1", "Kerr angular momentum"},
      {"background.m", "--m", "", "Kerr-Newman mass (defaults to sqrt(a^2 + q^2))"},
      {"background.a", "--a", "1", "Kerr-Newman rotation"},
      {"background.q", "--q", "1", "Kerr-Newman charge"},
      {"functional", "--functional", "", "M, I or em (default by background)"},
      {"region", "--region", "omega:10:0.2", "integration region kind:param:param"},
      {"variation.R", "--R", "10", "outer radius of the perturbation support"},
      {"variation.eps", "--eps", "0.2", "axis distance of the perturbation support"},
      {"perturbation.amplitudes", "--amplitude", "0.1", "amplitude, or comma list cycled over seeds"},
      {"perturbation.seeds", "--seeds", "10", "number of seeds"},
      {"perturbation.first_seed", "--first-seed", "1", "first seed"},
      {"class.id", "--class", "", "vacuum_weighted, vacuum_asymptotic, em_weighted or em_asymptotic"},
      {"class.lambda", "--lambda", "2", "decay exponent"},
      {"class.r_min", "--class-r-min", "0.001", "inner radius for class validation"},
      {"class.r_max", "--class-r-max", "1000", "outer radius for class validation"},
      {"class.n_r", "--class-n-r", "192", "radial cells for class validation"},
      {"class.n_theta", "--class-n-theta", "96", "polar cells for class validation"},
      {"ladder.rungs", "--rungs", "4", "rungs of the cutoff ladder"},
      {"ladder.c0", "--c0", "0", "energy budget for rung selection (0: off)"},
      {"el.refinements", "--refinements", "3", "grids in the residual study"},
      {"el.base_n", "--base-n", "64", "radial cells of the coarsest residual grid"},
      {"audit.seed", "--audit-seed", "7", "seed of the geometry audit"},
      {"audit.pairs", "--pairs", "1000", "distance pairs in the geometry audit"},
      {"plot.table", "--table", "", "CSV table to plot"},
      {"plot.kind", "--kind", "convergence", "convergence or profile"},
      {"plot.output", "--output", "", "SVG path (default <out>/plot.svg)"},
      {"output.dir", "--out", "out", "output directory"},
  };
  return k;
}

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"energy",    "el-check",       "first-variation", "convexity-sweep",
                                             "gap-check", "cutpaste-study", "validate-class",  "curvature-audit",
                                             "plot"};
  return c;
}

class RunConfig {
 public:
  RunConfig() {
    for (const auto& k : keys()) kv_[k.key] = k.fallback;
  }

  std::string command;

  void set(const std::string& key, const std::string& value) {
    if (key == "command") {
      command = value;
      return;
    }
    if (!kv_.count(key)) throw ConfigError("unknown field '" + key + "'");
    kv_[key] = value;
    given_.insert(key);
  }
  bool given(const std::string& key) const { return given_.count(key) > 0; }

  const std::string& str(const std::string& key) const { return kv_.at(key); }

  double real(const std::string& key) const {
    const auto& s = str(key);
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::logic_error&) {
    }
    throw ConfigError("field '" + key + "': '" + s + "' is not a finite number");
  }

  long integer(const std::string& key, long lo) const {
    const auto& s = str(key);
    try {
      std::size_t used = 0;
      long v = std::stol(s, &used);
      if (used == s.size() && v >= lo) return v;
    } catch (const std::logic_error&) {
    }
    throw ConfigError("field '" + key + "': '" + s + "' is not an integer >= " + std::to_string(lo));
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
        out.push_back(v);
      } catch (const std::logic_error&) {
        throw ConfigError("field '" + key + "': '" + item + "' is not a finite number");
      }
    }
    if (out.empty()) throw ConfigError("field '" + key + "' is empty");
    return out;
  }

  void echo(std::ostream& os) const {
    os << "command=" << command << '\n';
    for (const auto& [k, v] : kv_) os << k << '=' << v << '\n';
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> given_;
};

// Flat key=value lines; '#' starts a comment.
inline void parse_config(std::istream& is, const std::string& source, RunConfig& cfg) {
  std::string line;
  int n = 0;
  auto trim = [](std::string s) {
    auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(is, line)) {
    ++n;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    std::string where = source + ":" + std::to_string(n) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key=value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

// ---------------------------------------------------------------- output

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw ConfigError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

class Session {
 public:
  Session(const RunConfig& cfg, std::filesystem::path dir, std::ostream& out, std::ostream& err)
      : cfg_(cfg), dir_(std::move(dir)), out_(out), err_(err) {}

  // Writes a table; rows whose pass column is 0 are reported and fail the run.
  void table(const std::string& name, const std::string& csv) {
    auto path = dir_ / (name + ".csv");
    write_atomic(path, csv);
    out_ << "wrote " << path.string() << '\n';
    std::istringstream is(csv);
    auto t = read_csv(is);
    int p = t.column("pass");
    if (p < 0) return;
    for (const auto& row : t.rows)
      if (row[p] == "0") {
        failed_ = true;
        err_ << "FAIL " << name << ": ";
        for (std::size_t k = 0; k < row.size(); ++k) err_ << (k ? "," : "") << t.header[k] << '=' << row[k];
        err_ << '\n';
      }
  }

  void echo_config() {
    std::ostringstream os;
    cfg_.echo(os);
    write_atomic(dir_ / (cfg_.command + ".config.txt"), os.str());
  }

  const std::filesystem::path& dir() const { return dir_; }
  std::ostream& out() { return out_; }
  int exit_code() const { return failed_ ? check_failed : ok; }

 private:
  const RunConfig& cfg_;
  std::filesystem::path dir_;
  std::ostream& out_;
  std::ostream& err_;
  bool failed_ = false;
};

// ---------------------------------------------------------------- helpers

struct Background {
  bool kerr_newman = false;
  KerrParams kerr;
  KerrNewmanParams kn;
};

inline Background background(const RunConfig& c) {
  Background b;
  const auto& kind = c.str("background.kind");
  if (kind == "kerr") {
    b.kerr.J = c.real("background.J");
    if (b.kerr.J == 0) throw ConfigError("field 'background.J' must be nonzero");
  } else if (kind == "kn") {
    b.kerr_newman = true;
    double a = c.real("background.a"), q = c.real("background.q");
    b.kn = KerrNewmanParams::from_aq(a, q);
    if (!(b.kn.m > 0)) throw ConfigError("Kerr-Newman background needs a^2 + q^2 > 0");
    // a supplied mass only has to agree with the extremal relation to input precision
    if (c.given("background.m") && std::abs(c.real("background.m") - b.kn.m) > 1e-6 * b.kn.m)
      throw ConfigError("field 'background.m': extremal Kerr-Newman needs m^2 = a^2 + q^2");
  } else {
    throw ConfigError("field 'background.kind': expected kerr or kn, got '" + kind + "'");
  }
  return b;
}

inline FunctionalId functional(const RunConfig& c, const Background& b) {
  const auto& s = c.str("functional");
  if (s.empty()) return b.kerr_newman ? FunctionalId::em_I : FunctionalId::vacuum_M;
  auto f = parse_functional(s);
  if ((f == FunctionalId::em_I) != b.kerr_newman)
    throw ConfigError("functional '" + s + "' does not match background '" + c.str("background.kind") + "'");
  return f;
}

inline GridSpec grid_spec(const RunConfig& c, const std::string& prefix = "grid") {
  GridSpec g;
  g.r_min = c.real(prefix + ".r_min");
  g.r_max = c.real(prefix + ".r_max");
  g.n_r = static_cast<int>(c.integer(prefix + ".n_r", 4));
  g.n_theta = static_cast<int>(c.integer(prefix + ".n_theta", 4));
  if (!(g.r_min > 0 && g.r_max > g.r_min)) throw ConfigError("grid radii need 0 < r_min < r_max");
  return g;
}

inline VariationSetup variation_setup(const RunConfig& c, const Background& b) {
  VariationSetup s;
  s.grid = grid_spec(c);
  s.R = c.real("variation.R");
  s.eps = c.real("variation.eps");
  if (!(s.eps > 0 && s.R > s.eps)) throw ConfigError("variation support needs 0 < eps < R");
  s.kerr = b.kerr;
  s.kerr_newman = b.kn;
  return s;
}

struct SeedPlan {
  std::vector<std::uint64_t> seeds;
  std::vector<double> amplitudes;
  double amplitude(std::size_t k) const { return amplitudes[k % amplitudes.size()]; }
};

inline SeedPlan seed_plan(const RunConfig& c) {
  SeedPlan p;
  long n = c.integer("perturbation.seeds", 1), first = c.integer("perturbation.first_seed", 0);
  for (long k = 0; k < n; ++k) p.seeds.push_back(static_cast<std::uint64_t>(first + k));
  p.amplitudes = c.reals("perturbation.amplitudes");
  return p;
}

inline std::string check_row(const std::string& name, double measured, double threshold, bool pass) {
  return name + "," + format_double(measured) + "," + format_double(threshold) + "," + (pass ? "1" : "0") + "\n";
}

// ---------------------------------------------------------------- commands

inline void cmd_energy(const RunConfig& c, Session& s) {
  auto b = background(c);
  auto f = functional(c, b);
  auto g = build_grid(grid_spec(c));
  auto region = Region::parse(c.str("region"));
  EnergyReport rep;
  if (f == FunctionalId::vacuum_M) rep = reduced_energy_M(kerr_vacuum_map(g, b.kerr), region);
  else if (f == FunctionalId::vacuum_I) rep = functional_I_vacuum(kerr_potential_map(g, b.kerr), region);
  else rep = em_energy_I(kerr_newman_map(g, b.kn), region);
  std::ostringstream os;
  write_energy_header(os);
  write_energy_row(os, rep);
  s.table("energy", os.str());
}

inline void cmd_el_check(const RunConfig& c, Session& s) {
  auto b = background(c);
  if (b.kerr_newman) throw ConfigError("el-check runs on the Kerr background");
  auto region = Region::parse(c.str("region"));
  long levels = c.integer("el.refinements", 2), n0 = c.integer("el.base_n", 16);
  GridSpec base = grid_spec(c);
  std::vector<double> h, rx, rY;
  std::ostringstream os;
  os << "n_r,n_theta,h_s,rel_x,rel_Y\n";
  for (long k = 0; k < levels; ++k) {
    GridSpec gs = base;
    gs.n_r = static_cast<int>(n0 << k);
    gs.n_theta = gs.n_r / 2;
    auto g = build_grid(gs);
    auto r = el_residual_kerr(g, b.kerr, region);
    h.push_back(g->h_s());
    rx.push_back(r.rel_x());
    rY.push_back(r.rel_Y());
    os << gs.n_r << ',' << gs.n_theta << ',' << format_double(h.back()) << ',' << format_double(rx.back()) << ','
       << format_double(rY.back()) << '\n';
  }
  s.table("el-check", os.str());
  double ox = fitted_exponent(h, rx), oY = fitted_exponent(h, rY);
  std::string sum = "check,measured,threshold,pass\n";
  sum += check_row("order_x", ox, 1.8, ox >= 1.8);
  sum += check_row("order_Y", oY, 1.8, oY >= 1.8);
  sum += check_row("finest_rel_x", rx.back(), 1e-3, rx.back() <= 1e-3);
  sum += check_row("finest_rel_Y", rY.back(), 1e-3, rY.back() <= 1e-3);
  s.table("el-check-summary", sum);
}

inline void cmd_first_variation(const RunConfig& c, Session& s) {
  auto b = background(c);
  auto f = functional(c, b);
  auto setup = variation_setup(c, b);
  auto plan = seed_plan(c);
  auto g = build_grid(setup.grid);
  std::ostringstream os;
  os << "seed,amplitude,derivative,E0,E1,ratio,pass\n";
  for (std::size_t k = 0; k < plan.seeds.size(); ++k) {
    auto fam = random_family(f, g, setup, plan.amplitude(k), plan.seeds[k]);
    auto fv = first_variation(fam, setup.energy_region());
    os << plan.seeds[k] << ',' << format_double(plan.amplitude(k)) << ',' << format_double(fv.derivative) << ','
       << format_double(fv.E0) << ',' << format_double(fv.E1) << ',' << format_double(std::abs(fv.derivative) / fv.scale)
       << ',' << (fv.pass ? 1 : 0) << '\n';
  }
  s.table("first-variation", os.str());
}

inline void cmd_convexity_sweep(const RunConfig& c, Session& s) {
  auto b = background(c);
  auto f = functional(c, b);
  auto setup = variation_setup(c, b);
  auto plan = seed_plan(c);
  auto g = build_grid(setup.grid);
  std::ostringstream os, first;
  os << "seed,amplitude,t,E,second_diff,rhs_bound,pass\n";
  for (std::size_t k = 0; k < plan.seeds.size(); ++k) {
    auto fam = random_family(f, g, setup, plan.amplitude(k), plan.seeds[k]);
    auto rep = second_variation_profile(fam, setup.energy_region());
    if (k == 0) write_variation_csv(first, rep);
    for (std::size_t i = 0; i < rep.t.size(); ++i)
      os << plan.seeds[k] << ',' << format_double(plan.amplitude(k)) << ',' << format_double(rep.t[i]) << ','
         << format_double(rep.E[i]) << ',' << format_double(rep.second_diff[i]) << ',' << format_double(rep.rhs_bound)
         << ',' << (rep.pass[i] ? 1 : 0) << '\n';
  }
  s.table("convexity-sweep", os.str());
  s.table("convexity-profile", first.str());
}

inline void cmd_gap_check(const RunConfig& c, Session& s) {
  auto b = background(c);
  auto f = functional(c, b);
  auto setup = variation_setup(c, b);
  auto plan = seed_plan(c);
  auto g = build_grid(setup.grid);
  std::ostringstream os;
  os << "seed,amplitude,gap,dirichlet,l6_term,ratio,sobolev_ratio,pass\n";
  for (std::size_t k = 0; k < plan.seeds.size(); ++k) {
    auto fam = random_family(f, g, setup, plan.amplitude(k), plan.seeds[k]);
    auto r = gap_check(fam, setup.energy_region());
    os << plan.seeds[k] << ',' << format_double(plan.amplitude(k)) << ',' << format_double(r.gap) << ','
       << format_double(r.dirichlet) << ',' << format_double(r.l6_term) << ',' << format_double(r.ratio) << ','
       << format_double(r.sobolev_ratio) << ',' << (r.pass() ? 1 : 0) << '\n';
  }
  s.table("gap-check", os.str());
}

inline void cmd_cutpaste_study(const RunConfig& c, Session& s) {
  auto b = background(c);
  auto f = functional(c, b);
  if (f == FunctionalId::vacuum_M && !c.given("functional")) f = FunctionalId::vacuum_I;
  double lambda = c.real("class.lambda");
  auto ladder = default_ladder(static_cast<int>(c.integer("ladder.rungs", 2)));
  auto g = build_grid(ladder_grid_spec(ladder));
  ConvergenceTable t;
  if (b.kerr_newman) {
    t = convergence_study(kerr_newman_map(g, b.kn), class_member_em(g, b.kn, lambda), f, ladder, lambda);
  } else {
    t = convergence_study(kerr_potential_map(g, b.kerr), class_member_vacuum(g, b.kerr, lambda), f, ladder, lambda);
  }
  std::ostringstream os;
  write_study_csv(os, t);
  s.table("cutpaste-study", os.str());
  auto v = evaluate_ladder(t);
  double c1 = std::abs(t.rungs[0].axis * std::log(t.rungs[0].spec.eps)), ck = 0;
  for (const auto& r : t.rungs) ck = std::max(ck, std::abs(r.axis * std::log(r.spec.eps)));
  std::string sum = "check,measured,threshold,pass\n";
  sum += check_row("total_monotone", v.total_monotone ? 1 : 0, 1, v.total_monotone);
  sum += check_row("far_exponent", t.far_exponent, 2 * lambda - 3, v.far_rate);
  sum += check_row("axis_log_eps_bound", ck, 2 * c1, v.axis_bounded);
  double c0 = c.real("ladder.c0");
  if (c0 > 0) {
    try {
      const auto& r = auto_select(t, c0);
      sum += check_row("auto_select_delta", r.spec.delta, c0, true);
    } catch (const ConvergenceError&) {
      sum += check_row("auto_select_delta", NAN, c0, false);
    }
  }
  s.table("cutpaste-verdict", sum);
}

inline void cmd_validate_class(const RunConfig& c, Session& s) {
  auto b = background(c);
  ClassSpec spec;
  spec.lambda = c.real("class.lambda");
  const auto& id = c.str("class.id");
  spec.id = id.empty() ? (b.kerr_newman ? ClassId::em_asymptotic : ClassId::vacuum_asymptotic) : parse_class(id);
  spec.validate();
  bool em_class = spec.id == ClassId::em_weighted || spec.id == ClassId::em_asymptotic;
  if (em_class != b.kerr_newman) throw ConfigError("class '" + class_name(spec.id) + "' does not match the background");
  auto g = build_grid(grid_spec(c, "class"));
  double amp = c.reals("perturbation.amplitudes").front();
  ValidationReport rep;
  if (b.kerr_newman) {
    rep = validate(kerr_newman_map(g, b.kn), class_member_em(g, b.kn, spec.lambda, amp), spec);
  } else {
    auto base = kerr_potential_map(g, b.kerr);
    auto m = class_member_vacuum(g, b.kerr, spec.lambda, amp);
    rep = spec.id == ClassId::vacuum_weighted ? validate(to_reduced(base), to_reduced(m), spec) : validate(base, m, spec);
  }
  std::ostringstream os;
  write_validation_csv(os, rep);
  s.table("validate-class", os.str());
}

inline void cmd_curvature_audit(const RunConfig& c, Session& s) {
  AuditOptions opt;
  opt.seed = static_cast<std::uint64_t>(c.integer("audit.seed", 0));
  opt.distance_pairs = static_cast<int>(c.integer("audit.pairs", 1));
  opt.kato_samples = opt.distance_pairs;
  std::ostringstream os;
  write_audit_csv(os, geometry_audit(opt));
  s.table("curvature-audit", os.str());
}

inline void cmd_plot(const RunConfig& c, Session& s) {
  const auto& path = c.str("plot.table");
  if (path.empty()) throw ConfigError("plot needs --table");
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read table " + path);
  CsvTable t;
  try {
    t = read_csv(f);
  } catch (const DataError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  std::string svg;
  try {
    svg = render_plot(t, parse_plot_kind(c.str("plot.kind")));
  } catch (const DataError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  std::filesystem::path out = c.str("plot.output").empty() ? s.dir() / "plot.svg" : std::filesystem::path(c.str("plot.output"));
  write_atomic(out, svg);
  s.out() << "wrote " << out.string() << '\n';
}

// ---------------------------------------------------------------- entry point

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Energy, convexity and gap checks for extreme Kerr and Kerr-Newman harmonic maps"};
  app.set_help_all_flag("--help-all");
  std::string config_path;
  app.add_option("--config", config_path, "key=value configuration file");
  std::map<std::string, std::string> flags;
  for (const auto& k : keys()) app.add_option(k.flag, flags[k.key], k.help);
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : commands()) subs[name] = app.add_subcommand(name)->fallthrough();
  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config " + config_path);
      parse_config(f, config_path, cfg);
    }
    std::string out_dir = cfg.str("output.dir");
    if (const char* env = std::getenv("KERRGAP_OUT"); env && *env) out_dir = env;
    for (const auto& k : keys())
      if (app.get_option(k.flag)->count() > 0) cfg.set(k.key, flags[k.key]);
    if (app.get_option("--out")->count() > 0) out_dir = cfg.str("output.dir");
    cfg.set("output.dir", out_dir);
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) cfg.command = name;
    if (cfg.command.empty()) throw ConfigError("no command given (one of energy, el-check, ...; see --help)");
    if (!subs.count(cfg.command)) throw ConfigError("unknown command '" + cfg.command + "'");

    Session s(cfg, out_dir, out, err);
    s.echo_config();
    const auto& cmd = cfg.command;
    if (cmd == "energy") cmd_energy(cfg, s);
    else if (cmd == "el-check") cmd_el_check(cfg, s);
    else if (cmd == "first-variation") cmd_first_variation(cfg, s);
    else if (cmd == "convexity-sweep") cmd_convexity_sweep(cfg, s);
    else if (cmd == "gap-check") cmd_gap_check(cfg, s);
    else if (cmd == "cutpaste-study") cmd_cutpaste_study(cfg, s);
    else if (cmd == "validate-class") cmd_validate_class(cfg, s);
    else if (cmd == "curvature-audit") cmd_curvature_audit(cfg, s);
    else cmd_plot(cfg, s);
    return s.exit_code();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const CoverageError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return check_failed;
  }
}

}  // namespace kerrgap::cli
