#include "ztl/cli.hpp"

#include "ztl/error.hpp"
#include "ztl/finite_beta.hpp"
#include "ztl/renorm.hpp"
#include "ztl/spec_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ztl {

using nlohmann::json;

namespace {

std::string fixed6(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string set_text(const Digraph& g, const std::vector<int>& vs) {
  std::string s = "{";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ",";
    s += g.name(vs[i]);
  }
  return s + "}";
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse_error:
    case ErrorKind::duplicate_symbol:
    case ErrorKind::dangling_arrow_endpoint:
    case ErrorKind::empty_alphabet:
    case ErrorKind::inconsistent_word_set:
    case ErrorKind::empty_language:
    case ErrorKind::symbol_not_in_alphabet:
    case ErrorKind::bad_period_multiple:
    case ErrorKind::degenerate_window:
      return exit_parse;
    case ErrorKind::no_circuit:
      return exit_no_circuit;
    case ErrorKind::not_irreducible:
    case ErrorKind::renormalized_not_irreducible:
      return exit_irreducibility;
    default:
      return exit_other;
  }
}

struct Settings {
  std::string file;
  double tol = 1e-9;
  bool json_out = false;
  std::string csv;
  std::string betas = "log2:1..6";
  std::string cylinders;
  std::string window = "5:30";
  bool permute_alpha = false;
};

RenormOptions renorm_options(const Settings& s) {
  RenormOptions opt;
  opt.normalize.eps_rho = s.tol;
  return opt;
}

System load_system(const Settings& s) { return build_system(load_spec(s.file)); }

json analysis_json(const NormalizedSystem& sys, const HeavyDecomposition& heavy) {
  const Digraph& g = sys.graph;
  json out;
  out["phi_bar"] = to_string(sys.phi_bar_original);
  json means = json::array();
  for (const auto& q : sys.report.circuit_means) means.push_back(to_string(q + sys.phi_bar_original));
  out["circuit_means"] = means;
  out["circuit_means_complete"] = sys.report.circuit_means_complete;
  out["phi_g"] = sys.report.phi_gap ? json(to_string(*sys.report.phi_gap + sys.phi_bar_original)) : json(nullptr);
  out["psi_pressure_on_xbar"] = sys.psi_pressure_on_xbar;
  json comps = json::array();
  for (const auto& c : heavy.components) {
    json names = json::array();
    for (int v : c.vertices) names.push_back(g.name(v));
    json arrows = json::array();
    for (const auto& e : c.arrows) arrows.push_back({g.name(e.from), g.name(e.to)});
    int period = sys.xbar.components[sys.xbar.component_of[c.vertices.front()]].period;
    comps.push_back({{"vertices", names}, {"arrows", arrows}, {"period", period},
                     {"log_rho", c.log_rho + sys.psi_pressure_on_xbar}, {"heavy", c.heavy}});
  }
  out["xbar_components"] = comps;
  out["n_heavy"] = heavy.n_heavy;
  out["warnings"] = sys.warnings;
  return out;
}

int cmd_analyze(const Settings& s, std::ostream& out) {
  System sys0 = load_system(s);
  RenormOptions opt = renorm_options(s);
  NormalizedSystem sys = normalize(sys0.graph, sys0.phi, sys0.psi, opt.normalize);
  HeavyDecomposition heavy = heavy_components(sys, opt);
  if (s.json_out) {
    out << analysis_json(sys, heavy).dump(2) << "\n";
    return exit_ok;
  }
  const Digraph& g = sys.graph;
  out << "phi_bar = " << to_string(sys.phi_bar_original) << "\n";
  out << "E_phi = {";
  for (std::size_t i = 0; i < sys.report.circuit_means.size(); ++i) {
    out << (i ? ", " : "") << to_string(sys.report.circuit_means[i] + sys.phi_bar_original);
  }
  out << "}" << (sys.report.circuit_means_complete ? "" : " (enumeration capped)") << "\n";
  if (sys.report.phi_gap) {
    out << "phi_g = " << to_string(*sys.report.phi_gap + sys.phi_bar_original) << "\n";
  } else {
    out << "phi_g = none (single circuit mean)\n";
  }
  out << "max psi-pressure on maximizing subshift = " << fixed6(sys.psi_pressure_on_xbar) << "\n";
  out << "maximizing components:\n";
  for (const auto& c : heavy.components) {
    int period = sys.xbar.components[sys.xbar.component_of[c.vertices.front()]].period;
    out << "  " << set_text(g, c.vertices) << "  period " << period << "  pressure "
        << fixed6(c.log_rho + sys.psi_pressure_on_xbar) << (c.heavy ? "  heavy" : "") << "\n";
  }
  out << "heavy components: " << heavy.n_heavy << " of " << heavy.n_total << "\n";
  for (const auto& w : sys.warnings) out << "warning: " << w << "\n";
  return exit_ok;
}

int cmd_limit(const Settings& s, std::ostream& out) {
  System sys = load_system(s);
  ZeroTemperatureLimit lim = zero_temperature_limit(sys.graph, sys.phi, sys.psi, renorm_options(s));
  if (s.json_out) {
    out << limit_report(lim).dump(2) << "\n";
    return exit_ok;
  }
  const Digraph& g = lim.graph();
  const auto& heavy = lim.heavy();
  out << "renormalization levels: " << lim.levels.size() << "\n";
  out << "alpha:\n";
  for (int j = 0; j < heavy.n_heavy; ++j) {
    out << "  " << set_text(g, heavy.components[j].vertices) << "  " << fixed6(lim.alpha[j]);
    std::string frac = as_fraction(lim.alpha[j]);
    if (!frac.empty()) out << "  = " << frac;
    out << "\n";
  }
  out << "limit marginals:\n";
  for (int a = 0; a < g.size(); ++a) {
    out << "  " << g.name(a) << "  " << fixed6(lim.symbol_mass[a]);
    std::string frac = as_fraction(lim.symbol_mass[a]);
    if (!frac.empty()) out << "  = " << frac;
    out << "\n";
  }
  for (std::size_t k = 0; k < lim.levels.size(); ++k) {
    for (const auto& w : lim.levels[k].sys.warnings) out << "warning: level " << k << ": " << w << "\n";
  }
  return exit_ok;
}

std::vector<std::string> cylinder_list(const Settings& s, const Digraph& g) {
  std::vector<std::string> cyl;
  if (s.cylinders.empty()) {
    cyl = g.names();
  } else {
    std::stringstream ss(s.cylinders);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) cyl.push_back(item);
    }
  }
  return cyl;
}

int cmd_table(const Settings& s, std::ostream& out) {
  System sys = load_system(s);
  ZeroTemperatureLimit lim = zero_temperature_limit(sys.graph, sys.phi, sys.psi, renorm_options(s));
  std::vector<double> betas = parse_betas(s.betas);
  BetaSweep sweep = beta_sweep(sys.graph, sys.phi, sys.psi, betas, cylinder_list(s, sys.graph), lim);
  std::string csv = to_csv(sweep);
  if (s.csv == "-") {
    out << csv;
    return exit_ok;
  }
  if (!s.csv.empty()) {
    std::ofstream f(s.csv, std::ios::binary);
    if (!f) throw Error(ErrorKind::parse_error, "--csv: cannot write " + s.csv);
    f << csv;
  }
  out << "beta";
  for (const auto& c : sweep.cylinders) out << "\t" << c;
  out << "\n";
  for (std::size_t i = 0; i < sweep.betas.size(); ++i) {
    out << fixed6(sweep.betas[i]);
    for (double v : sweep.values[i]) out << "\t" << fixed6(v);
    out << "\n";
  }
  out << "limit";
  for (double v : sweep.limit_row) out << "\t" << fixed6(v);
  out << "\n";
  return exit_ok;
}

int cmd_check(const Settings& s, std::ostream& out) {
  double lo = 0, hi = 0;
  {
    auto colon = s.window.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::parse_error, "--beta-window: expected lo:hi");
    try {
      lo = std::stod(s.window.substr(0, colon));
      hi = std::stod(s.window.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::parse_error, "--beta-window: expected lo:hi");
    }
  }
  System sys0 = load_system(s);
  ZeroTemperatureLimit lim = zero_temperature_limit(sys0.graph, sys0.phi, sys0.psi, renorm_options(s));
  if (s.permute_alpha) std::reverse(lim.alpha.begin(), lim.alpha.end());
  const NormalizedSystem& sys = lim.levels.front().sys;
  const HeavyDecomposition& heavy = lim.heavy();
  const Digraph& g = sys.graph;
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS  " : "FAIL  ") << name << "  " << detail << "\n";
    all_ok = all_ok && ok;
  };

  std::vector<std::string> symbols = g.names();
  DecayReport decay = decay_report(g, sys.phi, sys.psi, lim, lo, hi, symbols);
  for (const auto& f : decay.fits) {
    report("decay[" + f.cylinder + "]", f.slope < 0.0, "slope " + std::to_string(f.slope) + " over " +
                                                          std::to_string(f.points) + " points");
  }

  MarkovGibbsMeasure mu_hi = equilibrium_state(g, sys.phi, sys.psi, hi);
  for (int a = 0; a < g.size(); ++a) {
    double err = std::abs(mu_hi.mass(a) - limit_cylinder(lim, std::vector<int>{a}));
    char buf[96];
    std::snprintf(buf, sizeof buf, "|mu(%s) - limit| = %.3e at beta %g", g.name(a).c_str(), err, hi);
    report("agreement[" + g.name(a) + "]", err < 1e-3, buf);
  }

  std::vector<double> grid;
  for (int i = 0; i < 6; ++i) grid.push_back(lo + (hi - lo) * i / 5.0);
  std::vector<double> outside = concentration_check(sys, heavy, grid);
  bool mono = true;
  for (std::size_t i = 1; i < outside.size(); ++i) mono = mono && outside[i] <= outside[i - 1] * (1 + 1e-9) + 1e-15;
  {
    char buf[96];
    std::snprintf(buf, sizeof buf, "outside mass %.3e -> %.3e", outside.front(), outside.back());
    report("concentration", mono, buf);
  }

  if (sys.report.phi_gap) {
    double gap = to_double(*sys.report.phi_gap);
    std::vector<double> sandwich_betas;
    for (double b : grid) {
      if (b >= 20.0) sandwich_betas.push_back(b);
    }
    EigenOptions eo;
    eo.method = EigenMethod::precise;
    std::vector<double> log_rho = spectral_radius_check(sys, sandwich_betas, eo);
    for (std::size_t i = 0; i < sandwich_betas.size(); ++i) {
      const double b = sandwich_betas[i], lr = log_rho[i];
      double upper = std::log1p(std::exp(b * gap / 2.0));
      char buf[128];
      std::snprintf(buf, sizeof buf, "beta %g: 0 < log rho = %.3e <= %.3e", b, lr, upper);
      report("spectral", lr > 0.0 && lr <= upper, buf);
    }
  }

  for (const auto& c : excursion_series_check(sys, heavy, hi)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "finite %.9f limit %.9f", c.finite, c.limit);
    report("excursion[" + g.name(c.vertex) + "]", c.difference <= 1e-4 * std::max(1.0, c.limit), buf);
  }

  out << (all_ok ? "all checks passed\n" : "some checks failed\n");
  return all_ok ? exit_ok : exit_property;
}

}  // namespace

std::vector<double> parse_betas(const std::string& text) {
  std::vector<double> out;
  auto fail = [&] { throw Error(ErrorKind::parse_error, "--betas: cannot parse \"" + text + "\""); };
  if (text.rfind("log2:", 0) == 0) {
    std::string range = text.substr(5);
    auto dots = range.find("..");
    if (dots == std::string::npos) fail();
    long k1 = 0, k2 = 0;
    try {
      k1 = std::stol(range.substr(0, dots));
      k2 = std::stol(range.substr(dots + 2));
    } catch (const std::exception&) {
      fail();
    }
    if (k2 < k1) fail();
    for (long k = k1; k <= k2; ++k) out.push_back(static_cast<double>(k) * std::log(2.0));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double b = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(b) || b < 0) fail();
      out.push_back(b);
    } catch (const std::invalid_argument&) {
      fail();
    } catch (const std::out_of_range&) {
      fail();
    }
  }
  if (out.empty()) fail();
  return out;
}

std::string as_fraction(double x, long max_den) {
  if (!std::isfinite(x)) return "";
  for (long q = 1; q <= max_den; ++q) {
    double p = std::round(x * q);
    if (std::abs(p / q - x) < 1e-12) {
      if (q == 1) return std::to_string(static_cast<long>(p));
      return std::to_string(static_cast<long>(p)) + "/" + std::to_string(q);
    }
  }
  return "";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-temperature limits of Gibbs states on subshifts of finite type"};
  app.require_subcommand(1);
  Settings s;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("spec", s.file, "system description (JSON)")->required();
    sub->add_option("--tol", s.tol, "pressure tie tolerance");
  };
  auto* analyze = app.add_subcommand("analyze", "maximizing set, circuit means and pressures");
  add_common(analyze);
  analyze->add_flag("--json", s.json_out, "machine-readable output");
  auto* limit = app.add_subcommand("limit", "zero-temperature limit");
  add_common(limit);
  limit->add_flag("--json", s.json_out, "machine-readable output");
  auto* table = app.add_subcommand("table", "finite-beta cylinder table");
  add_common(table);
  table->add_option("--betas", s.betas, "comma list or log2:k1..k2");
  table->add_option("--cylinders", s.cylinders, "comma list of words");
  table->add_option("--csv", s.csv, "write CSV to this path ('-' for stdout)");
  auto* check = app.add_subcommand("check", "verify the limit against finite beta");
  add_common(check);
  check->add_option("--beta-window", s.window, "lo:hi");
  check->add_flag("--permute-alpha", s.permute_alpha)->group("");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_parse;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(s, out);
    if (limit->parsed()) return cmd_limit(s, out);
    if (table->parsed()) return cmd_table(s, out);
    if (check->parsed()) return cmd_check(s, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_other;
  }
  return exit_other;
}

}  // namespace ztl
