#include "ztl/cli.hpp"
#include "ztl/finite_beta.hpp"
#include "ztl/oracle.hpp"
#include "ztl/renorm.hpp"
#include "ztl/spec_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ztl;

namespace {

std::string example_path(int k) { return std::string(ZTL_DATA_DIR) + "/examples/example" + std::to_string(k) + ".json"; }

System example(int k) { return build_system(load_spec(example_path(k))); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Notes {
 public:
  void fail(const std::string& what) {
    pass_ = false;
    add(what);
  }
  void add(const std::string& what) { items_.push_back(what); }
  void require(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
  Outcome outcome() const {
    std::string d;
    for (std::size_t i = 0; i < items_.size(); ++i) d += (i ? "; " : "") + items_[i];
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  std::vector<std::string> items_;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string run_command(const std::vector<std::string>& args, int& code) {
  std::ostringstream out, err;
  code = run_cli(args, out, err);
  if (code != 0) std::cerr << err.str();
  return out.str();
}

std::vector<double> json_alpha(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  std::vector<double> alpha;
  for (const auto& a : doc["alpha"]) alpha.push_back(a["alpha"].get<double>());
  return alpha;
}

// Rows of a CSV body without the header; the first cell stays a string.
std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.rfind("limit,", 0) == 0) continue;
    std::istringstream row(line);
    std::vector<double> cells;
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(std::stod(cell));
    rows.push_back(cells);
  }
  return rows;
}

int compare_table(const std::vector<std::vector<double>>& got, const std::vector<std::vector<double>>& want,
                  double tol, double& worst, std::vector<std::string>& misses, const std::vector<std::string>& names) {
  int ok = 0;
  worst = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    for (std::size_t a = 0; a < want[i].size(); ++a) {
      double d = std::abs(got[i][a + 1] - want[i][a]);
      worst = std::max(worst, d);
      if (d <= tol) {
        ++ok;
      } else {
        misses.push_back(names[a] + "@k=" + std::to_string(i + 1) + " " + fmt("%.6f", got[i][a + 1]) + " vs " +
                         fmt("%.6f", want[i][a]));
      }
    }
  }
  return ok;
}

Outcome criterion1() {
  Notes n;
  int code = 0;
  auto alpha = json_alpha(run_command({"limit", example_path(1), "--json"}, code));
  n.require(code == 0, "limit exit code " + std::to_string(code));
  const std::vector<double> want{0.5, 0.5, 0.0};
  n.require(alpha.size() == 3, "expected 3 weights");
  for (std::size_t i = 0; i < std::min<std::size_t>(3, alpha.size()); ++i) {
    n.require(std::abs(alpha[i] - want[i]) <= 1e-12, "alpha[" + std::to_string(i) + "] = " + fmt("%.17g", alpha[i]));
  }
  std::string shown;
  for (double a : alpha) shown += (shown.empty() ? "" : ", ") + as_fraction(a);
  n.add("alpha = (" + shown + ")");
  return n.outcome();
}

Outcome criterion2() {
  Notes n;
  System s = example(2);
  auto lim = zero_temperature_limit(s.graph, s.phi, s.psi);
  const auto& lv1 = lim.levels.at(1).sys;
  Digraph xbar(lv1.graph.names(), lv1.report.maximizing_arrows);
  const double rho = eigensystem(transfer_matrix(xbar, zero_psi(xbar))).rho();
  const double poly = std::pow(rho, 4) - 4 * rho * rho - 2 * rho + 1;
  n.require(std::abs(poly) < 1e-9, "polynomial residual " + fmt("%.3e", poly));
  n.add("(a) rho = " + fmt("%.12f", rho) + ", residual " + fmt("%.1e", poly));

  int code = 0;
  auto alpha = json_alpha(run_command({"limit", example_path(2), "--json"}, code));
  const std::vector<double> limit_col{0.273237, 0.273237, 0.374089, 0.079437};
  double worst_alpha = 0.0;
  for (std::size_t i = 0; i < 4; ++i) worst_alpha = std::max(worst_alpha, std::abs(alpha.at(i) - limit_col[i]));
  n.require(code == 0 && worst_alpha <= 5e-6, "(b) alpha off by " + fmt("%.2e", worst_alpha));
  n.add("(b) max |alpha - column| = " + fmt("%.1e", worst_alpha));

  const std::vector<std::vector<double>> table{{0.253298, 0.253298, 0.316672, 0.176732},
                                               {0.259815, 0.259815, 0.349361, 0.131010},
                                               {0.265413, 0.265413, 0.363356, 0.105818},
                                               {0.269011, 0.269011, 0.369239, 0.092738},
                                               {0.271041, 0.271041, 0.371810, 0.086109},
                                               {0.272118, 0.272118, 0.372988, 0.082777}};
  auto rows = csv_rows(run_command({"table", example_path(2), "--betas", "log2:1..6", "--csv", "-"}, code));
  double worst = 0.0;
  std::vector<std::string> misses;
  int ok = compare_table(rows, table, 5e-6, worst, misses, s.graph.names());
  n.require(code == 0 && ok == 24, "(c) " + std::to_string(24 - ok) + " entries off");
  n.add("(c) " + std::to_string(ok) + "/24 entries, worst " + fmt("%.1e", worst));
  return n.outcome();
}

Outcome criterion3() {
  Notes n;
  System s = example(3);
  auto lim = zero_temperature_limit(s.graph, s.phi, s.psi);
  // (a) Second-level potentials against the printed matrices, under both orderings of the two components.
  const double inf = -std::numeric_limits<double>::infinity();
  const double phi_want[2][2] = {{inf, -1}, {-1, -2}};
  const double psi_want[2][2] = {{inf, 0}, {std::log(5.0), std::log(3.0)}};
  bool matched = false;
  std::string best;
  if (lim.levels.size() >= 2 && lim.levels[1].next) {
    const auto& next = *lim.levels[1].next;
    const Digraph& g = next.graph;
    for (int flip = 0; flip < 2 && !matched; ++flip) {
      bool phi_ok = g.size() == 2, psi_ok = g.size() == 2, shape_ok = g.size() == 2;
      std::string diff;
      for (int i = 0; i < 2 && g.size() == 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const int a = flip ? 1 - i : i, b = flip ? 1 - j : j;
          auto k = g.arrow_index(a, b);
          const bool want_absent = std::isinf(phi_want[i][j]);
          if (want_absent || !k) {
            shape_ok = shape_ok && want_absent && !k;
            continue;
          }
          const double phi_got = to_double(next.phi.values[*k]);
          const double psi_got = next.psi.values[*k];
          if (phi_got != phi_want[i][j]) {
            phi_ok = false;
            diff += " phi(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")=" + to_string(next.phi.values[*k]);
          }
          if (std::abs(psi_got - psi_want[i][j]) > 1e-9) {
            psi_ok = false;
            diff += " psi(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")=" + fmt("%.6f", psi_got);
          }
        }
      }
      matched = shape_ok && phi_ok && psi_ok;
      if (shape_ok) best = diff;
    }
  }
  n.require(matched, "(a) second-level potentials differ:" + best);
  if (matched) n.add("(a) second-level potentials match");

  const std::vector<double> want_alpha{1.0 / 6, 1.0 / 6, 1.0 / 6, 0.25, 0.25};
  double worst_alpha = 0.0;
  for (std::size_t i = 0; i < 5; ++i) worst_alpha = std::max(worst_alpha, std::abs(lim.alpha.at(i) - want_alpha[i]));
  n.require(worst_alpha <= 1e-10, "(b) alpha off by " + fmt("%.2e", worst_alpha));
  n.add("(b) max |alpha - (1/6,1/6,1/6,1/4,1/4)| = " + fmt("%.1e", worst_alpha));

  const std::vector<std::vector<double>> table{{0.19273, 0.18399, 0.19326, 0.21312, 0.21690},
                                               {0.18423, 0.17722, 0.18343, 0.22565, 0.22946},
                                               {0.17668, 0.17395, 0.17607, 0.23582, 0.23748},
                                               {0.17200, 0.17115, 0.17176, 0.24227, 0.24282},
                                               {0.16942, 0.16918, 0.16935, 0.24595, 0.24610},
                                               {0.16807, 0.16800, 0.16805, 0.24792, 0.24796}};
  int code = 0;
  auto rows = csv_rows(run_command({"table", example_path(3), "--betas", "log2:1..6", "--csv", "-"}, code));
  double worst = 0.0;
  std::vector<std::string> misses;
  int ok = compare_table(rows, table, 5e-5, worst, misses, s.graph.names());
  std::string miss_list;
  for (const auto& m : misses) miss_list += " " + m;
  n.require(code == 0 && ok == 30, "(c) " + std::to_string(30 - ok) + " entries off:" + miss_list);
  n.add("(c) " + std::to_string(ok) + "/30 entries, worst " + fmt("%.1e", worst));
  return n.outcome();
}

Outcome criterion4() {
  Notes n;
  OracleOptions opt;
  const int count = 240;
  auto t0 = std::chrono::steady_clock::now();
  auto par = oracle_trials(20240601, count, opt, Execution::parallel);
  auto t1 = std::chrono::steady_clock::now();
  auto ser = oracle_trials(20240601, count, opt, Execution::serial);
  auto t2 = std::chrono::steady_clock::now();
  int agree = 0, decrease = 0, resamples = 0;
  double worst = 0.0;
  bool same = true;
  for (int i = 0; i < count; ++i) {
    const auto& t = par[i];
    agree += t.agrees;
    decrease += t.decreases;
    resamples += t.resamples;
    worst = std::max(worst, t.error_hi);
    same = same && t.error_hi == ser[i].error_hi && t.error_lo == ser[i].error_lo;
    if (!t.agrees || !t.decreases) {
      n.fail("trial " + std::to_string(i) + ": err60 " + fmt("%.2e", t.error_hi) + ", err30 " + fmt("%.2e", t.error_lo));
    }
  }
  n.require(same, "parallel and serial trials differ");
  n.add(std::to_string(agree) + "/" + std::to_string(count) + " within 1e-4, " + std::to_string(decrease) + "/" +
        std::to_string(count) + " with err60 <= err30, worst err60 " + fmt("%.1e", worst) + ", " +
        std::to_string(resamples) + " degenerate resampled");
  n.add("parallel " + fmt("%.2f", std::chrono::duration<double>(t1 - t0).count()) + " s, serial " +
        fmt("%.2f", std::chrono::duration<double>(t2 - t1).count()) + " s");
  return n.outcome();
}

Outcome criterion5() {
  Notes n;
  std::mt19937_64 rng(515);
  RandomSystemOptions ro;
  double worst_res = 0.0, worst_norm = 0.0, worst_cyl = 0.0, worst_simplex = 0.0, worst_shift = 0.0,
         worst_cob = 0.0, worst_center = 0.0;
  int systems = 0;
  for (int trial = 0; trial < 120; ++trial) {
    System s = random_system(rng, ro);
    ++systems;
    for (double beta : {0.0, 1.0, 5.0, 20.0}) {
      TransferMatrix m = transfer_matrix(s.graph, s.phi, s.psi, beta);
      Eigensystem e = eigensystem(m);
      worst_res = std::max(worst_res, eigen_residual(m, e));
      double wv = 0.0;
      for (int a = 0; a < s.graph.size(); ++a) wv += e.mass(a);
      worst_norm = std::max(worst_norm, std::abs(wv - 1.0));
      MarkovGibbsMeasure mu(m, e);
      for (int a = 0; a < s.graph.size(); ++a) {
        for (int b = 0; b < s.graph.size(); ++b) {
          double right = 0.0, left = 0.0;
          for (int c = 0; c < s.graph.size(); ++c) {
            right += mu.cylinder({a, b, c});
            left += mu.cylinder({c, a, b});
          }
          const double ab = mu.cylinder({a, b});
          worst_cyl = std::max({worst_cyl, std::abs(right - ab), std::abs(left - ab)});
        }
      }
    }
    auto lim = zero_temperature_limit(s.graph, s.phi, s.psi);
    double total = 0.0, mass = 0.0;
    for (double a : lim.alpha) {
      total += a;
      if (a < 0) worst_simplex = std::max(worst_simplex, -a);
    }
    for (double x : lim.symbol_mass) mass += x;
    worst_simplex = std::max({worst_simplex, std::abs(total - 1.0), std::abs(mass - 1.0)});

    System t = s;
    for (auto& q : t.phi.values) q += Rational(3, 2);
    for (auto& x : t.psi.values) x -= 0.3;
    auto shifted = zero_temperature_limit(t.graph, t.phi, t.psi);
    System c = s;
    std::uniform_int_distribution<int> hq(-3, 3);
    std::uniform_real_distribution<double> hr(-1.0, 1.0);
    std::vector<Rational> h(s.graph.size());
    std::vector<double> k(s.graph.size());
    for (int a = 0; a < s.graph.size(); ++a) {
      h[a] = Rational(hq(rng), 2);
      k[a] = hr(rng);
    }
    for (std::size_t i = 0; i < s.graph.arrow_count(); ++i) {
      const auto& e = s.graph.arrow(i);
      c.phi.values[i] += h[e.to] - h[e.from];
      c.psi.values[i] += k[e.to] - k[e.from];
    }
    auto cob = zero_temperature_limit(c.graph, c.phi, c.psi);
    RenormOptions largest;
    largest.center = CenterRule::largest;
    auto alt = zero_temperature_limit(s.graph, s.phi, s.psi, largest);
    for (int a = 0; a < s.graph.size(); ++a) {
      for (int b = 0; b < s.graph.size(); ++b) {
        const double base = limit_cylinder(lim, std::vector<int>{a, b});
        worst_shift = std::max(worst_shift, std::abs(limit_cylinder(shifted, std::vector<int>{a, b}) - base));
        worst_cob = std::max(worst_cob, std::abs(limit_cylinder(cob, std::vector<int>{a, b}) - base));
        worst_center = std::max(worst_center, std::abs(limit_cylinder(alt, std::vector<int>{a, b}) - base));
      }
    }
    for (std::size_t j = 0; j < lim.alpha.size(); ++j) {
      worst_center = std::max(worst_center, std::abs(alt.alpha[j] - lim.alpha[j]));
    }
  }
  n.require(worst_res < 1e-12, "eigen residual " + fmt("%.2e", worst_res));
  n.require(worst_norm <= 1e-12, "w'v - 1 = " + fmt("%.2e", worst_norm));
  n.require(worst_cyl <= 1e-10, "cylinder consistency " + fmt("%.2e", worst_cyl));
  n.require(worst_simplex <= 1e-10, "weight simplex " + fmt("%.2e", worst_simplex));
  n.require(worst_shift <= 1e-9, "constant shift " + fmt("%.2e", worst_shift));
  n.require(worst_cob <= 1e-9, "coboundary " + fmt("%.2e", worst_cob));
  n.require(worst_center <= 1e-9, "central vertex " + fmt("%.2e", worst_center));

  // Entrywise perturbations within e^{+-eta}.
  double worst_ratio = 0.0;
  int violations = 0;
  for (int pair = 0; pair < 100; ++pair) {
    System s = random_system(rng, ro);
    TransferMatrix m = transfer_matrix(s.graph, s.phi, s.psi, 1.5);
    const double eta = 0.0001 * (pair + 1);
    std::uniform_real_distribution<double> u(-eta, eta);
    std::vector<double> logs = m.log_entries();
    for (auto& x : logs) x += u(rng);
    TransferMatrix m2(s.graph, logs);
    Eigensystem e1 = eigensystem(m), e2 = eigensystem(m2);
    const int size = s.graph.size();
    const double bound = 2.0 * (size - 1) * eta;
    double dr = std::abs(e2.log_rho - e1.log_rho);
    bool ok = dr <= eta + 1e-13;
    for (int a = 0; a < size; ++a) {
      double dv = std::abs((e2.log_v[a] - e2.log_v[0]) - (e1.log_v[a] - e1.log_v[0]));
      double dw = std::abs((e2.log_w[a] - e2.log_w[0]) - (e1.log_w[a] - e1.log_w[0]));
      ok = ok && dv <= bound + 1e-12 && dw <= bound + 1e-12;
      if (bound > 0) worst_ratio = std::max(worst_ratio, std::max(dv, dw) / bound);
    }
    violations += !ok;
  }
  n.require(violations == 0, std::to_string(violations) + " projective-stability violations");
  n.add(std::to_string(systems) + " systems: residual " + fmt("%.1e", worst_res) + ", w'v " + fmt("%.1e", worst_norm) +
        ", cylinders " + fmt("%.1e", worst_cyl) + ", simplex " + fmt("%.1e", worst_simplex) + ", shift " +
        fmt("%.1e", worst_shift) + ", coboundary " + fmt("%.1e", worst_cob) + ", center " + fmt("%.1e", worst_center) +
        "; 100 perturbation pairs, max used fraction of bound " + fmt("%.2f", worst_ratio));
  return n.outcome();
}

Outcome criterion6() {
  Notes n;
  int fits = 0, sandwiches = 0;
  double steepest = -1e300;
  for (int k = 1; k <= 3; ++k) {
    System s = example(k);
    auto lim = zero_temperature_limit(s.graph, s.phi, s.psi);
    const auto& sys = lim.levels.front().sys;
    auto decay = decay_report(sys.graph, sys.phi, sys.psi, lim, 5.0, 30.0, sys.graph.names());
    // Symbols without a fit have error below the floor on the whole window, apart from at most two points.
    std::vector<std::string> fitted;
    for (const auto& f : decay.fits) {
      ++fits;
      fitted.push_back(f.cylinder);
      steepest = std::max(steepest, f.slope);
      n.require(f.slope < 0.0, "example " + std::to_string(k) + " symbol " + f.cylinder + " slope " + fmt("%.3g", f.slope));
    }
    for (int a = 0; a < sys.graph.size(); ++a) {
      if (std::find(fitted.begin(), fitted.end(), sys.graph.name(a)) != fitted.end()) continue;
      auto mu = equilibrium_state(sys.graph, sys.phi, sys.psi, 5.0);
      const double err = std::abs(mu.mass(a) - lim.symbol_mass[a]);
      n.require(err <= 1e-14, "example " + std::to_string(k) + " symbol " + sys.graph.name(a) + " has no fit but error " +
                                  fmt("%.2e", err));
    }
    if (!sys.report.phi_gap) continue;
    const double gap = to_double(*sys.report.phi_gap);
    EigenOptions eo;
    eo.method = EigenMethod::precise;
    const std::vector<double> betas{20, 25, 30, 40, 60};
    auto lr = spectral_radius_check(sys, betas, eo);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      ++sandwiches;
      const double upper = std::log1p(std::exp(betas[i] * gap / 2.0));
      n.require(lr[i] > 0.0 && lr[i] <= upper, "example " + std::to_string(k) + " beta " + fmt("%g", betas[i]) +
                                                   " log rho " + fmt("%.3e", lr[i]) + " bound " + fmt("%.3e", upper));
    }
  }
  n.add(std::to_string(fits) + " decay fits, largest slope " + fmt("%.3f", steepest) + "; " + std::to_string(sandwiches) +
        " spectral sandwiches");
  return n.outcome();
}

struct Criterion {
  int id;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{{1, 1, criterion1},  {2, 5, criterion2},   {3, 5, criterion3},
                                   {4, 60, criterion4}, {5, 30, criterion5}, {6, 10, criterion6}};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  bool all_pass = true;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += "; over time budget of " + fmt("%g", c.budget_s) + " s";
    }
    std::printf("criterion %d: %s  %s [%.2f s]\n", c.id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
