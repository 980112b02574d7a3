#include "ztl/finite_beta.hpp"

#include "ztl/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numeric>

namespace ztl {

MarkovGibbsMeasure equilibrium_state(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi, double beta,
                                     const EigenOptions& opt) {
  TransferMatrix m = transfer_matrix(g, phi, psi, beta);
  Eigensystem e = eigensystem(m, opt);
  return MarkovGibbsMeasure(std::move(m), std::move(e));
}

namespace {

struct ScaledPower {
  Eigen::MatrixXd b;  // A^k = b * exp(log_factor)
  double log_factor = 0.0;
};

void rescale(ScaledPower& x) {
  double mx = x.b.maxCoeff();
  if (mx > 0.0) {
    x.b /= mx;
    x.log_factor += std::log(mx);
  }
}

ScaledPower power(const Eigen::MatrixXd& a, long k) {
  ScaledPower result{Eigen::MatrixXd::Identity(a.rows(), a.cols()), 0.0};
  ScaledPower base{a, 0.0};
  rescale(base);
  while (k > 0) {
    if (k & 1) {
      result.b = result.b * base.b;
      result.log_factor += base.log_factor;
      rescale(result);
    }
    k >>= 1;
    if (k > 0) {
      base.b = base.b * base.b;
      base.log_factor *= 2.0;
      rescale(base);
    }
  }
  return result;
}

}  // namespace

double periodic_approximation(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi, double beta, int p,
                              const std::vector<int>& word) {
  if (!is_irreducible(g)) throw Error(ErrorKind::not_irreducible, "system graph is not irreducible");
  std::vector<int> all(g.size());
  std::iota(all.begin(), all.end(), 0);
  int period = cyclic_structure(g, all).first;
  const int n = static_cast<int>(word.size()) - 1;
  if (word.empty()) throw Error(ErrorKind::symbol_not_in_alphabet, "empty word");
  if (p <= n + 1 || p % period != 0) {
    throw Error(ErrorKind::bad_period_multiple,
                "p = " + std::to_string(p) + " must exceed the word length and be a multiple of " + std::to_string(period));
  }
  TransferMatrix m = transfer_matrix(g, phi, psi, beta);
  Eigen::MatrixXd a = m.dense_scaled();
  double lognum = 0.0;
  for (int i = 0; i < n; ++i) {
    auto k = g.arrow_index(word[i], word[i + 1]);
    if (!k) return 0.0;
    lognum += m.log_entry(*k) - m.log_scale();
  }
  ScaledPower tail = power(a, p - n);
  double closing = tail.b(word.back(), word.front());
  if (closing <= 0.0) return 0.0;
  lognum += std::log(closing) + tail.log_factor;
  ScaledPower full = power(a, p);
  double logden = std::log(full.b.trace()) + full.log_factor;
  return std::exp(lognum - logden);
}

BetaSweep beta_sweep(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi, const std::vector<double>& betas,
                     const std::vector<std::string>& cylinders, const ZeroTemperatureLimit& limit, Execution exec) {
  BetaSweep out;
  out.betas = betas;
  std::sort(out.betas.begin(), out.betas.end());
  out.cylinders = cylinders;
  std::vector<std::vector<int>> words;
  for (const auto& c : cylinders) words.push_back(parse_word(g, c));
  for (const auto& w : words) out.limit_row.push_back(limit_cylinder(limit, w));
  out.values.assign(out.betas.size(), std::vector<double>(words.size(), 0.0));

  auto row = [&](std::size_t i) {
    MarkovGibbsMeasure mu = equilibrium_state(g, phi, psi, out.betas[i]);
    for (std::size_t j = 0; j < words.size(); ++j) out.values[i][j] = mu.cylinder(words[j]);
  };
  const long count = static_cast<long>(out.betas.size());
  if (exec == Execution::serial) {
    for (long i = 0; i < count; ++i) row(static_cast<std::size_t>(i));
    return out;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      row(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(ztl_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::string to_csv(const BetaSweep& sweep) {
  auto num = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  std::string s = "beta";
  for (const auto& c : sweep.cylinders) s += "," + c;
  s += "\n";
  for (std::size_t i = 0; i < sweep.betas.size(); ++i) {
    s += num(sweep.betas[i]);
    for (double v : sweep.values[i]) s += "," + num(v);
    s += "\n";
  }
  s += "limit";
  for (double v : sweep.limit_row) s += "," + num(v);
  s += "\n";
  return s;
}

DecayReport decay_report(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi,
                         const ZeroTemperatureLimit& limit, double beta_lo, double beta_hi,
                         const std::vector<std::string>& cylinders, int samples) {
  if (!(beta_hi > beta_lo) || samples < 3) throw Error(ErrorKind::degenerate_window, "window needs lo < hi and 3 samples");
  double phimax = 0.0;
  for (const auto& q : phi.values) phimax = std::max(phimax, std::abs(to_double(q)));
  if (beta_hi * phimax > 700.0) throw Error(ErrorKind::degenerate_window, "window exceeds the numerically safe range");
  DecayReport rep;
  rep.beta_lo = beta_lo;
  rep.beta_hi = beta_hi;
  std::vector<std::vector<int>> words;
  std::vector<double> lim;
  for (const auto& c : cylinders) {
    words.push_back(parse_word(g, c));
    lim.push_back(limit_cylinder(limit, words.back()));
  }
  std::vector<std::vector<std::pair<double, double>>> pts(words.size());
  for (int i = 0; i < samples; ++i) {
    double beta = beta_lo + (beta_hi - beta_lo) * i / (samples - 1);
    MarkovGibbsMeasure mu = equilibrium_state(g, phi, psi, beta);
    for (std::size_t j = 0; j < words.size(); ++j) {
      double err = std::abs(mu.cylinder(words[j]) - lim[j]);
      if (err > 1e-14) pts[j].push_back({beta, std::log(err)});
    }
  }
  for (std::size_t j = 0; j < words.size(); ++j) {
    const auto& p = pts[j];
    if (p.size() < 3) continue;
    double mx = 0, my = 0;
    for (auto [x, y] : p) {
      mx += x;
      my += y;
    }
    mx /= p.size();
    my /= p.size();
    double sxy = 0, sxx = 0;
    for (auto [x, y] : p) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    DecayFit fit;
    fit.cylinder = cylinders[j];
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.points = static_cast<int>(p.size());
    rep.fits.push_back(fit);
  }
  return rep;
}

std::vector<double> concentration_check(const NormalizedSystem& sys, const HeavyDecomposition& heavy,
                                        const std::vector<double>& betas) {
  std::vector<double> out;
  for (double beta : betas) {
    MarkovGibbsMeasure mu = equilibrium_state(sys.graph, sys.phi, sys.psi, beta);
    double s = 0.0;
    for (int a = 0; a < sys.graph.size(); ++a) {
      if (heavy.heavy_of_vertex[a] < 0) s += mu.mass(a);
    }
    out.push_back(s);
  }
  return out;
}

std::vector<double> spectral_radius_check(const NormalizedSystem& sys, const std::vector<double>& betas,
                                          const EigenOptions& opt) {
  std::vector<double> out;
  for (double beta : betas) out.push_back(eigensystem(transfer_matrix(sys.graph, sys.phi, sys.psi, beta), opt).log_rho);
  return out;
}

std::vector<ExcursionComparison> excursion_series_check(const NormalizedSystem& sys, const HeavyDecomposition& heavy,
                                                        double beta) {
  const Digraph& g = sys.graph;
  TransferMatrix m = transfer_matrix(g, sys.phi, sys.psi, beta);
  double log_rho = eigensystem(m).log_rho;
  std::vector<int> outside;
  for (int a = 0; a < g.size(); ++a) {
    if (heavy.heavy_of_vertex[a] < 0) outside.push_back(a);
  }
  std::vector<ExcursionComparison> out;
  if (outside.empty()) return out;
  std::vector<Arrow> arrows;
  for (const auto& e : g.arrows()) {
    if (heavy.heavy_of_vertex[e.from] < 0 && heavy.heavy_of_vertex[e.to] < 0) arrows.push_back(e);
  }
  Restriction r = restrict_to(g, outside, arrows);
  std::vector<double> logs;
  for (auto k : r.global_arrow) logs.push_back(m.log_entry(k) - log_rho);
  TransferMatrix tilde(r.local, logs);
  TransferMatrix mpsi = transfer_matrix(g, sys.psi);
  for (std::size_t i = 0; i < outside.size(); ++i) {
    int a = outside[i];
    ExcursionComparison c;
    c.vertex = a;
    c.finite = return_series(tilde, static_cast<int>(i));
    int j = heavy.component_of_vertex[a];
    if (j >= 0) {
      const auto& comp = heavy.components[j];
      Restriction rj = restrict_to(g, comp.vertices, comp.arrows);
      int local = static_cast<int>(std::lower_bound(rj.global_vertex.begin(), rj.global_vertex.end(), a) - rj.global_vertex.begin());
      c.limit = return_series(restrict_matrix(mpsi, rj), local);
    } else {
      c.limit = 1.0;
    }
    c.difference = std::abs(c.finite - c.limit);
    out.push_back(c);
  }
  return out;
}

}  // namespace ztl
