#include "ztl/normalize.hpp"

#include <algorithm>
#include <cstdio>

namespace ztl {

namespace {

std::string vertex_list(const Digraph& g, const std::vector<int>& vs) {
  std::string s = "{";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ",";
    s += g.name(vs[i]);
  }
  return s + "}";
}

}  // namespace

NormalizedSystem normalize(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi,
                           const NormalizeOptions& opt) {
  check_potentials(g, phi, psi);
  NormalizedSystem out;
  out.graph = g;
  out.report = maximize(g, phi, opt.max);
  out.phi_bar_original = out.report.phi_bar;

  out.phi.values = phi.values;
  for (auto& q : out.phi.values) q -= out.phi_bar_original;
  out.report.phi_bar = 0;
  for (auto& q : out.report.circuit_means) q -= out.phi_bar_original;
  if (out.report.phi_gap) *out.report.phi_gap -= out.phi_bar_original;

  out.xbar = decompose(out.report.maximizing_subgraph);
  out.xbar_transitive = out.xbar.transitive();
  TransferMatrix mpsi = transfer_matrix(g, psi);
  std::vector<double> logs;
  for (int c : out.xbar_transitive) {
    const auto& comp = out.xbar.components[c];
    Restriction r = restrict_to(g, comp.vertices, comp.arrows);
    logs.push_back(eigensystem(restrict_matrix(mpsi, r), opt.eig).log_rho);
  }
  double top = *std::max_element(logs.begin(), logs.end());
  out.psi_pressure_on_xbar = top;
  out.psi.values = psi.values;
  for (auto& x : out.psi.values) x -= top;
  for (auto& x : logs) x -= top;
  out.component_log_rho = logs;

  for (std::size_t i = 0; i < logs.size(); ++i) {
    double gap = -logs[i];
    if (gap > opt.eps_rho && gap < 10.0 * opt.eps_rho) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", gap);
      out.warnings.push_back("near-tie pressure: component " +
                             vertex_list(g, out.xbar.components[out.xbar_transitive[i]].vertices) +
                             " is below the maximum by " + buf);
    }
  }
  return out;
}

}  // namespace ztl
