#pragma once

#include "ztl/maximize.hpp"
#include "ztl/perron.hpp"
#include "ztl/potential.hpp"

#include <string>
#include <vector>

namespace ztl {

struct NormalizeOptions {
  double eps_rho = 1e-9;
  EigenOptions eig;
  MaximizeOptions max;
};

struct NormalizedSystem {
  Digraph graph;
  PotentialPhi phi;  // maximal circuit mean 0
  PotentialPsi psi;  // maximal component pressure on the maximizing subshift 0
  MaximizationReport report;  // expressed for the normalized phi
  Rational phi_bar_original;
  double psi_pressure_on_xbar = 0.0;  // before normalization
  ComponentDecomposition xbar;        // decomposition of the maximizing subgraph
  std::vector<int> xbar_transitive;   // indices of transitive components in xbar
  std::vector<double> component_log_rho;  // per entry of xbar_transitive, after normalization
  std::vector<std::string> warnings;
};

NormalizedSystem normalize(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi,
                           const NormalizeOptions& opt = {});

}  // namespace ztl
