#pragma once

#include "ztl/digraph.hpp"
#include "ztl/potential.hpp"
#include "ztl/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace ztl {

struct MaximizationReport {
  Rational phi_bar;
  std::vector<Rational> circuit_means;  // E_phi, ascending
  bool circuit_means_complete = true;   // false when enumeration hit its cap
  std::optional<Rational> phi_gap;      // second largest circuit mean
  std::vector<Arrow> maximizing_arrows;
  std::vector<int> maximizing_vertices;
  Digraph maximizing_subgraph;  // same vertex set as the host, arrows = maximizing arrows
  std::vector<PathRec> witnesses;
};

struct MaximizeOptions {
  bool enumerate_means = true;
  std::size_t circuit_cap = 200000;
};

// Karp's maximum cycle mean per strong component plus a zero-cycle test on
// the normalized weights for the maximizing arrows.
MaximizationReport maximize(const Digraph& g, const PotentialPhi& phi, const MaximizeOptions& opt = {});

// Same report computed by enumerating all elementary circuits.
MaximizationReport maximize_by_enumeration(const Digraph& g, const PotentialPhi& phi);

Rational max_cycle_mean(const Digraph& g, const PotentialPhi& phi);

}  // namespace ztl
