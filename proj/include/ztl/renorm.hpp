#pragma once

#include "ztl/normalize.hpp"
#include "ztl/perron.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ztl {

enum class CenterRule { smallest, largest };

struct RenormOptions {
  NormalizeOptions normalize;
  CenterRule center = CenterRule::smallest;
  std::size_t path_cap = 10000;  // maximizing paths listed per vertex pair
};

struct XbarComponent {
  std::vector<int> vertices;
  std::vector<Arrow> arrows;
  double log_rho = 0.0;  // normalized pressure
  bool heavy = false;
  Restriction view;      // local relabelling of the component
  MarkovGibbsMeasure nu; // psi-measure on the local digraph
};

struct HeavyDecomposition {
  std::vector<XbarComponent> components;  // heavy components first
  int n_total = 0;
  int n_heavy = 0;
  std::vector<Arrow> heavy_arrow_union;
  std::vector<int> heavy_of_vertex;      // -1 outside heavy components
  std::vector<int> component_of_vertex;  // -1 outside transitive components of the maximizing subgraph
};

HeavyDecomposition heavy_components(const NormalizedSystem& sys, const RenormOptions& opt = {});

struct CentralTerms {
  std::vector<int> center;                     // per heavy component
  std::vector<std::optional<Rational>> phi_ell;  // per vertex, set on heavy vertices
};

CentralTerms central_terms(const NormalizedSystem& sys, const HeavyDecomposition& heavy,
                           CenterRule rule = CenterRule::smallest);

struct TransitionTerm {
  int a = 0;
  int c = 0;
  Rational phi_r;      // maximal phi over excursions a -> c
  double weight = 0.0; // sum of exp(psi) over all phi-maximal excursion walks
  std::vector<PathRec> maximizing_paths;
  bool paths_complete = true;
  std::vector<double> pressure_per_path;
};

struct TransitionData {
  std::vector<TransitionTerm> terms;  // sorted by (a, c); only finite phi_r
  const TransitionTerm* find(int a, int c) const;
};

TransitionData transition_data(const NormalizedSystem& sys, const HeavyDecomposition& heavy,
                               const RenormOptions& opt = {});

// (J,K) is an arrow iff some excursion leaves J and enters K: a path whose
// arrows avoid the heavy arrows and whose interior avoids heavy vertices.
Digraph renormalized_sft(const NormalizedSystem& sys, const HeavyDecomposition& heavy);

// Sum over interior vertices b_i of log G_i(b_i,b_i), where G_i is the return
// series of the psi-matrix on b_i's maximizing component with b_1..b_{i-1}
// removed. An excursion without interior vertices gives 0.
double transition_pressure(const NormalizedSystem& sys, const HeavyDecomposition& heavy, const PathRec& path);

struct RenormalizedSystem {
  std::vector<std::string> alphabet;
  Digraph graph;
  PotentialPhi phi;
  PotentialPsi psi;
  std::vector<std::vector<std::pair<int, int>>> argmax_pairs;  // per arrow of graph
};

RenormalizedSystem renormalized_potentials(const NormalizedSystem& sys, const HeavyDecomposition& heavy,
                                           const CentralTerms& central, const TransitionData& trans,
                                           const Digraph& g_prime);

struct RenormLevel {
  NormalizedSystem sys;
  HeavyDecomposition heavy;
  CentralTerms central;
  std::optional<TransitionData> transitions;
  std::optional<RenormalizedSystem> next;  // absent on the last level
  std::vector<double> vertex_mass;         // limit mass of each vertex of this level
};

// One renormalization step followed by maximize + normalize on the new system.
NormalizedSystem renormalize(const NormalizedSystem& sys, const RenormOptions& opt = {});

struct ZeroTemperatureLimit {
  std::vector<RenormLevel> levels;
  std::vector<double> alpha;     // per heavy component of level 0
  std::vector<int> eliminated;   // heavy components with alpha = 0
  std::vector<double> symbol_mass;  // limit mass of each level-0 vertex

  const HeavyDecomposition& heavy() const { return levels.front().heavy; }
  const Digraph& graph() const { return levels.front().sys.graph; }
};

ZeroTemperatureLimit zero_temperature_limit(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi,
                                            const RenormOptions& opt = {});

double limit_cylinder(const ZeroTemperatureLimit& lim, const std::vector<int>& word);
double limit_cylinder(const ZeroTemperatureLimit& lim, std::string_view word);

}  // namespace ztl
