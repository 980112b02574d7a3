#pragma once

#include "ztl/digraph.hpp"
#include "ztl/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace ztl {

// Potentials are stored per arrow, aligned with Digraph::arrows().
struct PotentialPhi {
  std::vector<Rational> values;
};

struct PotentialPsi {
  std::vector<double> values;
};

struct System {
  Digraph graph;
  PotentialPhi phi;
  PotentialPsi psi;
};

// Checks that both potentials have one value per arrow.
void check_potentials(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi);

PotentialPsi zero_psi(const Digraph& g);

// Words are sequences of symbol indices into `alphabet`.
using Word = std::vector<int>;

// Recodes (r+1)-symbol potentials as arrow potentials on the graph whose
// vertices are r-words. r = 0 is recoded on the pair graph with
// Phi(ab) := Phi(b).
System recode(const std::vector<std::string>& alphabet, int r, const std::map<Word, Rational>& phi,
              const std::map<Word, double>& psi);

Rational path_sum(const Digraph& g, const PotentialPhi& phi, const PathRec& path);
double path_sum(const Digraph& g, const PotentialPsi& psi, const PathRec& path);

}  // namespace ztl
