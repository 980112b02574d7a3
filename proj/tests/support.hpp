#pragma once

#include "ztl/potential.hpp"
#include "ztl/spec_io.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ztl::fixtures {

inline std::string example_path(int k) { return std::string(ZTL_DATA_DIR) + "/examples/example" + std::to_string(k) + ".json"; }

inline System example(int k) { return build_system(load_spec(example_path(k))); }

// Square matrix system; std::nullopt marks a missing arrow. Names are a, b, c, ...
inline System matrix_system(const std::vector<std::vector<std::optional<int>>>& phi,
                            const std::vector<std::vector<double>>& psi = {}) {
  const int n = static_cast<int>(phi.size());
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  std::vector<Arrow> arrows;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (phi[i][j]) arrows.push_back({i, j});
    }
  }
  Digraph g(names, arrows);
  System s{g, {std::vector<Rational>(g.arrow_count())}, zero_psi(g)};
  for (std::size_t k = 0; k < g.arrow_count(); ++k) {
    const auto& e = g.arrow(k);
    s.phi.values[k] = *phi[e.from][e.to];
    if (!psi.empty()) s.psi.values[k] = psi[e.from][e.to];
  }
  return s;
}

inline Digraph random_digraph(std::mt19937_64& rng, int n, double density) {
  std::bernoulli_distribution coin(density);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  std::vector<Arrow> arrows;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (coin(rng)) arrows.push_back({i, j});
    }
  }
  return Digraph(names, arrows);
}

inline Digraph random_irreducible(std::mt19937_64& rng, int n, double density) {
  for (;;) {
    Digraph g = random_digraph(rng, n, density);
    if (is_irreducible(g)) return g;
  }
}

// phi drawn from {-2, -3/2, ..., 0} (optionally on a finer grid), psi zero or small.
inline System random_system(std::mt19937_64& rng, int n, double density, bool with_psi) {
  Digraph g = random_irreducible(rng, n, density);
  std::uniform_int_distribution<int> grid(-4, 0);
  std::uniform_real_distribution<double> small(-0.5, 0.5);
  System s{g, {std::vector<Rational>(g.arrow_count())}, zero_psi(g)};
  for (std::size_t k = 0; k < g.arrow_count(); ++k) {
    s.phi.values[k] = Rational(grid(rng), 2);
    if (with_psi) s.psi.values[k] = small(rng);
  }
  return s;
}

}  // namespace ztl::fixtures
