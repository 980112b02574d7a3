#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ztl {

struct Symbol {
  int index = 0;
  std::string name;
};

struct Arrow {
  int from = 0;
  int to = 0;
  auto operator<=>(const Arrow&) const = default;
};

// Finite digraph presenting a topological Markov chain. Arrows are kept
// sorted lexicographically and each arrow has a stable index into that order.
class Digraph {
 public:
  Digraph() = default;
  Digraph(std::vector<std::string> names, std::vector<Arrow> arrows);

  int size() const { return static_cast<int>(names_.size()); }
  std::size_t arrow_count() const { return arrows_.size(); }
  const std::string& name(int v) const { return names_[v]; }
  const std::vector<std::string>& names() const { return names_; }
  Symbol symbol(int v) const { return {v, names_[v]}; }
  std::optional<int> index_of(std::string_view name) const;

  const std::vector<Arrow>& arrows() const { return arrows_; }
  const Arrow& arrow(std::size_t k) const { return arrows_[k]; }
  std::optional<std::size_t> arrow_index(int from, int to) const;
  bool has_arrow(int from, int to) const { return arrow_index(from, to).has_value(); }

  // Arrow indices leaving / entering a vertex, in target / source order.
  std::span<const std::size_t> out_arrows(int v) const;
  std::span<const std::size_t> in_arrows(int v) const;

  // Same vertex set, only the listed arrows.
  Digraph with_arrows(std::vector<Arrow> arrows) const;

 private:
  std::vector<std::string> names_;
  std::vector<Arrow> arrows_;
  std::vector<std::size_t> out_start_, out_list_, in_start_, in_list_;
};

// Named construction with error reporting.
Digraph validate(const std::vector<std::string>& alphabet,
                 const std::vector<std::pair<std::string, std::string>>& arrows);

enum class ComponentKind { transitive, trivial };

struct Component {
  std::vector<int> vertices;  // sorted
  std::vector<Arrow> arrows;  // induced arrows, sorted
  ComponentKind kind = ComponentKind::trivial;
  int period = 0;  // 0 for trivial components
  std::vector<std::vector<int>> cyclic_classes;  // class i maps into class i+1 mod p
};

struct ComponentDecomposition {
  std::vector<Component> components;  // ordered by smallest vertex
  std::vector<int> component_of;      // per vertex
  std::vector<int> transitive() const;
};

ComponentDecomposition decompose(const Digraph& g);

// Period and cyclic classes of the strongly connected set `vertices` (which
// must carry a circuit) using only arrows inside it.
std::pair<int, std::vector<std::vector<int>>> cyclic_structure(const Digraph& g,
                                                               const std::vector<int>& vertices);

bool is_irreducible(const Digraph& g);

struct PathRec {
  std::vector<int> vertices;
  bool elementary = true;

  int length() const { return vertices.empty() ? 0 : static_cast<int>(vertices.size()) - 1; }
  bool is_circuit() const { return vertices.size() >= 2 && vertices.front() == vertices.back(); }
  std::vector<Arrow> arrows() const;
};

// Johnson's algorithm. Each circuit is reported once, starting (and ending)
// at its smallest vertex. The visitor returns false to stop early.
void for_each_elementary_circuit(const Digraph& g, const std::function<bool(const PathRec&)>& visit);
std::vector<PathRec> elementary_circuits(const Digraph& g);

std::vector<PathRec> elementary_paths(const Digraph& g, int a, int c,
                                      const std::vector<Arrow>& forbidden_arrows,
                                      const std::vector<int>& forbidden_interior);

// Strongly connected components by Tarjan's algorithm, in reverse topological order.
std::vector<std::vector<int>> strongly_connected_components(const Digraph& g);

}  // namespace ztl
