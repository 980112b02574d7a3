#include "ztl/digraph.hpp"

#include "ztl/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace ztl {

Digraph::Digraph(std::vector<std::string> names, std::vector<Arrow> arrows)
    : names_(std::move(names)), arrows_(std::move(arrows)) {
  const int n = size();
  if (n == 0) throw Error(ErrorKind::empty_alphabet, "alphabet has no symbols");
  std::set<std::string> seen;
  for (const auto& nm : names_) {
    if (!seen.insert(nm).second) throw Error(ErrorKind::duplicate_symbol, "symbol '" + nm + "' listed twice");
  }
  for (const auto& e : arrows_) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      throw Error(ErrorKind::dangling_arrow_endpoint, "arrow endpoint outside the alphabet");
    }
  }
  std::sort(arrows_.begin(), arrows_.end());
  arrows_.erase(std::unique(arrows_.begin(), arrows_.end()), arrows_.end());

  out_start_.assign(n + 1, 0);
  in_start_.assign(n + 1, 0);
  for (const auto& e : arrows_) {
    ++out_start_[e.from + 1];
    ++in_start_[e.to + 1];
  }
  std::partial_sum(out_start_.begin(), out_start_.end(), out_start_.begin());
  std::partial_sum(in_start_.begin(), in_start_.end(), in_start_.begin());
  out_list_.resize(arrows_.size());
  in_list_.resize(arrows_.size());
  std::vector<std::size_t> oc(out_start_.begin(), out_start_.end() - 1);
  std::vector<std::size_t> ic(in_start_.begin(), in_start_.end() - 1);
  // arrows_ is sorted by (from, to), so out lists come out sorted by target;
  // in lists come out sorted by source.
  for (std::size_t k = 0; k < arrows_.size(); ++k) {
    out_list_[oc[arrows_[k].from]++] = k;
    in_list_[ic[arrows_[k].to]++] = k;
  }
}

std::optional<int> Digraph::index_of(std::string_view name) const {
  for (int v = 0; v < size(); ++v) {
    if (names_[v] == name) return v;
  }
  return std::nullopt;
}

std::optional<std::size_t> Digraph::arrow_index(int from, int to) const {
  if (from < 0 || from >= size()) return std::nullopt;
  Arrow key{from, to};
  auto first = arrows_.begin() + static_cast<std::ptrdiff_t>(out_start_[from]);
  auto last = arrows_.begin() + static_cast<std::ptrdiff_t>(out_start_[from + 1]);
  auto it = std::lower_bound(first, last, key);
  if (it == last || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - arrows_.begin());
}

std::span<const std::size_t> Digraph::out_arrows(int v) const {
  return {out_list_.data() + out_start_[v], out_start_[v + 1] - out_start_[v]};
}

std::span<const std::size_t> Digraph::in_arrows(int v) const {
  return {in_list_.data() + in_start_[v], in_start_[v + 1] - in_start_[v]};
}

Digraph Digraph::with_arrows(std::vector<Arrow> arrows) const { return Digraph(names_, std::move(arrows)); }

Digraph validate(const std::vector<std::string>& alphabet,
                 const std::vector<std::pair<std::string, std::string>>& arrows) {
  if (alphabet.empty()) throw Error(ErrorKind::empty_alphabet, "alphabet has no symbols");
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (!index.emplace(alphabet[i], static_cast<int>(i)).second) {
      throw Error(ErrorKind::duplicate_symbol, "symbol '" + alphabet[i] + "' listed twice");
    }
  }
  std::vector<Arrow> out;
  for (const auto& [a, b] : arrows) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      throw Error(ErrorKind::dangling_arrow_endpoint,
                  "arrow (" + a + "," + b + ") has an endpoint outside the alphabet");
    }
    out.push_back({ia->second, ib->second});
  }
  return Digraph(alphabet, std::move(out));
}

std::vector<std::vector<int>> strongly_connected_components(const Digraph& g) {
  const int n = g.size();
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::vector<int>> out;
  int counter = 0;
  // Iterative Tarjan: frame = (vertex, next out-arrow position).
  std::vector<std::pair<int, std::size_t>> frames;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    frames.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      auto outs = g.out_arrows(v);
      if (pos < outs.size()) {
        int w = g.arrow(outs[pos++]).to;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      int done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

std::pair<int, std::vector<std::vector<int>>> cyclic_structure(const Digraph& g,
                                                               const std::vector<int>& vertices) {
  const int n = g.size();
  std::vector<char> inside(n, 0);
  for (int v : vertices) inside[v] = 1;
  std::vector<long> level(n, -1);
  std::vector<int> queue{vertices.front()};
  level[vertices.front()] = 0;
  long p = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int u = queue[head];
    for (auto k : g.out_arrows(u)) {
      int w = g.arrow(k).to;
      if (!inside[w]) continue;
      if (level[w] < 0) {
        level[w] = level[u] + 1;
        queue.push_back(w);
      } else {
        p = std::gcd(p, std::labs(level[u] + 1 - level[w]));
      }
    }
  }
  if (p == 0) p = 1;  // not reached for a component carrying a circuit
  std::vector<std::vector<int>> classes(static_cast<std::size_t>(p));
  for (int v : vertices) classes[static_cast<std::size_t>(level[v] % p)].push_back(v);
  return {static_cast<int>(p), classes};
}

std::vector<int> ComponentDecomposition::transitive() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].kind == ComponentKind::transitive) out.push_back(static_cast<int>(i));
  }
  return out;
}

ComponentDecomposition decompose(const Digraph& g) {
  auto sccs = strongly_connected_components(g);
  std::sort(sccs.begin(), sccs.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
  ComponentDecomposition out;
  out.component_of.assign(g.size(), -1);
  for (auto& vs : sccs) {
    Component c;
    c.vertices = std::move(vs);
    int id = static_cast<int>(out.components.size());
    for (int v : c.vertices) out.component_of[v] = id;
    out.components.push_back(std::move(c));
  }
  for (const auto& e : g.arrows()) {
    int cf = out.component_of[e.from];
    if (cf == out.component_of[e.to]) out.components[cf].arrows.push_back(e);
  }
  for (auto& c : out.components) {
    if (c.arrows.empty()) continue;
    c.kind = ComponentKind::transitive;
    auto [p, classes] = cyclic_structure(g, c.vertices);
    c.period = p;
    c.cyclic_classes = std::move(classes);
  }
  return out;
}

bool is_irreducible(const Digraph& g) {
  if (g.arrow_count() == 0) return false;
  return strongly_connected_components(g).size() == 1;
}

std::vector<Arrow> PathRec::arrows() const {
  std::vector<Arrow> out;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) out.push_back({vertices[i], vertices[i + 1]});
  return out;
}

namespace {

struct Johnson {
  const Digraph& g;
  const std::function<bool(const PathRec&)>& visit;
  std::vector<char> allowed, blocked;
  std::vector<std::vector<int>> bset;
  std::vector<int> path;
  bool stop = false;

  void unblock(int u) {
    std::vector<int> work{u};
    while (!work.empty()) {
      int x = work.back();
      work.pop_back();
      if (!blocked[x]) continue;
      blocked[x] = 0;
      for (int y : bset[x]) work.push_back(y);
      bset[x].clear();
    }
  }

  bool circuit(int v, int s) {
    bool found = false;
    path.push_back(v);
    blocked[v] = 1;
    for (auto k : g.out_arrows(v)) {
      if (stop) break;
      int w = g.arrow(k).to;
      if (!allowed[w]) continue;
      if (w == s) {
        PathRec rec;
        rec.vertices = path;
        rec.vertices.push_back(s);
        if (!visit(rec)) stop = true;
        found = true;
      } else if (!blocked[w] && circuit(w, s)) {
        found = true;
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (auto k : g.out_arrows(v)) {
        int w = g.arrow(k).to;
        if (!allowed[w]) continue;
        auto& b = bset[w];
        if (std::find(b.begin(), b.end(), v) == b.end()) b.push_back(v);
      }
    }
    path.pop_back();
    return found;
  }
};

}  // namespace

void for_each_elementary_circuit(const Digraph& g, const std::function<bool(const PathRec&)>& visit) {
  const int n = g.size();
  Johnson j{g, visit, std::vector<char>(n, 0), std::vector<char>(n, 0), std::vector<std::vector<int>>(n), {}};
  for (int s = 0; s < n && !j.stop; ++s) {
    // Strong component of s inside the subgraph induced by {s, ..., n-1}.
    std::vector<Arrow> sub;
    for (const auto& e : g.arrows()) {
      if (e.from >= s && e.to >= s) sub.push_back(e);
    }
    Digraph h = g.with_arrows(std::move(sub));
    auto sccs = strongly_connected_components(h);
    const std::vector<int>* mine = nullptr;
    for (const auto& c : sccs) {
      if (std::binary_search(c.begin(), c.end(), s)) mine = &c;
    }
    if (mine->size() == 1 && !g.has_arrow(s, s)) continue;
    std::fill(j.allowed.begin(), j.allowed.end(), 0);
    for (int v : *mine) {
      j.allowed[v] = 1;
      j.blocked[v] = 0;
      j.bset[v].clear();
    }
    j.circuit(s, s);
  }
}

std::vector<PathRec> elementary_circuits(const Digraph& g) {
  std::vector<PathRec> out;
  for_each_elementary_circuit(g, [&](const PathRec& c) {
    out.push_back(c);
    return true;
  });
  return out;
}

std::vector<PathRec> elementary_paths(const Digraph& g, int a, int c,
                                      const std::vector<Arrow>& forbidden_arrows,
                                      const std::vector<int>& forbidden_interior) {
  std::vector<PathRec> out;
  if (a == c) return out;
  const int n = g.size();
  std::vector<char> banned(n, 0), used(n, 0);
  for (int v : forbidden_interior) banned[v] = 1;
  std::set<Arrow> bad_arrows(forbidden_arrows.begin(), forbidden_arrows.end());
  std::vector<int> path{a};
  used[a] = 1;
  std::function<void(int)> dfs = [&](int v) {
    for (auto k : g.out_arrows(v)) {
      const Arrow& e = g.arrow(k);
      if (bad_arrows.count(e)) continue;
      int w = e.to;
      if (w == c) {
        PathRec rec;
        rec.vertices = path;
        rec.vertices.push_back(c);
        out.push_back(std::move(rec));
        continue;
      }
      if (used[w] || banned[w]) continue;
      used[w] = 1;
      path.push_back(w);
      dfs(w);
      path.pop_back();
      used[w] = 0;
    }
  };
  dfs(a);
  std::sort(out.begin(), out.end(), [](const PathRec& x, const PathRec& y) { return x.vertices < y.vertices; });
  return out;
}

}  // namespace ztl
