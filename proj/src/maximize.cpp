#include "ztl/maximize.hpp"

#include "ztl/error.hpp"

#include <algorithm>
#include <set>

namespace ztl {

namespace {

using OptQ = std::optional<Rational>;

// Karp's theorem on one strong component carrying a circuit.
Rational karp(const Digraph& g, const PotentialPhi& phi, const std::vector<int>& comp) {
  const int n = g.size();
  const int m = static_cast<int>(comp.size());
  std::vector<char> inside(n, 0);
  for (int v : comp) inside[v] = 1;
  std::vector<std::vector<OptQ>> d(m + 1, std::vector<OptQ>(n));
  d[0][comp.front()] = Rational(0);
  for (int k = 1; k <= m; ++k) {
    for (int v : comp) {
      for (auto a : g.in_arrows(v)) {
        int u = g.arrow(a).from;
        if (!inside[u] || !d[k - 1][u]) continue;
        Rational cand = *d[k - 1][u] + phi.values[a];
        if (!d[k][v] || cand > *d[k][v]) d[k][v] = cand;
      }
    }
  }
  OptQ best;
  for (int v : comp) {
    if (!d[m][v]) continue;
    OptQ worst;
    for (int k = 0; k < m; ++k) {
      if (!d[k][v]) continue;
      Rational q = (*d[m][v] - *d[k][v]) / (m - k);
      if (!worst || q < *worst) worst = q;
    }
    if (worst && (!best || *worst > *best)) best = worst;
  }
  return *best;
}

PathRec shortest_circuit_through(const Digraph& g, int s) {
  const int n = g.size();
  std::vector<int> parent(n, -1);
  std::vector<int> queue;
  for (auto a : g.out_arrows(s)) {
    int w = g.arrow(a).to;
    if (w == s) return PathRec{{s, s}, true};
    if (parent[w] < 0) {
      parent[w] = s;
      queue.push_back(w);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int u = queue[head];
    for (auto a : g.out_arrows(u)) {
      int w = g.arrow(a).to;
      if (w == s) {
        std::vector<int> rev{s, u};
        for (int x = parent[u]; x != s; x = parent[x]) rev.push_back(x);
        rev.push_back(s);
        std::reverse(rev.begin(), rev.end());
        return PathRec{rev, true};
      }
      if (parent[w] < 0) {
        parent[w] = u;
        queue.push_back(w);
      }
    }
  }
  return {};
}

void fill_subgraph(const Digraph& g, MaximizationReport& rep) {
  std::sort(rep.maximizing_arrows.begin(), rep.maximizing_arrows.end());
  rep.maximizing_subgraph = g.with_arrows(rep.maximizing_arrows);
  std::set<int> verts;
  for (const auto& e : rep.maximizing_arrows) {
    verts.insert(e.from);
    verts.insert(e.to);
  }
  rep.maximizing_vertices.assign(verts.begin(), verts.end());
  auto dec = decompose(rep.maximizing_subgraph);
  for (int c : dec.transitive()) {
    rep.witnesses.push_back(shortest_circuit_through(rep.maximizing_subgraph, dec.components[c].vertices.front()));
  }
}

void fill_means(const Digraph& g, const PotentialPhi& phi, MaximizationReport& rep, std::size_t cap) {
  std::set<Rational> means;
  std::size_t count = 0;
  rep.circuit_means_complete = true;
  for_each_elementary_circuit(g, [&](const PathRec& c) {
    means.insert(path_sum(g, phi, c) / c.length());
    if (++count >= cap) {
      rep.circuit_means_complete = false;
      return false;
    }
    return true;
  });
  rep.circuit_means.assign(means.begin(), means.end());
  rep.phi_gap.reset();
  if (rep.circuit_means_complete && means.size() >= 2) rep.phi_gap = *std::next(means.rbegin());
}

}  // namespace

Rational max_cycle_mean(const Digraph& g, const PotentialPhi& phi) {
  auto dec = decompose(g);
  OptQ best;
  for (int c : dec.transitive()) {
    Rational lam = karp(g, phi, dec.components[c].vertices);
    if (!best || lam > *best) best = lam;
  }
  if (!best) throw Error(ErrorKind::no_circuit, "graph has no circuit");
  return *best;
}

MaximizationReport maximize(const Digraph& g, const PotentialPhi& phi, const MaximizeOptions& opt) {
  if (phi.values.size() != g.arrow_count()) throw Error(ErrorKind::arrow_not_in_graph, "phi domain differs from the arrow set");
  MaximizationReport rep;
  rep.phi_bar = max_cycle_mean(g, phi);

  const int n = g.size();
  // Longest normalized path weights; no positive cycles exist after the shift.
  std::vector<std::vector<OptQ>> L(n, std::vector<OptQ>(n));
  for (int v = 0; v < n; ++v) L[v][v] = Rational(0);
  for (std::size_t a = 0; a < g.arrow_count(); ++a) {
    const auto& e = g.arrow(a);
    Rational w = phi.values[a] - rep.phi_bar;
    if (!L[e.from][e.to] || w > *L[e.from][e.to]) L[e.from][e.to] = w;
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (!L[i][k]) continue;
      for (int j = 0; j < n; ++j) {
        if (!L[k][j]) continue;
        Rational cand = *L[i][k] + *L[k][j];
        if (!L[i][j] || cand > *L[i][j]) L[i][j] = cand;
      }
    }
  }
  for (std::size_t a = 0; a < g.arrow_count(); ++a) {
    const auto& e = g.arrow(a);
    if (!L[e.to][e.from]) continue;
    if (phi.values[a] - rep.phi_bar + *L[e.to][e.from] == 0) rep.maximizing_arrows.push_back(e);
  }
  fill_subgraph(g, rep);
  if (opt.enumerate_means) {
    fill_means(g, phi, rep, opt.circuit_cap);
  } else {
    rep.circuit_means_complete = false;
  }
  return rep;
}

MaximizationReport maximize_by_enumeration(const Digraph& g, const PotentialPhi& phi) {
  auto circuits = elementary_circuits(g);
  if (circuits.empty()) throw Error(ErrorKind::no_circuit, "graph has no circuit");
  MaximizationReport rep;
  std::vector<Rational> means;
  for (const auto& c : circuits) means.push_back(path_sum(g, phi, c) / c.length());
  rep.phi_bar = *std::max_element(means.begin(), means.end());
  std::set<Arrow> arrows;
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    if (means[i] != rep.phi_bar) continue;
    for (const auto& e : circuits[i].arrows()) arrows.insert(e);
  }
  rep.maximizing_arrows.assign(arrows.begin(), arrows.end());
  fill_subgraph(g, rep);
  std::set<Rational> uniq(means.begin(), means.end());
  rep.circuit_means.assign(uniq.begin(), uniq.end());
  if (uniq.size() >= 2) rep.phi_gap = *std::next(uniq.rbegin());
  return rep;
}

}  // namespace ztl
