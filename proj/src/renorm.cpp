#include "ztl/renorm.hpp"

#include "ztl/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

namespace ztl {

namespace {

using OptQ = std::optional<Rational>;

int local_index(const Restriction& r, int v) {
  auto it = std::lower_bound(r.global_vertex.begin(), r.global_vertex.end(), v);
  return static_cast<int>(it - r.global_vertex.begin());
}

std::vector<char> interior_mask(const HeavyDecomposition& heavy) {
  std::vector<char> m(heavy.heavy_of_vertex.size(), 0);
  for (std::size_t v = 0; v < m.size(); ++v) m[v] = heavy.heavy_of_vertex[v] < 0;
  return m;
}

// Best phi over walks a -> x whose vertices after a are interior.
std::vector<OptQ> forward_potential(const NormalizedSystem& sys, const std::vector<char>& interior, int a) {
  const Digraph& g = sys.graph;
  std::vector<OptQ> f(g.size());
  for (auto k : g.out_arrows(a)) {
    int x = g.arrow(k).to;
    if (interior[x] && (!f[x] || sys.phi.values[k] > *f[x])) f[x] = sys.phi.values[k];
  }
  for (int round = 0; round <= g.size(); ++round) {
    bool changed = false;
    for (std::size_t k = 0; k < g.arrow_count(); ++k) {
      const auto& e = g.arrow(k);
      if (!interior[e.from] || !interior[e.to] || !f[e.from]) continue;
      Rational cand = *f[e.from] + sys.phi.values[k];
      if (!f[e.to] || cand > *f[e.to]) {
        f[e.to] = cand;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return f;
}

// Best phi over walks x -> c whose vertices before c are interior.
std::vector<OptQ> backward_potential(const NormalizedSystem& sys, const std::vector<char>& interior, int c) {
  const Digraph& g = sys.graph;
  std::vector<OptQ> h(g.size());
  for (auto k : g.in_arrows(c)) {
    int x = g.arrow(k).from;
    if (interior[x] && (!h[x] || sys.phi.values[k] > *h[x])) h[x] = sys.phi.values[k];
  }
  for (int round = 0; round <= g.size(); ++round) {
    bool changed = false;
    for (std::size_t k = 0; k < g.arrow_count(); ++k) {
      const auto& e = g.arrow(k);
      if (!interior[e.from] || !interior[e.to] || !h[e.to]) continue;
      Rational cand = sys.phi.values[k] + *h[e.to];
      if (!h[e.from] || cand > *h[e.from]) {
        h[e.from] = cand;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return h;
}

std::optional<std::size_t> direct_arrow(const NormalizedSystem& sys, const std::set<Arrow>& heavy_arrows, int a, int c) {
  auto k = sys.graph.arrow_index(a, c);
  if (!k || heavy_arrows.count({a, c})) return std::nullopt;
  return k;
}

std::string dump_arrows(const Digraph& g) {
  std::string s;
  for (const auto& e : g.arrows()) {
    if (!s.empty()) s += " ";
    s += "(" + g.name(e.from) + "," + g.name(e.to) + ")";
  }
  return s.empty() ? "(none)" : s;
}

}  // namespace

HeavyDecomposition heavy_components(const NormalizedSystem& sys, const RenormOptions& opt) {
  const Digraph& g = sys.graph;
  TransferMatrix mpsi = transfer_matrix(g, sys.psi);
  std::vector<XbarComponent> heavy, light;
  for (std::size_t i = 0; i < sys.xbar_transitive.size(); ++i) {
    const auto& comp = sys.xbar.components[sys.xbar_transitive[i]];
    Restriction r = restrict_to(g, comp.vertices, comp.arrows);
    TransferMatrix tm = restrict_matrix(mpsi, r);
    Eigensystem e = eigensystem(tm, opt.normalize.eig);
    bool is_heavy = -sys.component_log_rho[i] <= opt.normalize.eps_rho;
    XbarComponent x{comp.vertices, comp.arrows, sys.component_log_rho[i], is_heavy, r,
                    MarkovGibbsMeasure(std::move(tm), std::move(e))};
    (is_heavy ? heavy : light).push_back(std::move(x));
  }
  HeavyDecomposition h;
  h.n_heavy = static_cast<int>(heavy.size());
  h.n_total = h.n_heavy + static_cast<int>(light.size());
  h.heavy_of_vertex.assign(g.size(), -1);
  h.component_of_vertex.assign(g.size(), -1);
  for (auto& x : heavy) h.components.push_back(std::move(x));
  for (auto& x : light) h.components.push_back(std::move(x));
  for (int j = 0; j < h.n_total; ++j) {
    for (int v : h.components[j].vertices) {
      h.component_of_vertex[v] = j;
      if (j < h.n_heavy) h.heavy_of_vertex[v] = j;
    }
    if (j < h.n_heavy) {
      h.heavy_arrow_union.insert(h.heavy_arrow_union.end(), h.components[j].arrows.begin(), h.components[j].arrows.end());
    }
  }
  std::sort(h.heavy_arrow_union.begin(), h.heavy_arrow_union.end());
  return h;
}

CentralTerms central_terms(const NormalizedSystem& sys, const HeavyDecomposition& heavy, CenterRule rule) {
  const Digraph& g = sys.graph;
  CentralTerms ct;
  ct.phi_ell.assign(g.size(), std::nullopt);
  for (int j = 0; j < heavy.n_heavy; ++j) {
    const auto& comp = heavy.components[j];
    int center = rule == CenterRule::smallest ? comp.vertices.front() : comp.vertices.back();
    ct.center.push_back(center);
    std::set<Arrow> inside(comp.arrows.begin(), comp.arrows.end());
    ct.phi_ell[center] = Rational(0);
    std::vector<int> queue{center};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      int u = queue[head];
      for (auto k : g.out_arrows(u)) {
        const auto& e = g.arrow(k);
        if (!inside.count(e) || ct.phi_ell[e.to]) continue;
        ct.phi_ell[e.to] = *ct.phi_ell[u] + sys.phi.values[k];
        queue.push_back(e.to);
      }
    }
    for (const auto& e : comp.arrows) {
      auto k = *g.arrow_index(e.from, e.to);
      if (!ct.phi_ell[e.from] || !ct.phi_ell[e.to] || *ct.phi_ell[e.to] != *ct.phi_ell[e.from] + sys.phi.values[k]) {
        throw Error(ErrorKind::inconsistent_heavy_component,
                    "a circuit inside the component of " + g.name(center) + " has nonzero phi-sum");
      }
    }
  }
  return ct;
}

const TransitionTerm* TransitionData::find(int a, int c) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), std::make_pair(a, c),
                             [](const TransitionTerm& t, const std::pair<int, int>& key) {
                               return std::make_pair(t.a, t.c) < key;
                             });
  if (it == terms.end() || it->a != a || it->c != c) return nullptr;
  return &*it;
}

double transition_pressure(const NormalizedSystem& sys, const HeavyDecomposition& heavy, const PathRec& path) {
  const Digraph& g = sys.graph;
  if (path.vertices.size() <= 2) return 0.0;
  TransferMatrix mpsi = transfer_matrix(g, sys.psi);
  std::vector<int> removed;
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < path.vertices.size(); ++i) {
    int b = path.vertices[i];
    if (heavy.heavy_of_vertex[b] >= 0) {
      throw Error(ErrorKind::inconsistent_heavy_component, "excursion interior meets heavy vertex " + g.name(b));
    }
    int j = heavy.component_of_vertex[b];
    if (j >= 0) {
      const auto& comp = heavy.components[j];
      std::vector<int> verts;
      for (int v : comp.vertices) {
        if (std::find(removed.begin(), removed.end(), v) == removed.end()) verts.push_back(v);
      }
      std::vector<Arrow> arrows;
      for (const auto& e : comp.arrows) {
        if (std::binary_search(verts.begin(), verts.end(), e.from) && std::binary_search(verts.begin(), verts.end(), e.to)) {
          arrows.push_back(e);
        }
      }
      Restriction r = restrict_to(g, verts, arrows);
      total += std::log(return_series(restrict_matrix(mpsi, r), local_index(r, b)));
    }
    removed.push_back(b);
  }
  return total;
}

TransitionData transition_data(const NormalizedSystem& sys, const HeavyDecomposition& heavy, const RenormOptions& opt) {
  const Digraph& g = sys.graph;
  const int n = g.size();
  std::vector<char> interior = interior_mask(heavy);
  std::set<Arrow> heavy_arrows(heavy.heavy_arrow_union.begin(), heavy.heavy_arrow_union.end());
  std::vector<int> heavy_vertices;
  for (int v = 0; v < n; ++v) {
    if (!interior[v]) heavy_vertices.push_back(v);
  }
  std::map<int, std::vector<OptQ>> back;
  for (int c : heavy_vertices) back[c] = backward_potential(sys, interior, c);

  TransitionData out;
  for (int a : heavy_vertices) {
    std::vector<OptQ> f = forward_potential(sys, interior, a);
    for (int c : heavy_vertices) {
      const auto& h = back[c];
      auto direct = direct_arrow(sys, heavy_arrows, a, c);
      OptQ mx;
      if (direct) mx = sys.phi.values[*direct];
      for (int x = 0; x < n; ++x) {
        if (f[x] && h[x] && (!mx || *f[x] + *h[x] > *mx)) mx = *f[x] + *h[x];
      }
      if (!mx) continue;

      TransitionTerm t;
      t.a = a;
      t.c = c;
      t.phi_r = *mx;

      // Tight interior vertices lie on some phi-maximal excursion.
      std::vector<int> tight, pos(n, -1);
      for (int x = 0; x < n; ++x) {
        if (f[x] && h[x] && *f[x] + *h[x] == *mx) {
          pos[x] = static_cast<int>(tight.size());
          tight.push_back(x);
        }
      }
      double direct_weight = (direct && sys.phi.values[*direct] == *mx) ? std::exp(sys.psi.values[*direct]) : 0.0;
      t.weight = direct_weight;
      if (!tight.empty()) {
        const auto q = static_cast<Eigen::Index>(tight.size());
        Eigen::MatrixXd tm = Eigen::MatrixXd::Zero(q, q);
        Eigen::VectorXd s = Eigen::VectorXd::Zero(q), e = Eigen::VectorXd::Zero(q);
        for (std::size_t k = 0; k < g.arrow_count(); ++k) {
          const auto& ar = g.arrow(k);
          const Rational& p = sys.phi.values[k];
          double wgt = std::exp(sys.psi.values[k]);
          if (ar.from == a && pos[ar.to] >= 0 && p + *h[ar.to] == *mx) s(pos[ar.to]) += wgt;
          if (ar.to == c && pos[ar.from] >= 0 && *f[ar.from] + p == *mx) e(pos[ar.from]) += wgt;
          if (pos[ar.from] >= 0 && pos[ar.to] >= 0 && *f[ar.from] + p + *h[ar.to] == *mx) {
            tm(pos[ar.from], pos[ar.to]) += wgt;
          }
        }
        Eigen::MatrixXd id = Eigen::MatrixXd::Identity(q, q);
        t.weight += s.dot((id - tm).partialPivLu().solve(e));
      }

      // Enumerate the phi-maximal elementary excursions.
      std::vector<int> path{a};
      std::vector<char> used(n, 0);
      std::function<void(int, const Rational&)> dfs = [&](int u, const Rational& ps) {
        for (auto k : g.out_arrows(u)) {
          if (t.maximizing_paths.size() >= opt.path_cap) {
            t.paths_complete = false;
            return;
          }
          int v = g.arrow(k).to;
          Rational np = ps + sys.phi.values[k];
          if (v == c) {
            if (u == a && !direct) continue;
            if (np == *mx) {
              PathRec rec{path, true};
              rec.vertices.push_back(c);
              t.maximizing_paths.push_back(std::move(rec));
            }
            continue;
          }
          if (pos[v] < 0 || used[v] || np + *h[v] != *mx) continue;
          used[v] = 1;
          path.push_back(v);
          dfs(v, np);
          path.pop_back();
          used[v] = 0;
        }
      };
      dfs(a, Rational(0));
      std::sort(t.maximizing_paths.begin(), t.maximizing_paths.end(),
                [](const PathRec& x, const PathRec& y) { return x.vertices < y.vertices; });
      for (const auto& p : t.maximizing_paths) t.pressure_per_path.push_back(transition_pressure(sys, heavy, p));
      out.terms.push_back(std::move(t));
    }
  }
  std::sort(out.terms.begin(), out.terms.end(),
            [](const TransitionTerm& x, const TransitionTerm& y) { return std::make_pair(x.a, x.c) < std::make_pair(y.a, y.c); });
  return out;
}

Digraph renormalized_sft(const NormalizedSystem& sys, const HeavyDecomposition& heavy) {
  const Digraph& g = sys.graph;
  const int n = g.size();
  std::vector<char> interior = interior_mask(heavy);
  std::set<Arrow> heavy_arrows(heavy.heavy_arrow_union.begin(), heavy.heavy_arrow_union.end());
  std::set<Arrow> out;
  for (int a = 0; a < n; ++a) {
    if (interior[a]) continue;
    int J = heavy.heavy_of_vertex[a];
    std::vector<char> seen(n, 0);
    std::vector<int> queue;
    for (auto k : g.out_arrows(a)) {
      int x = g.arrow(k).to;
      if (interior[x]) {
        if (!seen[x]) {
          seen[x] = 1;
          queue.push_back(x);
        }
      } else if (!heavy_arrows.count(g.arrow(k))) {
        out.insert({J, heavy.heavy_of_vertex[x]});
      }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (auto k : g.out_arrows(queue[head])) {
        int x = g.arrow(k).to;
        if (interior[x]) {
          if (!seen[x]) {
            seen[x] = 1;
            queue.push_back(x);
          }
        } else {
          out.insert({J, heavy.heavy_of_vertex[x]});
        }
      }
    }
  }
  std::vector<std::string> names;
  for (int j = 0; j < heavy.n_heavy; ++j) names.push_back(std::to_string(j + 1));
  return Digraph(names, std::vector<Arrow>(out.begin(), out.end()));
}

RenormalizedSystem renormalized_potentials(const NormalizedSystem& /*sys*/, const HeavyDecomposition& heavy,
                                           const CentralTerms& central, const TransitionData& trans,
                                           const Digraph& g_prime) {
  RenormalizedSystem rs;
  rs.alphabet = g_prime.names();
  rs.graph = g_prime;
  for (const auto& e : g_prime.arrows()) {
    const auto& cj = heavy.components[e.from];
    const auto& ck = heavy.components[e.to];
    OptQ best;
    std::vector<std::pair<int, int>> pairs;
    for (int a : cj.vertices) {
      for (int c : ck.vertices) {
        const TransitionTerm* t = trans.find(a, c);
        if (!t) continue;
        Rational val = *central.phi_ell[a] + t->phi_r - *central.phi_ell[c];
        if (!best || val > *best) {
          best = val;
          pairs.clear();
        }
        if (val == *best) pairs.emplace_back(a, c);
      }
    }
    if (!best) throw Error(ErrorKind::inconsistent_heavy_component, "renormalized arrow without an excursion");
    double lmax = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    for (auto [a, c] : pairs) {
      double lw = cj.nu.eig().log_w[local_index(cj.view, a)];
      double lv = ck.nu.eig().log_v[local_index(ck.view, c)];
      double x = lw + std::log(trans.find(a, c)->weight) + lv;
      terms.push_back(x);
      lmax = std::max(lmax, x);
    }
    double s = 0.0;
    for (double x : terms) s += std::exp(x - lmax);
    rs.phi.values.push_back(*best);
    rs.psi.values.push_back(lmax + std::log(s));
    rs.argmax_pairs.push_back(std::move(pairs));
  }
  return rs;
}

namespace {

RenormalizedSystem build_next(const NormalizedSystem& sys, const HeavyDecomposition& heavy, const CentralTerms& central,
                              const TransitionData& trans) {
  Digraph gp = renormalized_sft(sys, heavy);
  RenormalizedSystem rs = renormalized_potentials(sys, heavy, central, trans, gp);
  if (!is_irreducible(rs.graph)) {
    throw Error(ErrorKind::renormalized_not_irreducible,
                "renormalized graph on " + std::to_string(rs.graph.size()) + " symbols is not irreducible; arrows: " +
                    dump_arrows(rs.graph));
  }
  return rs;
}

}  // namespace

NormalizedSystem renormalize(const NormalizedSystem& sys, const RenormOptions& opt) {
  if (!is_irreducible(sys.graph)) throw Error(ErrorKind::not_irreducible, "system graph is not irreducible");
  HeavyDecomposition heavy = heavy_components(sys, opt);
  CentralTerms central = central_terms(sys, heavy, opt.center);
  TransitionData trans = transition_data(sys, heavy, opt);
  RenormalizedSystem rs = build_next(sys, heavy, central, trans);
  return normalize(rs.graph, rs.phi, rs.psi, opt.normalize);
}

ZeroTemperatureLimit zero_temperature_limit(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi,
                                            const RenormOptions& opt) {
  if (!is_irreducible(g)) throw Error(ErrorKind::not_irreducible, "system graph is not irreducible");
  ZeroTemperatureLimit lim;
  NormalizedSystem sys = normalize(g, phi, psi, opt.normalize);
  const std::size_t cap = 2 * static_cast<std::size_t>(g.size());
  while (true) {
    HeavyDecomposition heavy = heavy_components(sys, opt);
    CentralTerms central = central_terms(sys, heavy, opt.center);
    RenormLevel level{std::move(sys), std::move(heavy), std::move(central), std::nullopt, std::nullopt, {}};
    if (level.heavy.n_heavy == 1) {
      lim.levels.push_back(std::move(level));
      break;
    }
    level.transitions = transition_data(level.sys, level.heavy, opt);
    level.next = build_next(level.sys, level.heavy, level.central, *level.transitions);
    lim.levels.push_back(std::move(level));
    if (lim.levels.size() > cap) throw Error(ErrorKind::iteration_cap, "renormalization did not terminate");
    const RenormalizedSystem& next = *lim.levels.back().next;
    sys = normalize(next.graph, next.phi, next.psi, opt.normalize);
  }

  // Back-propagate: the last level carries all mass on its single heavy component.
  std::vector<double> upper{1.0};
  for (auto it = lim.levels.rbegin(); it != lim.levels.rend(); ++it) {
    RenormLevel& lv = *it;
    lv.vertex_mass.assign(lv.sys.graph.size(), 0.0);
    for (int j = 0; j < lv.heavy.n_heavy; ++j) {
      const auto& comp = lv.heavy.components[j];
      for (std::size_t i = 0; i < comp.vertices.size(); ++i) {
        lv.vertex_mass[comp.vertices[i]] = upper[j] * comp.nu.mass(static_cast<int>(i));
      }
    }
    upper = lv.vertex_mass;
  }
  const RenormLevel& base = lim.levels.front();
  if (lim.levels.size() == 1) {
    lim.alpha = {1.0};
  } else {
    lim.alpha = lim.levels[1].vertex_mass;
  }
  for (int j = 0; j < base.heavy.n_heavy; ++j) {
    if (lim.alpha[j] == 0.0) lim.eliminated.push_back(j);
  }
  lim.symbol_mass = base.vertex_mass;
  return lim;
}

double limit_cylinder(const ZeroTemperatureLimit& lim, const std::vector<int>& word) {
  const Digraph& g = lim.graph();
  if (word.empty()) throw Error(ErrorKind::symbol_not_in_alphabet, "empty word");
  for (int b : word) {
    if (b < 0 || b >= g.size()) throw Error(ErrorKind::symbol_not_in_alphabet, "symbol index out of range");
  }
  const HeavyDecomposition& heavy = lim.heavy();
  int j = heavy.heavy_of_vertex[word.front()];
  if (j < 0 || lim.alpha[j] == 0.0) return 0.0;
  const auto& comp = heavy.components[j];
  std::vector<int> local;
  for (int b : word) {
    if (heavy.heavy_of_vertex[b] != j) return 0.0;
    local.push_back(local_index(comp.view, b));
  }
  return lim.alpha[j] * comp.nu.cylinder(local);
}

double limit_cylinder(const ZeroTemperatureLimit& lim, std::string_view word) {
  return limit_cylinder(lim, parse_word(lim.graph(), word));
}

}  // namespace ztl
