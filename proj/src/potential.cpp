#include "ztl/potential.hpp"

#include "ztl/error.hpp"

#include <algorithm>
#include <set>

namespace ztl {

void check_potentials(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi) {
  if (phi.values.size() != g.arrow_count() || psi.values.size() != g.arrow_count()) {
    throw Error(ErrorKind::arrow_not_in_graph, "potential domain differs from the arrow set");
  }
}

PotentialPsi zero_psi(const Digraph& g) { return {std::vector<double>(g.arrow_count(), 0.0)}; }

namespace {

std::string word_name(const std::vector<std::string>& alphabet, const Word& w) {
  bool single = std::all_of(alphabet.begin(), alphabet.end(), [](const auto& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!single && i > 0) out += '.';
    out += alphabet[w[i]];
  }
  return out;
}

}  // namespace

System recode(const std::vector<std::string>& alphabet, int r, const std::map<Word, Rational>& phi,
              const std::map<Word, double>& psi) {
  if (alphabet.empty()) throw Error(ErrorKind::empty_alphabet, "alphabet has no symbols");
  if (r < 0) throw Error(ErrorKind::inconsistent_word_set, "negative locality");
  if (phi.empty()) throw Error(ErrorKind::empty_language, "no admissible words");
  const int k = static_cast<int>(alphabet.size());
  for (const auto& [w, _] : psi) {
    if (!phi.count(w)) throw Error(ErrorKind::inconsistent_word_set, "psi word " + word_name(alphabet, w) + " has no phi value");
  }
  for (const auto& [w, _] : phi) {
    if (static_cast<int>(w.size()) != r + 1) {
      throw Error(ErrorKind::inconsistent_word_set, "word " + word_name(alphabet, w) + " does not have length r+1");
    }
    for (int s : w) {
      if (s < 0 || s >= k) throw Error(ErrorKind::symbol_not_in_alphabet, "word uses an unknown symbol");
    }
  }

  if (r == 0) {
    std::map<Word, Rational> phi2;
    std::map<Word, double> psi2;
    for (int a = 0; a < k; ++a) {
      for (const auto& [w, v] : phi) {
        phi2[{a, w[0]}] = v;
        auto it = psi.find(w);
        if (it != psi.end()) psi2[{a, w[0]}] = it->second;
      }
    }
    // Symbols without a value never occur; drop the arrows leaving them.
    std::set<int> live;
    for (const auto& [w, _] : phi) live.insert(w[0]);
    for (auto it = phi2.begin(); it != phi2.end();) {
      if (!live.count(it->first[0])) {
        psi2.erase(it->first);
        it = phi2.erase(it);
      } else {
        ++it;
      }
    }
    return recode(alphabet, 1, phi2, psi2);
  }

  std::set<Word> vertex_words;
  for (const auto& [w, _] : phi) {
    vertex_words.insert(Word(w.begin(), w.end() - 1));
    vertex_words.insert(Word(w.begin() + 1, w.end()));
  }
  std::vector<Word> verts(vertex_words.begin(), vertex_words.end());
  std::vector<std::string> names;
  for (const auto& v : verts) names.push_back(word_name(alphabet, v));
  if (r == 1) names.assign(alphabet.begin(), alphabet.end());
  auto vid = [&](const Word& w) -> int {
    if (r == 1) return w[0];
    return static_cast<int>(std::lower_bound(verts.begin(), verts.end(), w) - verts.begin());
  };

  std::vector<Arrow> arrows;
  for (const auto& [w, _] : phi) {
    arrows.push_back({vid(Word(w.begin(), w.end() - 1)), vid(Word(w.begin() + 1, w.end()))});
  }
  Digraph g(names, arrows);
  if (decompose(g).transitive().empty()) throw Error(ErrorKind::no_circuit, "no circuit: the admissible words admit no periodic orbit");

  std::vector<char> has_in(g.size(), 0), has_out(g.size(), 0), used(g.size(), 0);
  for (const auto& e : g.arrows()) {
    has_out[e.from] = has_in[e.to] = 1;
    used[e.from] = used[e.to] = 1;
  }
  for (int v = 0; v < g.size(); ++v) {
    if (used[v] && (!has_in[v] || !has_out[v])) {
      throw Error(ErrorKind::inconsistent_word_set, "word " + g.name(v) + " cannot be extended on both sides");
    }
  }

  System sys{g, {std::vector<Rational>(g.arrow_count())}, zero_psi(g)};
  for (const auto& [w, v] : phi) {
    auto idx = *g.arrow_index(vid(Word(w.begin(), w.end() - 1)), vid(Word(w.begin() + 1, w.end())));
    sys.phi.values[idx] = v;
    auto it = psi.find(w);
    if (it != psi.end()) sys.psi.values[idx] = it->second;
  }
  return sys;
}

Rational path_sum(const Digraph& g, const PotentialPhi& phi, const PathRec& path) {
  Rational s = 0;
  for (const auto& e : path.arrows()) {
    auto idx = g.arrow_index(e.from, e.to);
    if (!idx) throw Error(ErrorKind::arrow_not_in_graph, "path uses a missing arrow");
    s += phi.values[*idx];
  }
  return s;
}

double path_sum(const Digraph& g, const PotentialPsi& psi, const PathRec& path) {
  double s = 0;
  for (const auto& e : path.arrows()) {
    auto idx = g.arrow_index(e.from, e.to);
    if (!idx) throw Error(ErrorKind::arrow_not_in_graph, "path uses a missing arrow");
    s += psi.values[*idx];
  }
  return s;
}

}  // namespace ztl
