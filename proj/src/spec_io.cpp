#include "ztl/spec_io.hpp"

#include "ztl/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace ztl {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& why) {
  throw Error(ErrorKind::parse_error, where + ": " + why);
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json names_json(const Digraph& g, const std::vector<int>& vs) {
  json out = json::array();
  for (int v : vs) out.push_back(g.name(v));
  return out;
}

}  // namespace

Word split_word(const std::vector<std::string>& alphabet, std::string_view key) {
  bool single = std::all_of(alphabet.begin(), alphabet.end(), [](const auto& s) { return s.size() == 1; });
  Word out;
  auto lookup = [&](std::string_view tok) {
    auto it = std::find(alphabet.begin(), alphabet.end(), tok);
    if (it == alphabet.end()) {
      throw Error(ErrorKind::symbol_not_in_alphabet, "symbol '" + std::string(tok) + "' in word '" + std::string(key) +
                                                         "' is not in the alphabet");
    }
    out.push_back(static_cast<int>(it - alphabet.begin()));
  };
  if (single) {
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (!std::isspace(static_cast<unsigned char>(key[i]))) lookup(key.substr(i, 1));
    }
  } else {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= key.size(); ++i) {
      if (i == key.size() || key[i] == '.' || key[i] == ',' || key[i] == ' ') {
        if (i > start) lookup(key.substr(start, i - start));
        start = i + 1;
      }
    }
  }
  return out;
}

SystemSpec parse_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad("document", e.what());
  }
  if (!doc.is_object()) bad("document", "expected a JSON object");
  for (const auto& [k, _] : doc.items()) {
    if (k != "alphabet" && k != "r" && k != "phi" && k != "psi") bad(k, "unknown key");
  }
  SystemSpec spec;
  if (!doc.contains("alphabet") || !doc["alphabet"].is_array()) bad("alphabet", "expected a list of symbol names");
  std::set<std::string> seen;
  for (const auto& s : doc["alphabet"]) {
    if (!s.is_string() || s.get<std::string>().empty()) bad("alphabet", "symbols must be non-empty strings");
    const auto name = s.get<std::string>();
    if (!seen.insert(name).second) bad("alphabet", "duplicate symbol '" + name + "'");
    spec.alphabet.push_back(name);
  }
  if (spec.alphabet.empty()) bad("alphabet", "no symbols");
  if (doc.contains("r")) {
    if (!doc["r"].is_number_integer() || doc["r"].get<long>() < 0) bad("r", "expected a non-negative integer");
    spec.r = doc["r"].get<int>();
  }
  if (!doc.contains("phi") || !doc["phi"].is_object()) bad("phi", "expected an object mapping words to rationals");
  for (const auto& [k, v] : doc["phi"].items()) {
    const std::string where = "phi[\"" + k + "\"]";
    if (!v.is_string()) bad(where, "rational values must be strings such as \"-5/3\"");
    try {
      parse_rational(v.get<std::string>());
    } catch (const Error& e) {
      bad(where, e.what());
    }
    spec.phi[k] = v.get<std::string>();
  }
  if (spec.phi.empty()) bad("phi", "no admissible words");
  if (doc.contains("psi")) {
    if (!doc["psi"].is_object()) bad("psi", "expected an object mapping words to numbers");
    for (const auto& [k, v] : doc["psi"].items()) {
      const std::string where = "psi[\"" + k + "\"]";
      if (!v.is_number()) bad(where, "expected a number");
      if (!spec.phi.count(k)) bad(where, "word has no phi entry");
      spec.psi[k] = v.get<double>();
    }
  }
  return spec;
}

SystemSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad(path.string(), "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

json to_json(const SystemSpec& spec) {
  json doc;
  doc["alphabet"] = spec.alphabet;
  doc["r"] = spec.r;
  doc["phi"] = json::object();
  for (const auto& [k, v] : spec.phi) doc["phi"][k] = v;
  if (!spec.psi.empty()) {
    doc["psi"] = json::object();
    for (const auto& [k, v] : spec.psi) doc["psi"][k] = v;
  }
  return doc;
}

std::string serialize(const SystemSpec& spec) { return to_json(spec).dump(2) + "\n"; }

System build_system(const SystemSpec& spec) {
  std::map<Word, Rational> phi;
  std::map<Word, double> psi;
  for (const auto& [k, v] : spec.phi) {
    const std::string where = "phi[\"" + k + "\"]";
    Word w;
    try {
      w = split_word(spec.alphabet, k);
    } catch (const Error& e) {
      bad(where, e.what());
    }
    if (static_cast<int>(w.size()) != std::max(spec.r, 0) + 1) {
      bad(where, "word length " + std::to_string(w.size()) + " differs from r+1 = " + std::to_string(spec.r + 1));
    }
    if (!phi.emplace(w, parse_rational(v)).second) bad(where, "word given twice");
    auto it = spec.psi.find(k);
    if (it != spec.psi.end()) psi[w] = it->second;
  }
  return recode(spec.alphabet, spec.r, phi, psi);
}

json limit_report(const ZeroTemperatureLimit& lim) {
  json out;
  const Digraph& g = lim.graph();
  const auto& heavy = lim.heavy();

  json alpha = json::array();
  json measures = json::array();
  for (int j = 0; j < heavy.n_heavy; ++j) {
    const auto& comp = heavy.components[j];
    alpha.push_back({{"component", names_json(g, comp.vertices)}, {"alpha", lim.alpha[j]}});
    measures.push_back({{"component", names_json(g, comp.vertices)},
                        {"transition", matrix_json(comp.nu.transition_matrix())},
                        {"stationary", comp.nu.marginals()},
                        {"log_rho", comp.log_rho}});
  }
  out["alpha"] = alpha;
  out["measures"] = measures;

  json mass = json::object();
  for (int a = 0; a < g.size(); ++a) mass[g.name(a)] = lim.symbol_mass[a];
  out["symbol_mass"] = mass;

  json ladder = json::array();
  json warnings = json::array();
  for (std::size_t k = 0; k < lim.levels.size(); ++k) {
    const auto& lv = lim.levels[k];
    const Digraph& h = lv.sys.graph;
    json level;
    level["level"] = k;
    level["alphabet"] = h.names();
    level["phi_bar"] = to_string(lv.sys.phi_bar_original);
    level["psi_pressure"] = lv.sys.psi_pressure_on_xbar;
    json arrows = json::array();
    for (std::size_t i = 0; i < h.arrow_count(); ++i) {
      const auto& e = h.arrow(i);
      arrows.push_back({{"from", h.name(e.from)},
                        {"to", h.name(e.to)},
                        {"phi", to_string(lv.sys.phi.values[i])},
                        {"psi", lv.sys.psi.values[i]}});
    }
    level["arrows"] = arrows;
    json means = json::array();
    for (const auto& q : lv.sys.report.circuit_means) means.push_back(to_string(q));
    level["circuit_means"] = means;
    level["phi_gap"] = lv.sys.report.phi_gap ? json(to_string(*lv.sys.report.phi_gap)) : json(nullptr);
    json comps = json::array();
    for (const auto& c : lv.heavy.components) {
      comps.push_back({{"vertices", names_json(h, c.vertices)}, {"heavy", c.heavy}, {"log_rho", c.log_rho}});
    }
    level["components"] = comps;
    json hv = json::array();
    for (int j = 0; j < lv.heavy.n_heavy; ++j) hv.push_back(names_json(h, lv.heavy.components[j].vertices));
    level["heavy"] = hv;
    level["vertex_mass"] = lv.vertex_mass;
    for (const auto& w : lv.sys.warnings) warnings.push_back("level " + std::to_string(k) + ": " + w);
    ladder.push_back(level);
  }
  out["ladder"] = ladder;
  out["warnings"] = warnings;
  return out;
}

}  // namespace ztl
