#include "ztl/perron.hpp"

#include "precise_perron.hpp"
#include "ztl/error.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>

namespace ztl {

TransferMatrix::TransferMatrix(Digraph g, std::vector<double> log_entries)
    : graph_(std::move(g)), log_entries_(std::move(log_entries)) {
  if (log_entries_.size() != graph_.arrow_count()) {
    throw Error(ErrorKind::arrow_not_in_graph, "transfer matrix entries differ from the arrow set");
  }
  log_scale_ = log_entries_.empty() ? 0.0 : *std::max_element(log_entries_.begin(), log_entries_.end());
}

Eigen::MatrixXd TransferMatrix::dense_scaled() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), size());
  for (std::size_t k = 0; k < graph_.arrow_count(); ++k) m(graph_.arrow(k).from, graph_.arrow(k).to) = scaled(k);
  return m;
}

Eigen::MatrixXd TransferMatrix::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), size());
  for (std::size_t k = 0; k < graph_.arrow_count(); ++k) m(graph_.arrow(k).from, graph_.arrow(k).to) = entry(k);
  return m;
}

TransferMatrix transfer_matrix(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi, double beta) {
  check_potentials(g, phi, psi);
  std::vector<double> logs(g.arrow_count());
  for (std::size_t k = 0; k < logs.size(); ++k) logs[k] = beta * to_double(phi.values[k]) + psi.values[k];
  return TransferMatrix(g, std::move(logs));
}

TransferMatrix transfer_matrix(const Digraph& g, const PotentialPsi& psi) {
  if (psi.values.size() != g.arrow_count()) throw Error(ErrorKind::arrow_not_in_graph, "psi domain differs from the arrow set");
  return TransferMatrix(g, psi.values);
}

std::vector<double> Eigensystem::right() const {
  std::vector<double> out(log_v.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_v[i]);
  return out;
}

std::vector<double> Eigensystem::left() const {
  std::vector<double> out(log_w.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_w[i]);
  return out;
}

namespace {

double hilbert_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double r = std::log(y(i)) - std::log(x(i));
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  return hi - lo;
}

// Smallest l with B^l entrywise positive, capped by Wielandt's bound.
int primitivity_index(const Eigen::MatrixXd& b) {
  const Eigen::Index m = b.rows();
  using Pattern = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
  Pattern base = (b.array() > 0.0).cast<int>();
  Pattern p = base;
  const int cap = static_cast<int>((m - 1) * (m - 1) + 1);
  for (int l = 1; l <= cap; ++l) {
    if ((p.array() > 0).all()) return l;
    Pattern next = p * base;
    p = (next.array() > 0).cast<int>();
  }
  return -1;
}

// Birkhoff contraction coefficient of a positive matrix.
double birkhoff_tau(const Eigen::MatrixXd& c) {
  const Eigen::Index m = c.rows();
  Eigen::MatrixXd lc = c.array().log();
  double worst = 0.0;  // max of log(C_il C_jk / (C_ik C_jl))
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      Eigen::ArrayXd d = lc.row(i).array() - lc.row(j).array();
      worst = std::max(worst, d.maxCoeff() - d.minCoeff());
    }
  }
  if (!std::isfinite(worst)) return 1.0;
  double sq = std::exp(-0.5 * worst);
  return (1.0 - sq) / (1.0 + sq);
}

struct PowerResult {
  bool ok = false;
  Eigen::VectorXd v, w;
  double rho = 0.0;
  int ell = 1;
  double tau = 1.0;
};

PowerResult power_method(const TransferMatrix& m, int p, const std::vector<std::vector<int>>& classes,
                         const EigenOptions& opt, bool residual_fallback) {
  PowerResult out;
  Eigen::MatrixXd a = m.dense_scaled();
  for (std::size_t k = 0; k < m.graph().arrow_count(); ++k) {
    if (!(m.scaled(k) > 0.0)) return out;  // underflow: the pattern is no longer represented
  }
  Eigen::MatrixXd ap = a;
  for (int i = 1; i < p; ++i) ap = ap * a;
  const auto& c0 = classes[0];
  const Eigen::Index q = static_cast<Eigen::Index>(c0.size());
  Eigen::MatrixXd b(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) b(i, j) = ap(c0[i], c0[j]);
  }
  out.ell = primitivity_index(b);
  if (out.ell < 0) return out;
  Eigen::MatrixXd c = b;
  for (int i = 1; i < out.ell; ++i) c = c * b;
  if (!((c.array() > 0.0).all())) return out;
  out.tau = birkhoff_tau(c);
  bool certified = out.tau < 1.0 - 1e-12;
  if (!certified && !residual_fallback) return out;

  Eigen::VectorXd x = Eigen::VectorXd::Ones(q), y = x;
  Eigen::MatrixXd ct = c.transpose();
  const double target = opt.tol / 8.0;
  if (certified) {
    Eigen::VectorXd cx = c * x;
    double d0 = hilbert_distance(x, cx);
    if (d0 > 0.0) {
      double need = std::log(target * (1.0 - out.tau) / d0) / std::log(std::max(out.tau, 1e-300));
      if (need > static_cast<double>(opt.max_iterations)) {
        if (!residual_fallback) return out;
        certified = false;
      }
    }
  }
  auto iterate = [&](const Eigen::MatrixXd& op, Eigen::VectorXd& z) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t stall = 0;
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
      Eigen::VectorXd nz = op * z;
      nz /= nz.maxCoeff();
      double d = hilbert_distance(z, nz);
      z = nz;
      double bound = certified ? d / (1.0 - out.tau) : d;
      if (bound < target) return true;
      if (bound < best * 0.999) {
        best = bound;
        stall = 0;
      } else if (++stall > 50 && (best < opt.tol || (residual_fallback && d < opt.tol))) {
        return true;  // rounding floor reached
      }
    }
    return false;
  };
  if (!iterate(c, x) || !iterate(ct, y)) return out;

  // Perron root of the block from a Rayleigh-type quotient with positive vectors.
  Eigen::VectorXd bx = b * x;
  double lam = y.dot(bx) / y.dot(x);
  out.rho = std::pow(lam, 1.0 / p);

  // Propagate class-0 vectors to the other classes with single steps of A.
  const int n = m.size();
  out.v = Eigen::VectorXd::Zero(n);
  out.w = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < q; ++i) {
    out.v(c0[i]) = x(i);
    out.w(c0[i]) = y(i);
  }
  for (int cls = p - 1; cls >= 1; --cls) {
    Eigen::VectorXd av = a * out.v;
    for (int u : classes[cls]) out.v(u) = av(u) / out.rho;
  }
  for (int cls = 1; cls < p; ++cls) {
    Eigen::VectorXd wa = a.transpose() * out.w;
    for (int u : classes[cls]) out.w(u) = wa(u) / out.rho;
  }
  if (!(out.v.array() > 0.0).all() || !(out.w.array() > 0.0).all()) return out;
  // Refine rho using the full matrix.
  out.rho = out.w.dot(a * out.v) / out.w.dot(out.v);
  out.ok = true;
  return out;
}

}  // namespace

double eigen_residual(const TransferMatrix& m, const Eigensystem& e) {
  const int n = m.size();
  // Work with rescaled vectors so the largest entry is 1.
  double vmax = *std::max_element(e.log_v.begin(), e.log_v.end());
  double wmax = *std::max_element(e.log_w.begin(), e.log_w.end());
  double rho_scaled = std::exp(e.log_rho - m.log_scale());
  std::vector<double> v(n), w(n), mv(n, 0.0), wm(n, 0.0);
  for (int i = 0; i < n; ++i) {
    v[i] = std::exp(e.log_v[i] - vmax);
    w[i] = std::exp(e.log_w[i] - wmax);
  }
  for (std::size_t k = 0; k < m.graph().arrow_count(); ++k) {
    const auto& a = m.graph().arrow(k);
    double x = m.scaled(k);
    mv[a.from] += x * v[a.to];
    wm[a.to] += w[a.from] * x;
  }
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    r = std::max(r, std::abs(mv[i] - rho_scaled * v[i]) / rho_scaled);
    r = std::max(r, std::abs(wm[i] - rho_scaled * w[i]) / rho_scaled);
  }
  return r;
}

Eigensystem eigensystem(const TransferMatrix& m, const EigenOptions& opt) {
  const Digraph& g = m.graph();
  if (!is_irreducible(g)) throw Error(ErrorKind::not_irreducible, "transfer matrix pattern is not strongly connected");
  Eigensystem e;
  std::vector<int> all(g.size());
  std::iota(all.begin(), all.end(), 0);
  auto [p, classes] = cyclic_structure(g, all);
  e.period = p;
  e.cyclic_blocks = classes;

  bool done = false;
  if (opt.method != EigenMethod::precise) {
    PowerResult pr = power_method(m, p, classes, opt, opt.method == EigenMethod::power);
    e.primitivity_index = std::max(pr.ell, 1);
    e.birkhoff_tau = pr.tau;
    if (pr.ok) {
      double s = pr.w.dot(pr.v);
      e.log_rho = std::log(pr.rho) + m.log_scale();
      e.log_v.resize(g.size());
      e.log_w.resize(g.size());
      for (int i = 0; i < g.size(); ++i) {
        e.log_v[i] = std::log(pr.v(i));
        e.log_w[i] = std::log(pr.w(i) / s);
      }
      e.method_used = EigenMethod::power;
      e.certified_residual = eigen_residual(m, e);
      done = e.certified_residual < opt.tol || opt.method == EigenMethod::power;
    } else if (opt.method == EigenMethod::power) {
      throw Error(ErrorKind::convergence_failure, "power iteration did not reach the requested tolerance");
    }
  }
  if (!done) {
    auto pr = detail::precise_perron(g, m.log_entries());
    e.log_rho = pr.log_rho;
    e.log_v = std::move(pr.log_v);
    e.log_w = std::move(pr.log_w);
    e.method_used = EigenMethod::precise;
    e.certified_residual = std::max(pr.residual, eigen_residual(m, e));
  }
  // Re-centre so that the largest entry of v is 1 while keeping w'v = 1.
  double vmax = *std::max_element(e.log_v.begin(), e.log_v.end());
  for (auto& x : e.log_v) x -= vmax;
  for (auto& x : e.log_w) x += vmax;
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i) s += e.mass(i);
  e.normalization_error = std::abs(s - 1.0);
  return e;
}

MarkovGibbsMeasure::MarkovGibbsMeasure(TransferMatrix m, Eigensystem e) : matrix_(std::move(m)), eig_(std::move(e)) {}

double MarkovGibbsMeasure::log_cylinder(const std::vector<int>& word) const {
  const Digraph& g = matrix_.graph();
  if (word.empty()) throw Error(ErrorKind::symbol_not_in_alphabet, "empty word");
  for (int b : word) {
    if (b < 0 || b >= g.size()) throw Error(ErrorKind::symbol_not_in_alphabet, "symbol index out of range");
  }
  double s = eig_.log_w[word.front()] + eig_.log_v[word.back()];
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    auto k = g.arrow_index(word[i], word[i + 1]);
    if (!k) return -std::numeric_limits<double>::infinity();
    s += matrix_.log_entry(*k) - eig_.log_rho;
  }
  return s;
}

double MarkovGibbsMeasure::cylinder(const std::vector<int>& word) const { return std::exp(log_cylinder(word)); }

std::vector<double> MarkovGibbsMeasure::marginals() const {
  std::vector<double> out(size());
  for (int a = 0; a < size(); ++a) out[a] = mass(a);
  return out;
}

Eigen::MatrixXd MarkovGibbsMeasure::transition_matrix() const {
  const Digraph& g = matrix_.graph();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(size(), size());
  for (std::size_t k = 0; k < g.arrow_count(); ++k) {
    const auto& a = g.arrow(k);
    p(a.from, a.to) = std::exp(matrix_.log_entry(k) + eig_.log_v[a.to] - eig_.log_rho - eig_.log_v[a.from]);
  }
  return p;
}

std::vector<int> parse_word(const Digraph& g, std::string_view word) {
  bool single = std::all_of(g.names().begin(), g.names().end(), [](const auto& s) { return s.size() == 1; });
  std::vector<int> out;
  auto lookup = [&](std::string_view tok) {
    auto idx = g.index_of(tok);
    if (!idx) throw Error(ErrorKind::symbol_not_in_alphabet, "symbol '" + std::string(tok) + "' is not in the alphabet");
    out.push_back(*idx);
  };
  if (single) {
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (std::isspace(static_cast<unsigned char>(word[i]))) continue;
      lookup(word.substr(i, 1));
    }
  } else {
    std::size_t start = 0;
    for (std::size_t i = 0; i <= word.size(); ++i) {
      if (i == word.size() || word[i] == '.' || word[i] == ',' || word[i] == ' ') {
        if (i > start) lookup(word.substr(start, i - start));
        start = i + 1;
      }
    }
  }
  if (out.empty()) throw Error(ErrorKind::symbol_not_in_alphabet, "empty word");
  return out;
}

double cylinder(const MarkovGibbsMeasure& mu, std::string_view word) {
  return mu.cylinder(parse_word(mu.matrix().graph(), word));
}

double pressure(const Digraph& g, const PotentialPsi& psi, const EigenOptions& opt) {
  return eigensystem(transfer_matrix(g, psi), opt).log_rho;
}

Restriction restrict_to(const Digraph& g, const std::vector<int>& vertices, const std::vector<Arrow>& arrows) {
  Restriction r;
  r.global_vertex = vertices;
  std::sort(r.global_vertex.begin(), r.global_vertex.end());
  std::vector<int> local(g.size(), -1);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < r.global_vertex.size(); ++i) {
    local[r.global_vertex[i]] = static_cast<int>(i);
    names.push_back(g.name(r.global_vertex[i]));
  }
  std::vector<Arrow> la;
  for (const auto& e : arrows) {
    if (local[e.from] < 0 || local[e.to] < 0) throw Error(ErrorKind::arrow_not_in_graph, "restricted arrow leaves the vertex set");
    la.push_back({local[e.from], local[e.to]});
  }
  r.local = Digraph(names, la);
  for (const auto& e : r.local.arrows()) {
    auto k = g.arrow_index(r.global_vertex[e.from], r.global_vertex[e.to]);
    if (!k) throw Error(ErrorKind::arrow_not_in_graph, "restricted arrow is not in the host graph");
    r.global_arrow.push_back(*k);
  }
  return r;
}

TransferMatrix restrict_matrix(const TransferMatrix& m, const Restriction& r) {
  std::vector<double> logs;
  for (auto k : r.global_arrow) logs.push_back(m.log_entry(k));
  return TransferMatrix(r.local, std::move(logs));
}

double return_series(const TransferMatrix& m, int b, double eps_rho) {
  const Digraph& g = m.graph();
  if (b < 0 || b >= g.size()) throw Error(ErrorKind::symbol_not_in_alphabet, "vertex out of range");
  auto dec = decompose(g);
  const auto& comp = dec.components[dec.component_of[b]];
  if (comp.kind == ComponentKind::trivial) return 1.0;
  Restriction r = restrict_to(g, comp.vertices, comp.arrows);
  TransferMatrix sub = restrict_matrix(m, r);
  Eigensystem e = eigensystem(sub);
  if (e.log_rho >= std::log1p(-eps_rho)) {
    throw Error(ErrorKind::divergent_series, "return series diverges at " + g.name(b) + " (spectral radius " +
                                                 std::to_string(e.rho()) + ")");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(sub.size(), sub.size()) - sub.dense();
  int lb = static_cast<int>(std::lower_bound(r.global_vertex.begin(), r.global_vertex.end(), b) - r.global_vertex.begin());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sub.size());
  rhs(lb) = 1.0;
  Eigen::VectorXd x = a.partialPivLu().solve(rhs);
  return x(lb);
}

}  // namespace ztl
