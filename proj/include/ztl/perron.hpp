#pragma once

#include "ztl/digraph.hpp"
#include "ztl/potential.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string_view>
#include <vector>

namespace ztl {

// Nonnegative matrix supported on the arrows of a digraph. Entries are kept
// as logarithms; `scaled` divides every entry by exp(log_scale()).
class TransferMatrix {
 public:
  TransferMatrix(Digraph g, std::vector<double> log_entries);

  const Digraph& graph() const { return graph_; }
  int size() const { return graph_.size(); }
  const std::vector<double>& log_entries() const { return log_entries_; }
  double log_entry(std::size_t arrow) const { return log_entries_[arrow]; }
  double log_scale() const { return log_scale_; }
  double scaled(std::size_t arrow) const { return std::exp(log_entries_[arrow] - log_scale_); }
  double entry(std::size_t arrow) const { return std::exp(log_entries_[arrow]); }

  Eigen::MatrixXd dense_scaled() const;
  Eigen::MatrixXd dense() const;

 private:
  Digraph graph_;
  std::vector<double> log_entries_;
  double log_scale_ = 0.0;
};

TransferMatrix transfer_matrix(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi, double beta);
TransferMatrix transfer_matrix(const Digraph& g, const PotentialPsi& psi);

enum class EigenMethod { automatic, power, precise };

struct EigenOptions {
  double tol = 1e-12;
  EigenMethod method = EigenMethod::automatic;
  std::size_t max_iterations = 200000;
};

struct Eigensystem {
  double log_rho = 0.0;
  // Right (v) and left (w) Perron vectors in log form, scaled so that
  // sum_a w(a) v(a) = 1.
  std::vector<double> log_v, log_w;
  int period = 1;
  std::vector<std::vector<int>> cyclic_blocks;
  int primitivity_index = 1;
  double birkhoff_tau = 1.0;
  double certified_residual = 0.0;
  double normalization_error = 0.0;  // |w'v - 1| after rounding to double
  EigenMethod method_used = EigenMethod::power;

  double rho() const { return std::exp(log_rho); }
  double v(int a) const { return std::exp(log_v[a]); }
  double w(int a) const { return std::exp(log_w[a]); }
  double mass(int a) const { return std::exp(log_w[a] + log_v[a]); }
  std::vector<double> right() const;
  std::vector<double> left() const;
};

Eigensystem eigensystem(const TransferMatrix& m, const EigenOptions& opt = {});

// Scale-free residual max(|Mv - rho v|/(rho |v|), |w'M - rho w'|/(rho |w|)) in sup norms.
double eigen_residual(const TransferMatrix& m, const Eigensystem& e);

class MarkovGibbsMeasure {
 public:
  MarkovGibbsMeasure(TransferMatrix m, Eigensystem e);

  const TransferMatrix& matrix() const { return matrix_; }
  const Eigensystem& eig() const { return eig_; }
  int size() const { return matrix_.size(); }

  // w(b0) prod M(b_i,b_{i+1}) v(bn) / rho^n; 0 (or -inf) for inadmissible words.
  double cylinder(const std::vector<int>& word) const;
  double log_cylinder(const std::vector<int>& word) const;
  double mass(int a) const { return eig_.mass(a); }
  std::vector<double> marginals() const;
  // P(a,b) = M(a,b) v(b) / (rho v(a)).
  Eigen::MatrixXd transition_matrix() const;

 private:
  TransferMatrix matrix_;
  Eigensystem eig_;
};

// Splits a word given by symbol names. Single-character alphabets use one
// character per symbol; otherwise symbols are separated by '.', ',' or spaces.
std::vector<int> parse_word(const Digraph& g, std::string_view word);
double cylinder(const MarkovGibbsMeasure& mu, std::string_view word);

double pressure(const Digraph& g, const PotentialPsi& psi, const EigenOptions& opt = {});

// Sum_k M^k(b,b) through the resolvent of b's strong component.
double return_series(const TransferMatrix& m, int b, double eps_rho = 1e-9);

// Vertices and arrows of a sub-digraph relabelled to local indices.
struct Restriction {
  Digraph local;
  std::vector<int> global_vertex;         // local -> global
  std::vector<std::size_t> global_arrow;  // local arrow -> global arrow index
};

Restriction restrict_to(const Digraph& g, const std::vector<int>& vertices, const std::vector<Arrow>& arrows);

TransferMatrix restrict_matrix(const TransferMatrix& m, const Restriction& r);

}  // namespace ztl
