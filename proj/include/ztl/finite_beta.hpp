#pragma once

#include "ztl/normalize.hpp"
#include "ztl/perron.hpp"
#include "ztl/potential.hpp"
#include "ztl/renorm.hpp"

#include <string>
#include <vector>

namespace ztl {

MarkovGibbsMeasure equilibrium_state(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi, double beta,
                                     const EigenOptions& opt = {});

// prod M(b_i,b_{i+1}) M^{p-n}(b_n,b_0) / trace(M^p) with log-scaled binary powering.
double periodic_approximation(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi, double beta, int p,
                              const std::vector<int>& word);

struct BetaSweep {
  std::vector<double> betas;
  std::vector<std::string> cylinders;
  std::vector<std::vector<double>> values;  // [beta][cylinder]
  std::vector<double> limit_row;
};

enum class Execution { serial, parallel };

BetaSweep beta_sweep(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi, const std::vector<double>& betas,
                     const std::vector<std::string>& cylinders, const ZeroTemperatureLimit& limit,
                     Execution exec = Execution::parallel);

// CSV with header "beta,<cyl>..." and a last row labelled "limit".
std::string to_csv(const BetaSweep& sweep);

struct DecayFit {
  std::string cylinder;
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

struct DecayReport {
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  std::vector<DecayFit> fits;  // only cylinders with enough usable points
};

// Least-squares slope of log|mu_beta[w] - limit[w]| against beta on `samples`
// equally spaced points of the window. Points with error below 1e-14 are skipped.
DecayReport decay_report(const Digraph& g, const PotentialPhi& phi, const PotentialPsi& psi,
                         const ZeroTemperatureLimit& limit, double beta_lo, double beta_hi,
                         const std::vector<std::string>& cylinders, int samples = 11);

// Mass of symbols outside the heavy components, per beta.
std::vector<double> concentration_check(const NormalizedSystem& sys, const HeavyDecomposition& heavy,
                                        const std::vector<double>& betas);

// log rho of the (beta phi + psi) matrix of a normalized system, per beta.
std::vector<double> spectral_radius_check(const NormalizedSystem& sys, const std::vector<double>& betas,
                                          const EigenOptions& opt = {});

struct ExcursionComparison {
  int vertex = 0;
  double finite = 0.0;    // sum_k Mtilde^k(a,a) / rho^k
  double limit = 0.0;     // sum_k Mbar_psi^k(a,a)
  double difference = 0.0;
};

std::vector<ExcursionComparison> excursion_series_check(const NormalizedSystem& sys, const HeavyDecomposition& heavy,
                                                        double beta);

}  // namespace ztl
