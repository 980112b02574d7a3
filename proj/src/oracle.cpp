#include "ztl/oracle.hpp"

#include "ztl/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace ztl {

System random_system(std::mt19937_64& rng, const RandomSystemOptions& opt) {
  std::uniform_int_distribution<int> size(opt.min_symbols, opt.max_symbols);
  std::uniform_real_distribution<double> density(opt.min_density, opt.max_density);
  const int n = size(rng);
  const double d = density(rng);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  for (;;) {
    std::bernoulli_distribution coin(d);
    std::vector<Arrow> arrows;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (coin(rng)) arrows.push_back({i, j});
      }
    }
    Digraph g(names, arrows);
    if (!is_irreducible(g)) continue;
    std::uniform_int_distribution<int> grid(-2 * opt.phi_denominator, 0);
    std::uniform_real_distribution<double> small(-opt.psi_amplitude, opt.psi_amplitude);
    const bool with_psi = std::bernoulli_distribution(opt.psi_probability)(rng);
    System s{g, {std::vector<Rational>(g.arrow_count())}, zero_psi(g)};
    for (std::size_t k = 0; k < g.arrow_count(); ++k) {
      s.phi.values[k] = Rational(grid(rng), opt.phi_denominator);
      if (with_psi) s.psi.values[k] = small(rng);
    }
    return s;
  }
}

bool near_tie(const ZeroTemperatureLimit& lim, double gap, double eps_rho) {
  for (const auto& level : lim.levels) {
    for (const auto& c : level.heavy.components) {
      const double below = -c.log_rho;
      if (below > eps_rho && below < gap) return true;
    }
  }
  return false;
}

namespace {

double max_error(const System& s, const ZeroTemperatureLimit& lim, double beta) {
  MarkovGibbsMeasure mu = equilibrium_state(s.graph, s.phi, s.psi, beta);
  double err = 0.0;
  for (int a = 0; a < s.graph.size(); ++a) err = std::max(err, std::abs(mu.mass(a) - lim.symbol_mass[a]));
  return err;
}

}  // namespace

OracleTrial oracle_trial(std::uint64_t seed, int index, const OracleOptions& opt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  OracleTrial t;
  t.index = index;
  for (;; ++t.resamples) {
    if (t.resamples > opt.max_resamples) throw Error(ErrorKind::convergence_failure, "too many degenerate samples");
    System s = random_system(rng, opt.systems);
    ZeroTemperatureLimit lim = zero_temperature_limit(s.graph, s.phi, s.psi);
    if (near_tie(lim, opt.near_tie, RenormOptions{}.normalize.eps_rho)) continue;
    t.symbols = s.graph.size();
    t.error_lo = max_error(s, lim, opt.beta_lo);
    t.error_hi = max_error(s, lim, opt.beta_hi);
    t.agrees = t.error_hi <= opt.tolerance;
    t.decreases = t.error_hi <= t.error_lo + opt.error_floor;
    t.system = std::move(s);
    return t;
  }
}

std::vector<OracleTrial> oracle_trials(std::uint64_t seed, int count, const OracleOptions& opt, Execution exec) {
  std::vector<OracleTrial> out(static_cast<std::size_t>(count));
  if (exec == Execution::serial) {
    for (int i = 0; i < count; ++i) out[i] = oracle_trial(seed, i, opt);
    return out;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      out[i] = oracle_trial(seed, i, opt);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace ztl
