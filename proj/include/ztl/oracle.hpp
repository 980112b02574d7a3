#pragma once

#include "ztl/finite_beta.hpp"
#include "ztl/potential.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace ztl {

struct RandomSystemOptions {
  int min_symbols = 2;
  int max_symbols = 4;
  double min_density = 0.35;
  double max_density = 0.8;
  int phi_denominator = 2;  // phi on {-2, -2 + 1/d, ..., 0}
  double psi_amplitude = 0.5;
  double psi_probability = 0.5;  // chance that psi is nonzero at all
};

// Irreducible graph with phi from a rational grid and psi zero or uniform in [-amp, amp].
System random_system(std::mt19937_64& rng, const RandomSystemOptions& opt = {});

struct OracleOptions {
  RandomSystemOptions systems;
  double beta_lo = 30.0;
  double beta_hi = 60.0;
  double tolerance = 1e-4;
  double error_floor = 1e-14;
  double near_tie = 1e-6;  // component pressure gaps below this (but not ties) are resampled
  int max_resamples = 100;
};

struct OracleTrial {
  int index = 0;
  int symbols = 0;
  int resamples = 0;
  double error_lo = 0.0;  // max over symbols of |mu_beta[a] - limit[a]|
  double error_hi = 0.0;
  bool agrees = false;    // error_hi within tolerance
  bool decreases = false; // error_hi <= error_lo up to the floor
  System system;
};

// True when some maximizing component at some level has pressure within near_tie of
// the maximum without being tied with it.
bool near_tie(const ZeroTemperatureLimit& lim, double gap, double eps_rho);

OracleTrial oracle_trial(std::uint64_t seed, int index, const OracleOptions& opt = {});

std::vector<OracleTrial> oracle_trials(std::uint64_t seed, int count, const OracleOptions& opt = {},
                                       Execution exec = Execution::parallel);

}  // namespace ztl
