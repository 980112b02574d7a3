#pragma once

#include "ztl/digraph.hpp"

#include <vector>

namespace ztl::detail {

struct PreciseResult {
  double log_rho = 0.0;
  std::vector<double> log_v, log_w;  // w'v = 1
  double residual = 0.0;
  long bits = 0;
};

// Perron root and vectors of an irreducible nonnegative matrix given by
// log-entries on the arrows of `g`, in MPFR arithmetic. The precision is
// doubled until two consecutive runs agree.
PreciseResult precise_perron(const Digraph& g, const std::vector<double>& log_entries);

}  // namespace ztl::detail
