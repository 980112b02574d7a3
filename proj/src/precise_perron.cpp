#include "precise_perron.hpp"

#include "ztl/error.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ztl::detail {

namespace {

class MpArray {
 public:
  MpArray(std::size_t n, mpfr_prec_t prec) : data_(n) {
    for (auto& x : data_) {
      mpfr_init2(&x, prec);
      mpfr_set_zero(&x, 1);
    }
  }
  ~MpArray() {
    for (auto& x : data_) mpfr_clear(&x);
  }
  MpArray(const MpArray&) = delete;
  MpArray& operator=(const MpArray&) = delete;

  mpfr_ptr operator[](std::size_t i) { return &data_[i]; }
  mpfr_srcptr operator[](std::size_t i) const { return &data_[i]; }

 private:
  std::vector<__mpfr_struct> data_;
};

struct Solver {
  int n;
  mpfr_prec_t prec;
  MpArray a;     // scaled matrix, row major, in elimination order
  MpArray u;     // elimination workspace
  MpArray t;     // scratch: [0] multiplier, [1] product, [2..] misc
  std::vector<char> nz;  // pattern of a

  Solver(int n_, mpfr_prec_t p) : n(n_), prec(p), a(n_ * n_, p), u(n_ * n_, p), t(8, p), nz(n_ * n_, 0) {}

  // Unpivoted elimination of sI - A (or its transpose). Returns the index of
  // the first non-positive pivot among the first n-1, or -1. The last pivot
  // is left in u[(n-1)*n + n-1].
  int factor(mpfr_srcptr s, bool transpose) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        std::size_t src = transpose ? j * n + i : i * n + j;
        mpfr_neg(u[i * n + j], a[src], MPFR_RNDN);
        if (i == j) mpfr_add(u[i * n + j], u[i * n + j], s, MPFR_RNDN);
      }
    }
    for (int k = 0; k + 1 < n; ++k) {
      mpfr_srcptr piv = u[k * n + k];
      if (mpfr_sgn(piv) <= 0) return k;
      for (int i = k + 1; i < n; ++i) {
        if (mpfr_zero_p(u[i * n + k])) continue;
        mpfr_div(t[0], u[i * n + k], piv, MPFR_RNDN);
        for (int j = k + 1; j < n; ++j) {
          if (mpfr_zero_p(u[k * n + j])) continue;
          mpfr_mul(t[1], t[0], u[k * n + j], MPFR_RNDN);
          mpfr_sub(u[i * n + j], u[i * n + j], t[1], MPFR_RNDN);
        }
      }
    }
    return -1;
  }

  mpfr_srcptr last_pivot() const { return u[(n - 1) * n + (n - 1)]; }

  // Null vector of the factored matrix, ignoring the last pivot.
  void back_substitute(MpArray& x) {
    mpfr_set_ui(x[n - 1], 1, MPFR_RNDN);
    for (int k = n - 2; k >= 0; --k) {
      mpfr_set_zero(t[2], 1);
      for (int j = k + 1; j < n; ++j) {
        if (mpfr_zero_p(u[k * n + j])) continue;
        mpfr_mul(t[1], u[k * n + j], x[j], MPFR_RNDN);
        mpfr_add(t[2], t[2], t[1], MPFR_RNDN);
      }
      mpfr_div(x[k], t[2], u[k * n + k], MPFR_RNDN);
      mpfr_neg(x[k], x[k], MPFR_RNDN);
    }
  }
};

struct RunResult {
  double log_rho;
  std::vector<double> log_v, log_w;
  double residual;
};

RunResult run(const Digraph& g, const std::vector<double>& log_entries, const std::vector<int>& order,
              mpfr_prec_t prec) {
  const int n = g.size();
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  double shift = *std::max_element(log_entries.begin(), log_entries.end());
  Solver sv(n, prec);
  MpArray rowsum(n, prec);
  for (std::size_t k = 0; k < g.arrow_count(); ++k) {
    const auto& e = g.arrow(k);
    std::size_t idx = pos[e.from] * n + pos[e.to];
    mpfr_set_d(sv.t[3], log_entries[k], MPFR_RNDN);
    mpfr_sub_d(sv.t[3], sv.t[3], shift, MPFR_RNDN);
    mpfr_exp(sv.a[idx], sv.t[3], MPFR_RNDN);
    sv.nz[idx] = 1;
    mpfr_add(rowsum[pos[e.from]], rowsum[pos[e.from]], sv.a[idx], MPFR_RNDN);
  }

  MpArray lo(1, prec), hi(1, prec), flo(1, prec), fhi(1, prec), s(1, prec), width(1, prec), tmp(2, prec);
  // Upper bound: maximal row sum, pushed up slightly so all pivots are positive.
  mpfr_set_zero(hi[0], 1);
  for (int i = 0; i < n; ++i) mpfr_max(hi[0], hi[0], rowsum[i], MPFR_RNDN);
  mpfr_mul_d(hi[0], hi[0], 1.0 + 1e-9, MPFR_RNDU);
  while (sv.factor(hi[0], false) >= 0 || mpfr_sgn(sv.last_pivot()) <= 0) mpfr_mul_ui(hi[0], hi[0], 2, MPFR_RNDN);
  mpfr_set(fhi[0], sv.last_pivot(), MPFR_RNDN);
  mpfr_set_zero(lo[0], 1);
  bool smooth = false;
  int side = 0;
  const long max_steps = 40L * static_cast<long>(prec) + 200;
  for (long step = 0; step < max_steps; ++step) {
    mpfr_sub(width[0], hi[0], lo[0], MPFR_RNDN);
    mpfr_mul_2si(tmp[0], hi[0], -static_cast<long>(prec) + 12, MPFR_RNDN);
    if (mpfr_lessequal_p(width[0], tmp[0])) break;
    bool bisect = !smooth || (step % 4 == 3);
    if (bisect) {
      mpfr_add(s[0], lo[0], hi[0], MPFR_RNDN);
      mpfr_div_2ui(s[0], s[0], 1, MPFR_RNDN);
    } else {
      // Regula falsi with the Illinois modification.
      mpfr_sub(tmp[0], fhi[0], flo[0], MPFR_RNDN);
      mpfr_mul(tmp[1], fhi[0], width[0], MPFR_RNDN);
      mpfr_div(tmp[1], tmp[1], tmp[0], MPFR_RNDN);
      mpfr_sub(s[0], hi[0], tmp[1], MPFR_RNDN);
      if (!mpfr_greater_p(s[0], lo[0]) || !mpfr_less_p(s[0], hi[0])) {
        mpfr_add(s[0], lo[0], hi[0], MPFR_RNDN);
        mpfr_div_2ui(s[0], s[0], 1, MPFR_RNDN);
      }
    }
    int bad = sv.factor(s[0], false);
    if (bad >= 0) {
      mpfr_set(lo[0], s[0], MPFR_RNDN);
      smooth = false;
      side = 0;
      continue;
    }
    if (mpfr_sgn(sv.last_pivot()) > 0) {
      mpfr_set(hi[0], s[0], MPFR_RNDN);
      mpfr_set(fhi[0], sv.last_pivot(), MPFR_RNDN);
      if (side == 1 && smooth) mpfr_div_2ui(flo[0], flo[0], 1, MPFR_RNDN);
      side = 1;
    } else {
      mpfr_set(lo[0], s[0], MPFR_RNDN);
      mpfr_set(flo[0], sv.last_pivot(), MPFR_RNDN);
      if (mpfr_zero_p(flo[0])) {
        mpfr_set(hi[0], lo[0], MPFR_RNDN);
        break;
      }
      if (side == -1 && smooth) mpfr_div_2ui(fhi[0], fhi[0], 1, MPFR_RNDN);
      side = -1;
      smooth = true;
    }
  }

  MpArray v(n, prec), w(n, prec);
  sv.factor(hi[0], false);
  sv.back_substitute(v);
  sv.factor(hi[0], true);
  sv.back_substitute(w);

  // Normalize w'v = 1 and measure residuals relative to rho and sup norms.
  MpArray acc(4, prec);
  mpfr_set_zero(acc[0], 1);
  for (int i = 0; i < n; ++i) {
    mpfr_mul(acc[1], w[i], v[i], MPFR_RNDN);
    mpfr_add(acc[0], acc[0], acc[1], MPFR_RNDN);
  }
  double resid = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    MpArray& x = pass == 0 ? v : w;
    mpfr_set_zero(acc[2], 1);
    for (int i = 0; i < n; ++i) mpfr_max(acc[2], acc[2], x[i], MPFR_RNDN);
    for (int i = 0; i < n; ++i) {
      mpfr_set_zero(acc[1], 1);
      for (int j = 0; j < n; ++j) {
        std::size_t idx = pass == 0 ? i * n + j : j * n + i;
        if (!sv.nz[idx]) continue;
        mpfr_mul(acc[3], sv.a[idx], x[j], MPFR_RNDN);
        mpfr_add(acc[1], acc[1], acc[3], MPFR_RNDN);
      }
      mpfr_mul(acc[3], hi[0], x[i], MPFR_RNDN);
      mpfr_sub(acc[1], acc[1], acc[3], MPFR_RNDN);
      mpfr_abs(acc[1], acc[1], MPFR_RNDN);
      mpfr_div(acc[1], acc[1], acc[2], MPFR_RNDN);
      mpfr_div(acc[1], acc[1], hi[0], MPFR_RNDN);
      resid = std::max(resid, mpfr_get_d(acc[1], MPFR_RNDU));
    }
  }

  RunResult out;
  out.residual = resid;
  mpfr_log(tmp[0], hi[0], MPFR_RNDN);
  mpfr_add_d(tmp[0], tmp[0], shift, MPFR_RNDN);
  out.log_rho = mpfr_get_d(tmp[0], MPFR_RNDN);
  mpfr_log(acc[0], acc[0], MPFR_RNDN);
  out.log_v.resize(n);
  out.log_w.resize(n);
  for (int i = 0; i < n; ++i) {
    mpfr_log(tmp[0], v[pos[i]], MPFR_RNDN);
    out.log_v[i] = mpfr_get_d(tmp[0], MPFR_RNDN);
    mpfr_log(tmp[0], w[pos[i]], MPFR_RNDN);
    mpfr_sub(tmp[0], tmp[0], acc[0], MPFR_RNDN);
    out.log_w[i] = mpfr_get_d(tmp[0], MPFR_RNDN);
  }
  return out;
}

}  // namespace

PreciseResult precise_perron(const Digraph& g, const std::vector<double>& log_entries) {
  const int n = g.size();
  PreciseResult res;
  if (n == 1) {
    res.log_rho = log_entries.at(0);
    res.log_v = {0.0};
    res.log_w = {0.0};
    res.bits = 53;
    return res;
  }
  double lmax = *std::max_element(log_entries.begin(), log_entries.end());
  double lmin = *std::min_element(log_entries.begin(), log_entries.end());
  double span = lmax - lmin;

  // Eliminate the heaviest vertex last: a rough row-sum weighted ordering
  // widens the gap between rho and the leading principal block.
  std::vector<double> weight(n, -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < g.arrow_count(); ++k) {
    const auto& e = g.arrow(k);
    weight[e.from] = std::max(weight[e.from], log_entries[k]);
    weight[e.to] = std::max(weight[e.to], log_entries[k]);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return weight[x] < weight[y]; });

  mpfr_prec_t prec = static_cast<mpfr_prec_t>(96 + 3.0 * span / std::log(2.0));
  RunResult prev = run(g, log_entries, order, prec);
  for (int attempt = 0; attempt < 6; ++attempt) {
    mpfr_prec_t next = 2 * prec;
    RunResult cur = run(g, log_entries, order, next);
    double diff = std::abs(cur.log_rho - prev.log_rho) / std::max(1.0, std::abs(cur.log_rho));
    for (int i = 0; i < n; ++i) {
      double lp = (cur.log_v[i] + cur.log_w[i]) - (prev.log_v[i] + prev.log_w[i]);
      diff = std::max(diff, std::abs(lp));
    }
    prec = next;
    prev = std::move(cur);
    if (diff < 1e-13) {
      res.log_rho = prev.log_rho;
      res.log_v = std::move(prev.log_v);
      res.log_w = std::move(prev.log_w);
      res.residual = prev.residual;
      res.bits = prec;
      return res;
    }
  }
  throw Error(ErrorKind::convergence_failure, "high-precision Perron solve did not stabilise");
}

}  // namespace ztl::detail
