#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "ellband/numerics.hpp"

namespace ellband::detail {

// Accumulates w * dbinom(d; t, p) into out[d - d_lo] for d in [d_lo, d_hi].
//
// The scan is seeded at the in-window mode with one log-space pmf evaluation
// and extended outward with the two-term pmf recurrence, so each window entry
// costs a handful of flops.  Seeding at the mode keeps intermediate values in
// double range even when the window tails underflow.
class BinomialWindow {
 public:
  BinomialWindow(const LogFactorialTable& lf, double p, double q)
      : lf_(lf), p_(p), q_(q) {
    if (p_ > 0.0 && q_ > 0.0) {
      log_p_ = std::log(p_);
      log_q_ = std::log(q_);
      p_over_q_ = p_ / q_;
      q_over_p_ = q_ / p_;
    }
  }

  void accumulate(double w, int t, int d_lo, int d_hi, double* out,
                  std::uint64_t* ops) const {
    if (d_hi > t) d_hi = t;
    if (d_lo < 0) d_lo = 0;
    if (d_lo > d_hi) return;
    if (ops) *ops += static_cast<std::uint64_t>(d_hi - d_lo + 1);
    if (p_ == 0.0) {
      if (d_lo == 0) out[0] += w;
      return;
    }
    if (q_ == 0.0) {
      if (d_hi == t) out[t - d_lo] += w;
      return;
    }
    const int mode = static_cast<int>((t + 1) * p_);
    int d0 = mode;
    if (d0 < d_lo) d0 = d_lo;
    if (d0 > d_hi) d0 = d_hi;
    const double pmf0 = std::exp(lf_.log_choose(t, d0) + d0 * log_p_ +
                                 (t - d0) * log_q_);
    double pmf = pmf0;
    out[d0 - d_lo] += w * pmf;
    for (int d = d0 + 1; d <= d_hi; ++d) {
      pmf *= p_over_q_ * static_cast<double>(t - d + 1) / static_cast<double>(d);
      out[d - d_lo] += w * pmf;
    }
    pmf = pmf0;
    for (int d = d0 - 1; d >= d_lo; --d) {
      pmf *= q_over_p_ * static_cast<double>(d + 1) / static_cast<double>(t - d);
      out[d - d_lo] += w * pmf;
    }
  }

 private:
  const LogFactorialTable& lf_;
  double p_ = 0.0;
  double q_ = 0.0;
  double log_p_ = -std::numeric_limits<double>::infinity();
  double log_q_ = -std::numeric_limits<double>::infinity();
  double p_over_q_ = 0.0;
  double q_over_p_ = 0.0;
};

}  // namespace ellband::detail
