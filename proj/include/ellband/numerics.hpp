#pragma once

#include <vector>

namespace ellband {

// log(k!) for k = 0..n_max.  Immutable after construction; shared freely
// across threads.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(int n_max);

  double operator[](int k) const { return values_[static_cast<size_t>(k)]; }
  int n_max() const { return static_cast<int>(values_.size()) - 1; }

  // log C(n, k); requires 0 <= k <= n <= n_max.
  double log_choose(int n, int k) const {
    return values_[static_cast<size_t>(n)] - values_[static_cast<size_t>(k)] -
           values_[static_cast<size_t>(n - k)];
  }

 private:
  std::vector<double> values_;
};

// Shape parameters of a Beta distribution, both > 0.
struct BetaParams {
  double a;
  double b;
};

// log P(X = k) for X ~ Binomial(size, p), with the conventions 0*log(0) = 0
// and exact -inf where the pmf is zero.  Throws std::domain_error on p
// outside [0,1] or k > size.
double log_binomial_pmf(int k, int size, double p);

// Regularized incomplete beta I_x(a, b).  Throws std::domain_error for x
// outside [0,1] or non-positive shapes.
double beta_cdf(double x, BetaParams params);

// Inverse of beta_cdf in x.  q = 0 and q = 1 return the endpoints; otherwise
// converges to a cdf residual around 1e-13 relative to min(q, 1-q).
double beta_quantile(double q, BetaParams params);

// Same, warm-started from `guess` (clamped into (0,1)).  Useful when solving
// a sweep of nearby quantiles.
double beta_quantile_guess(double q, BetaParams params, double guess);

// Asymptotic Kolmogorov-Smirnov critical half-width: K^{-1}(1 - alpha) / sqrt(n)
// where K is the limiting Kolmogorov distribution.
double kolmogorov_critical(double alpha, long n);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Standard normal cdf / quantile.  The quantile is the AS 241 rational
// approximation polished with one Newton step, good to full double precision
// over the whole open interval.
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace ellband
