#pragma once

// Test-only numerical oracles, kept independent of the library's own
// evaluation paths.

#include <cmath>
#include <functional>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a,
                      double b) {
  const double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double whole,
                                   double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = simpson(f, a, m);
  const double right = simpson(f, m, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, right, tol / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-13) {
  return adaptive_simpson_rec(f, a, b, simpson(f, a, b), tol, 60);
}

// Beta(a, b) cdf by quadrature of the density under t = sin^2(theta), which
// removes the endpoint singularities for a, b >= 1/2.
inline double beta_cdf_quadrature(double x, double a, double b) {
  const double log_norm =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  const auto integrand = [=](double theta) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    if (s <= 0.0 || c <= 0.0) return 0.0;
    return 2.0 * std::exp(log_norm + (2.0 * a - 1.0) * std::log(s) +
                          (2.0 * b - 1.0) * std::log(c));
  };
  return adaptive_simpson(integrand, 0.0, std::asin(std::sqrt(x)));
}

// Kolmogorov distribution through the Jacobi-theta transformed series, a
// different route than the alternating exponential series.
inline double kolmogorov_cdf_theta(double x) {
  const double pi = 3.14159265358979323846;
  double s = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double odd = 2.0 * k - 1.0;
    s += std::exp(-odd * odd * pi * pi / (8.0 * x * x));
  }
  return std::sqrt(2.0 * pi) / x * s;
}

inline double kolmogorov_quantile_theta(double p) {
  double lo = 0.01;
  double hi = 5.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_cdf_theta(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
