#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace ellband {

enum class Family { uniform, normal, chi_square, student_t, exponential };

const char* family_name(Family f);
Family family_from_name(std::string_view name);

// A reference law with quantile / cdf / log-density.  Parameters are fixed at
// construction; uniform is the standard U(0,1).
struct ReferenceDistribution {
  Family family = Family::uniform;
  double p1 = 0.0;  // normal mu; chi-square df; student-t df; exponential rate
  double p2 = 1.0;  // normal sigma

  static ReferenceDistribution uniform() { return {Family::uniform, 0.0, 1.0}; }
  static ReferenceDistribution normal(double mu, double sigma);
  static ReferenceDistribution chi_square(double df);
  static ReferenceDistribution student_t(double df);
  static ReferenceDistribution exponential(double rate);

  // Quantile accepts [0, 1]; the endpoints map to the support limits
  // (+-inf where the support is unbounded).
  double quantile(double q) const;
  double cdf(double x) const;
  double log_density(double x) const;
};

enum class Estimator {
  known_params,
  mean_sd,
  median_mad,
  median_qn,
  median_sn,
  mle,
};

const char* estimator_name(Estimator e);
Estimator estimator_from_name(std::string_view name);

double sample_median(std::span<const double> data);

// Rousseeuw-Croux S_n: 1.1926 * lomed_i himed_j |x_i - x_j|, with the
// finite-sample corrections from the originating literature.
double robust_scale_sn(std::span<const double> data);

// Rousseeuw-Croux Q_n: 2.2219 * k-th order statistic of the pairwise
// distances, k = C(h, 2), h = floor(n/2) + 1, finite-sample corrected.
double robust_scale_qn(std::span<const double> data);

// (mu, sigma) estimate for a normal reference per the chosen method.  Throws
// degenerate_sample_error when the scale estimate vanishes.
std::pair<double, double> estimate_normal(std::span<const double> data,
                                          Estimator method);

// Maximum likelihood fit.  Closed forms for normal/exponential; chi-square
// and student-t degrees of freedom by golden-section search on the
// log-likelihood (tolerance 1e-8 on the parameter).
ReferenceDistribution mle_fit(std::span<const double> data, Family family);

}  // namespace ellband
