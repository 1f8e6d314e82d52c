#include "ellband/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ellband/common.hpp"
#include "ellband/numerics.hpp"

namespace ellband {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

void check_unit_interval(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::domain_error("quantile level must be in [0, 1]");
  }
}

// Inverse of gamma_p(a, .) with a Wilson-Hilferty seed and bracketed Newton.
double gamma_quantile(double a, double q) {
  if (q == 0.0) return 0.0;
  if (q == 1.0) return kInf;
  const double z = normal_quantile(q);
  const double c = 2.0 / (9.0 * a);
  double x = a * std::pow(1.0 - c + z * std::sqrt(c), 3.0);
  if (!(x > 0.0)) x = a * std::exp((std::log(q) + std::lgamma(a + 1.0)) / a);
  if (!(x > 0.0) || !std::isfinite(x)) x = a;
  double lo = 0.0;
  double hi = kInf;
  const double lg = std::lgamma(a);
  const double tol = 1e-13 * std::min(q, 1.0 - q);
  for (int iter = 0; iter < 200; ++iter) {
    const double err = gamma_p(a, x) - q;
    if (err > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    if (std::fabs(err) <= tol) return x;
    const double log_pdf = (a - 1.0) * std::log(x) - x - lg;
    double next = x - err * std::exp(-log_pdf);
    if (!std::isfinite(next) || next <= lo || next >= hi) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x;
    }
    if (next == x) return x;
    x = next;
  }
  return x;
}

double select_kth(std::vector<double>& values, size_t k) {
  std::nth_element(values.begin(), values.begin() + static_cast<long>(k),
                   values.end());
  return values[k];
}

// S_n finite-sample corrections: tabulated for n <= 9, parity formula beyond.
double sn_correction(size_t n) {
  static constexpr double table[] = {0.743, 1.851, 0.954, 1.351,
                                     0.993, 1.198, 1.005, 1.131};
  if (n <= 9) return table[n - 2];
  if (n % 2 == 1) return static_cast<double>(n) / (n - 0.9);
  return 1.0;
}

double qn_correction(size_t n) {
  static constexpr double table[] = {0.399, 0.994, 0.512, 0.844,
                                     0.611, 0.857, 0.669, 0.872};
  if (n <= 9) return table[n - 2];
  if (n % 2 == 1) return static_cast<double>(n) / (n + 1.4);
  return static_cast<double>(n) / (n + 3.8);
}

void require_size(std::span<const double> data, size_t min_size) {
  if (data.size() < min_size) {
    throw std::invalid_argument("sample too small");
  }
}

// Count of x_j within [x_i - t, x_i + t] for sorted x, including j = i.
size_t count_within(const std::vector<double>& sorted, double center, double t) {
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), center - t);
  const auto hi = std::upper_bound(sorted.begin(), sorted.end(), center + t);
  return static_cast<size_t>(hi - lo);
}

// k-th smallest (1-based) of {|x_i - x_j| : j = 1..n} by bisection on the
// distance value; sorted input.
double kth_abs_difference(const std::vector<double>& sorted, double center,
                          size_t k) {
  double lo = 0.0;
  double hi = std::max(sorted.back() - center, center - sorted.front());
  for (int iter = 0; iter < 100 && lo < hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (count_within(sorted, center, mid) >= k) {
      hi = mid;
    } else {
      lo = std::nextafter(mid, kInf);
    }
  }
  return hi;
}

size_t count_pairs_within(const std::vector<double>& sorted, double t) {
  size_t count = 0;
  size_t j = 0;
  for (size_t i = 1; i < sorted.size(); ++i) {
    while (sorted[i] - sorted[j] > t) ++j;
    count += i - j;
  }
  return count;
}

double sn_core(std::span<const double> data) {
  const size_t n = data.size();
  // Inner: high median, rank floor(n/2)+1 of the n distances |x_i - x_j| over
  // all j (the self-distance 0 included); outer: low median over i.  This is
  // the convention the published finite-sample corrections de-bias.
  const size_t inner_rank = n / 2 + 1;
  const size_t outer_rank = (n + 1) / 2;
  std::vector<double> inner_medians(n);
  if (n <= 2048) {
    std::vector<double> distances(n);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) distances[j] = std::fabs(data[i] - data[j]);
      inner_medians[i] = select_kth(distances, inner_rank - 1);
    }
  } else {
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < n; ++i) {
      inner_medians[i] = kth_abs_difference(sorted, sorted[i], inner_rank);
    }
  }
  return select_kth(inner_medians, outer_rank - 1);
}

double qn_core(std::span<const double> data) {
  const size_t n = data.size();
  const size_t h = n / 2 + 1;
  const size_t k = h * (h - 1) / 2;  // 1-based rank among the C(n,2) distances
  if (n <= 2048) {
    std::vector<double> distances;
    distances.reserve(n * (n - 1) / 2);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        distances.push_back(std::fabs(data[i] - data[j]));
      }
    }
    return select_kth(distances, k - 1);
  }
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  double lo = 0.0;
  double hi = sorted.back() - sorted.front();
  for (int iter = 0; iter < 100 && lo < hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (count_pairs_within(sorted, mid) >= k) {
      hi = mid;
    } else {
      lo = std::nextafter(mid, kInf);
    }
  }
  return hi;
}

double golden_section_max(double lo, double hi, double tol,
                          const auto& objective) {
  constexpr double inv_phi = 0.61803398874989485;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::uniform: return "uniform";
    case Family::normal: return "normal";
    case Family::chi_square: return "chi-square";
    case Family::student_t: return "student-t";
    case Family::exponential: return "exponential";
  }
  return "?";
}

Family family_from_name(std::string_view name) {
  if (name == "uniform") return Family::uniform;
  if (name == "normal") return Family::normal;
  if (name == "chi-square") return Family::chi_square;
  if (name == "student-t") return Family::student_t;
  if (name == "exponential") return Family::exponential;
  throw std::invalid_argument("unknown distribution family '" +
                              std::string(name) + "'");
}

ReferenceDistribution ReferenceDistribution::normal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("sigma must be > 0");
  return {Family::normal, mu, sigma};
}

ReferenceDistribution ReferenceDistribution::chi_square(double df) {
  if (!(df > 0.0)) throw std::domain_error("df must be > 0");
  return {Family::chi_square, df, 1.0};
}

ReferenceDistribution ReferenceDistribution::student_t(double df) {
  if (!(df > 0.0)) throw std::domain_error("df must be > 0");
  return {Family::student_t, df, 1.0};
}

ReferenceDistribution ReferenceDistribution::exponential(double rate) {
  if (!(rate > 0.0)) throw std::domain_error("rate must be > 0");
  return {Family::exponential, rate, 1.0};
}

double ReferenceDistribution::quantile(double q) const {
  check_unit_interval(q);
  switch (family) {
    case Family::uniform:
      return q;
    case Family::normal:
      if (q == 0.0) return -kInf;
      if (q == 1.0) return kInf;
      return p1 + p2 * normal_quantile(q);
    case Family::chi_square:
      return 2.0 * gamma_quantile(p1 / 2.0, q);
    case Family::student_t: {
      if (q == 0.0) return -kInf;
      if (q == 1.0) return kInf;
      if (q == 0.5) return 0.0;
      const double tail = std::min(q, 1.0 - q);
      const double x = beta_quantile(2.0 * tail, {p1 / 2.0, 0.5});
      const double t = std::sqrt(p1 * (1.0 - x) / x);
      return q < 0.5 ? -t : t;
    }
    case Family::exponential:
      if (q == 1.0) return kInf;
      return -std::log1p(-q) / p1;
  }
  return 0.0;
}

double ReferenceDistribution::cdf(double x) const {
  switch (family) {
    case Family::uniform:
      return std::clamp(x, 0.0, 1.0);
    case Family::normal:
      return normal_cdf((x - p1) / p2);
    case Family::chi_square:
      return x <= 0.0 ? 0.0 : gamma_p(p1 / 2.0, x / 2.0);
    case Family::student_t: {
      if (x == 0.0) return 0.5;
      const double w = p1 / (p1 + x * x);
      const double tail = 0.5 * beta_cdf(w, {p1 / 2.0, 0.5});
      return x > 0.0 ? 1.0 - tail : tail;
    }
    case Family::exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-p1 * x);
  }
  return 0.0;
}

double ReferenceDistribution::log_density(double x) const {
  switch (family) {
    case Family::uniform:
      return (x >= 0.0 && x <= 1.0) ? 0.0 : -kInf;
    case Family::normal: {
      const double z = (x - p1) / p2;
      return -0.5 * z * z - std::log(p2) - kLogSqrt2Pi;
    }
    case Family::chi_square: {
      if (x <= 0.0) return -kInf;
      const double half = p1 / 2.0;
      return (half - 1.0) * std::log(x) - x / 2.0 - std::lgamma(half) -
             half * 0.69314718055994530942;
    }
    case Family::student_t: {
      const double half = (p1 + 1.0) / 2.0;
      return std::lgamma(half) - std::lgamma(p1 / 2.0) -
             0.5 * std::log(p1 * 3.14159265358979323846) -
             half * std::log1p(x * x / p1);
    }
    case Family::exponential:
      return x < 0.0 ? -kInf : std::log(p1) - p1 * x;
  }
  return -kInf;
}

const char* estimator_name(Estimator e) {
  switch (e) {
    case Estimator::known_params: return "known-params";
    case Estimator::mean_sd: return "mean-sd";
    case Estimator::median_mad: return "median-mad";
    case Estimator::median_qn: return "median-qn";
    case Estimator::median_sn: return "median-sn";
    case Estimator::mle: return "mle";
  }
  return "?";
}

Estimator estimator_from_name(std::string_view name) {
  if (name == "known-params") return Estimator::known_params;
  if (name == "mean-sd") return Estimator::mean_sd;
  if (name == "median-mad") return Estimator::median_mad;
  if (name == "median-qn") return Estimator::median_qn;
  if (name == "median-sn") return Estimator::median_sn;
  if (name == "mle") return Estimator::mle;
  throw std::invalid_argument("unknown estimation method '" +
                              std::string(name) + "'");
}

double sample_median(std::span<const double> data) {
  require_size(data, 1);
  std::vector<double> v(data.begin(), data.end());
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

double robust_scale_sn(std::span<const double> data) {
  require_size(data, 2);
  const double raw = 1.1926 * sn_core(data);
  const double scale = sn_correction(data.size()) * raw;
  if (!(scale > 0.0)) throw degenerate_sample_error("S_n scale estimate is zero");
  return scale;
}

double robust_scale_qn(std::span<const double> data) {
  require_size(data, 2);
  const double raw = 2.2219 * qn_core(data);
  const double scale = qn_correction(data.size()) * raw;
  if (!(scale > 0.0)) throw degenerate_sample_error("Q_n scale estimate is zero");
  return scale;
}

std::pair<double, double> estimate_normal(std::span<const double> data,
                                          Estimator method) {
  require_size(data, 2);
  const size_t n = data.size();
  switch (method) {
    case Estimator::known_params:
      throw std::invalid_argument(
          "known-params carries explicit values; nothing to estimate");
    case Estimator::mean_sd:
    case Estimator::mle: {
      const double mean =
          std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(n);
      double ss = 0.0;
      for (double x : data) ss += (x - mean) * (x - mean);
      const size_t divisor = method == Estimator::mle ? n : n - 1;
      const double sd = std::sqrt(ss / static_cast<double>(divisor));
      if (!(sd > 0.0)) throw degenerate_sample_error("sample sd is zero");
      return {mean, sd};
    }
    case Estimator::median_mad: {
      const double med = sample_median(data);
      std::vector<double> dev(n);
      for (size_t i = 0; i < n; ++i) dev[i] = std::fabs(data[i] - med);
      const double mad = 1.4826 * sample_median(dev);
      if (!(mad > 0.0)) throw degenerate_sample_error("MAD is zero");
      return {med, mad};
    }
    case Estimator::median_qn:
      return {sample_median(data), robust_scale_qn(data)};
    case Estimator::median_sn:
      return {sample_median(data), robust_scale_sn(data)};
  }
  throw std::invalid_argument("unknown estimation method");
}

ReferenceDistribution mle_fit(std::span<const double> data, Family family) {
  require_size(data, 2);
  const size_t n = data.size();
  switch (family) {
    case Family::uniform:
      throw std::invalid_argument("uniform reference has no parameters to fit");
    case Family::normal: {
      const auto [mu, sigma] = estimate_normal(data, Estimator::mle);
      return ReferenceDistribution::normal(mu, sigma);
    }
    case Family::exponential: {
      const double mean =
          std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(n);
      for (double x : data) {
        if (x < 0.0) {
          throw std::domain_error("exponential data must be nonnegative");
        }
      }
      if (!(mean > 0.0)) throw degenerate_sample_error("sample mean is zero");
      return ReferenceDistribution::exponential(1.0 / mean);
    }
    case Family::chi_square: {
      double sum_log = 0.0;
      double sum = 0.0;
      for (double x : data) {
        if (!(x > 0.0)) {
          throw std::domain_error("chi-square data must be positive");
        }
        sum_log += std::log(x);
        sum += x;
      }
      const double mean = sum / static_cast<double>(n);
      // Profile log-likelihood in df, dropping data-only terms.
      const auto loglik = [&](double df) {
        const double half = df / 2.0;
        return (half - 1.0) * sum_log -
               static_cast<double>(n) *
                   (std::lgamma(half) + half * 0.69314718055994530942);
      };
      double hi = std::max(8.0 * mean, 16.0);
      while (loglik(hi) > loglik(hi * 0.999) && hi < 1e9) hi *= 2.0;
      const double df = golden_section_max(1e-6, hi, 1e-8, loglik);
      return ReferenceDistribution::chi_square(df);
    }
    case Family::student_t: {
      const auto loglik = [&](double df) {
        const double half = (df + 1.0) / 2.0;
        const double front =
            std::lgamma(half) - std::lgamma(df / 2.0) -
            0.5 * std::log(df * 3.14159265358979323846);
        double s = 0.0;
        for (double x : data) s += std::log1p(x * x / df);
        return static_cast<double>(n) * front - half * s;
      };
      double hi = 64.0;
      while (loglik(hi) > loglik(hi * 0.999) && hi < 1e6) hi *= 2.0;
      const double df = golden_section_max(0.02, hi, 1e-8, loglik);
      return ReferenceDistribution::student_t(df);
    }
  }
  throw std::invalid_argument("unknown family");
}

}  // namespace ellband
