#include "ellband/ell_one_sided.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "binomial_kernel.hpp"
#include "ellband/numerics.hpp"

namespace ellband {

namespace {

void validate_lower(std::span<const double> lower) {
  if (lower.empty()) {
    throw std::invalid_argument("one-sided band must be nonempty");
  }
  for (size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] >= 0.0) || !(lower[i] <= 1.0)) {
      throw std::invalid_argument("one-sided bounds must lie in [0, 1]");
    }
    if (i > 0 && !(lower[i] > lower[i - 1])) {
      throw std::invalid_argument("one-sided bounds must be strictly increasing");
    }
  }
}

struct BinStep {
  double p;
  double q;
};

BinStep bin_step(double prev, double next) {
  const double rem = 1.0 - prev;
  if (!(rem > 0.0)) return {0.0, 1.0};
  double p = (next - prev) / rem;
  double q = (1.0 - next) / rem;
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  if (q < 0.0) q = 0.0;
  return {p, q};
}

}  // namespace

OneSidedBounds bounds_from_eta_one_sided(int n, double eta) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::domain_error("eta must be in (0, 1)");
  }
  OneSidedBounds out;
  out.n = n;
  out.eta = eta;
  out.lower.resize(static_cast<size_t>(n));
  double guess = eta / n;
  for (int i = 1; i <= n; ++i) {
    const BetaParams params{static_cast<double>(i), static_cast<double>(n - i + 1)};
    guess = beta_quantile_guess(eta, params, guess);
    out.lower[static_cast<size_t>(i - 1)] = guess;
    guess = std::min(guess + 1.0 / (n + 1.0), 1.0 - 1e-16);
  }
  return out;
}

double global_level_one_sided_exact(std::span<const double> lower,
                                    std::uint64_t* ops) {
  validate_lower(lower);
  const int n = static_cast<int>(lower.size());
  const LogFactorialTable lf(n);
  std::vector<double> prev(static_cast<size_t>(n) + 1, 0.0);
  std::vector<double> cur(static_cast<size_t>(n) + 1, 0.0);
  cur[0] = std::pow(1.0 - lower[0], n);
  for (int k = 2; k <= n; ++k) {
    std::swap(prev, cur);
    const auto [p, q] = bin_step(lower[static_cast<size_t>(k - 2)],
                                 lower[static_cast<size_t>(k - 1)]);
    const detail::BinomialWindow window(lf, p, q);
    std::fill(cur.begin(), cur.begin() + k, 0.0);
    for (int m = 0; m <= k - 2; ++m) {
      window.accumulate(prev[static_cast<size_t>(m)], n - m, 0, k - 1 - m,
                        cur.data() + m, ops);
    }
  }
  double inside = 0.0;
  for (int j = 0; j <= n - 1; ++j) inside += cur[static_cast<size_t>(j)];
  return std::clamp(1.0 - inside, 0.0, 1.0);
}

std::uint64_t exact_one_sided_multiply_adds(int n) {
  // Row k touches sum_{m=0}^{k-2} (k - m) entries = k(k+1)/2 - 1.
  std::uint64_t total = 0;
  for (int k = 2; k <= n; ++k) {
    total += static_cast<std::uint64_t>(k) * (k + 1) / 2 - 1;
  }
  return total;
}

OneSidedApproxResult global_level_one_sided_approx(std::span<const double> lower,
                                                   int first_check,
                                                   int check_interval,
                                                   double max_rel_err) {
  validate_lower(lower);
  if (first_check < 2) throw std::domain_error("first_check must be >= 2");
  if (check_interval < 1) throw std::domain_error("check_interval must be >= 1");
  if (!(max_rel_err > 0.0)) throw std::domain_error("max_rel_err must be > 0");

  const int n = static_cast<int>(lower.size());
  const LogFactorialTable lf(n);
  OneSidedApproxResult res;
  std::vector<double> prev(static_cast<size_t>(n) + 1, 0.0);
  std::vector<double> cur(static_cast<size_t>(n) + 1, 0.0);
  cur[0] = std::pow(1.0 - lower[0], n);
  int skip = -1;
  double accumul_err_upper_bnd = 0.0;
  for (int k = 2; k <= n; ++k) {
    std::swap(prev, cur);
    const auto [p, q] = bin_step(lower[static_cast<size_t>(k - 2)],
                                 lower[static_cast<size_t>(k - 1)]);
    const detail::BinomialWindow window(lf, p, q);
    std::fill(cur.begin() + (skip + 1), cur.begin() + (k + 1), 0.0);
    for (int m = skip + 1; m <= k - 2; ++m) {
      const double w = prev[static_cast<size_t>(m)];
      if (w == 0.0) continue;
      window.accumulate(w, n - m, 0, k - 1 - m, cur.data() + m,
                        &res.multiply_adds);
    }
    if ((k > first_check && k % check_interval == 0) || k == first_check) {
      double available_err =
          max_rel_err - (1.0 + max_rel_err) * accumul_err_upper_bnd;
      double calculated_total_prob = 0.0;
      for (int j = skip + 1; j <= k - 1; ++j) {
        calculated_total_prob += cur[static_cast<size_t>(j)];
      }
      available_err -= max_rel_err * calculated_total_prob;
      double proposed_err = cur[static_cast<size_t>(skip + 1)];
      int proposed_skip = skip + 1;
      while (proposed_err <= available_err && proposed_skip < k) {
        ++proposed_skip;
        proposed_err += cur[static_cast<size_t>(proposed_skip)];
      }
      // The checkpoint is a drop point only when at least one new term fits
      // the budget.  The bound accumulates across drop points
      // (e_m = e_{m-1} + newly dropped mass); the printed form of the
      // algorithm overwrites it, which loses the earlier drops.
      if (proposed_skip - 1 > skip) {
        accumul_err_upper_bnd +=
            proposed_err - cur[static_cast<size_t>(proposed_skip)];
        skip = proposed_skip - 1;
        res.drop_points.emplace_back(k, skip);
      }
    }
  }
  double inside = 0.0;
  for (int l = skip + 1; l <= n - 1; ++l) inside += cur[static_cast<size_t>(l)];
  res.alpha = std::clamp(1.0 - inside, 0.0, 1.0);
  res.skip = skip;
  res.accumul_err_upper_bnd = accumul_err_upper_bnd;
  return res;
}

double multinomial_oracle_one_sided(std::span<const double> lower) {
  validate_lower(lower);
  const int n = static_cast<int>(lower.size());
  if (n > 8) throw std::length_error("multinomial oracle is limited to n <= 8");

  double inside = 0.0;
  // Bin j+1 spans (h_j, h_{j+1}] with h_{n+1} = 1; m_j points land there.
  const auto recurse = [&](auto&& self, int j, int s, double factor) -> void {
    if (j > n) {
      if (s == n) inside += factor;
      return;
    }
    const double hi_edge = j == n ? 1.0 : lower[static_cast<size_t>(j)];
    const double width = hi_edge - lower[static_cast<size_t>(j - 1)];
    const int cap = std::min(j, n) - s;  // keeps w_j <= j
    double choose = 1.0;
    double power = 1.0;
    for (int mj = 0; mj <= cap; ++mj) {
      if (mj > 0) {
        choose *= static_cast<double>(n - s - mj + 1) / mj;
        power *= width;
      }
      self(self, j + 1, s + mj, factor * choose * power);
    }
  };
  recurse(recurse, 1, 0, 1.0);
  return std::clamp(1.0 - inside, 0.0, 1.0);
}

}  // namespace ellband
