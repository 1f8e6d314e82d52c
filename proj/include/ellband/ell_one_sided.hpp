#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ellband {

// One-sided equal-local-levels lower bounds in probability scale.
struct OneSidedBounds {
  int n = 0;
  double eta = 0.0;
  std::vector<double> lower;
};

// lower_i = Beta^{-1}(eta; i, n+1-i), strictly increasing.
OneSidedBounds bounds_from_eta_one_sided(int n, double eta);

// Exact global level alpha = P(any sorted uniform falls below its lower
// bound) by the forward recursion over the n+1 bins.  Requires strictly
// increasing bounds in [0, 1].
double global_level_one_sided_exact(std::span<const double> lower,
                                    std::uint64_t* ops = nullptr);

// Inner multiply-add count the exact recursion performs for a given n
// (it is input-independent).
std::uint64_t exact_one_sided_multiply_adds(int n);

struct OneSidedApproxResult {
  double alpha = 0.0;
  // Largest dropped row index; -1 when nothing was dropped.
  int skip = -1;
  // Upper bound on the probability mass removed by all drops.
  double accumul_err_upper_bnd = 0.0;
  // (k, T) pairs: at recursion step k, rows up to index T were dropped.
  std::vector<std::pair<int, int>> drop_points;
  std::uint64_t multiply_adds = 0;
};

// Approximate global level with certified relative error: the returned value
// alpha~ satisfies alpha_exact <= alpha~ and
// (alpha~ - alpha_exact) / alpha_exact <= max_rel_err.  Checkpoints at
// k = first_check and at multiples of check_interval decide which leading
// recursion terms can be dropped under the remaining error budget.
OneSidedApproxResult global_level_one_sided_approx(std::span<const double> lower,
                                                   int first_check = 50,
                                                   int check_interval = 50,
                                                   double max_rel_err = 1e-4);

// Brute-force reference over multinomial bin counts, n <= 8.
double multinomial_oracle_one_sided(std::span<const double> lower);

}  // namespace ellband
