#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ellband {

// Two-sided equal-local-levels bounds in probability scale.  lower[i] and
// upper[i] are the open-interval endpoints for the (i+1)-th order statistic
// of n i.i.d. U(0,1) draws.
struct TwoSidedBounds {
  int n = 0;
  double eta = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
};

// Builds ELL bounds: lower_i = Beta^{-1}(eta/2; i, n+1-i) and
// upper_i = 1 - lower_{n+1-i} (the reflection identity, which makes the
// symmetry exact).  Throws std::domain_error for eta outside (0,1).
TwoSidedBounds bounds_from_eta_two_sided(int n, double eta);

// Exact global level alpha = P(any sorted uniform leaves its interval), by
// the full forward boundary-crossing recursion over all 2n merged endpoints.
// Accepts any band with 0 <= lower_i < upper_i <= 1 and both sequences
// nondecreasing.  `ops`, when given, receives the number of inner
// multiply-add steps performed.
double global_level_two_sided(std::span<const double> lower,
                              std::span<const double> upper,
                              std::uint64_t* ops = nullptr);

// Same value restricted to ELL-symmetric bands, computed with the
// half-recursion (rows up to n+1 only) and the combination formula.  Throws
// std::invalid_argument when upper_i != 1 - lower_{n+1-i} beyond 1e-9.
double global_level_two_sided_symmetric(std::span<const double> lower,
                                        std::span<const double> upper,
                                        std::uint64_t* ops = nullptr);

inline double global_level_two_sided_symmetric(const TwoSidedBounds& b,
                                               std::uint64_t* ops = nullptr) {
  return global_level_two_sided_symmetric(b.lower, b.upper, ops);
}

// Brute-force reference: enumerates the multinomial bin-count vectors that
// keep every partial sum inside its bounds and sums their probabilities.
// Guarded to n <= 8; throws std::length_error above that.
double multinomial_oracle_two_sided(std::span<const double> lower,
                                    std::span<const double> upper);

}  // namespace ellband
