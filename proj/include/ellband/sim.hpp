#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ellband/band.hpp"
#include "ellband/distributions.hpp"

namespace ellband {

// SplitMix64 with per-replicate substreams keyed by (seed, index): results
// are independent of execution order and worker count.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix(seed + (index + 1) * 0x9E3779B97F4A7C15ULL));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on the open interval (0, 1).
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

struct SimReport {
  std::string scenario;
  int replicates = 0;
  int rejections = 0;
  double rejection_rate = 0.0;
  double standard_error = 0.0;
  std::uint64_t seed = 0;
  int degenerate_samples = 0;
  std::string config;  // JSON echo of the study parameters

  std::string to_json() const;
};

// Type 1 error of the alpha-level two-sided ELL normality band under the
// chosen (mu, sigma) estimator, over `replicates` standard-normal samples of
// size n.  Degenerate estimations are counted, not silently skipped.
SimReport type1_study(int n, Estimator estimator, double alpha, int replicates,
                      std::uint64_t seed, int threads = 1);

// Rejection rate of the alpha-level normality band (ELL or KS, default
// median+S_n estimation) against t(df) data.
SimReport power_study(BandMethod method, double t_df, int n, double alpha,
                      int replicates, std::uint64_t seed, int threads = 1);

struct PairedPowerReport {
  SimReport ell;
  SimReport ks;
  int ell_only = 0;  // replicates rejected by ELL but not KS
  int ks_only = 0;   // rejected by KS but not ELL
};

// Both methods on the same replicate samples, for paired comparisons.
PairedPowerReport power_study_paired(double t_df, int n, double alpha,
                                     int replicates, std::uint64_t seed,
                                     int threads = 1);

// p-values of the Pearson chi-square independence test over `tables`
// simulated 2x2 tables of s observations with independent cell margins
// P(row 1) = a, P(col 1) = b.  Tables with an empty row or column are redrawn.
std::vector<double> chisq_calibration_generate(int s, double a, double b,
                                               int tables, std::uint64_t seed);

}  // namespace ellband
