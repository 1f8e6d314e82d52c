#pragma once

#include <span>
#include <string>
#include <vector>

#include "ellband/common.hpp"
#include "ellband/distributions.hpp"
#include "ellband/level_solver.hpp"

namespace ellband {

enum class BandMethod { ell, ks, pointwise };

const char* band_method_name(BandMethod m);
BandMethod band_method_from_name(std::string_view name);

enum class ExpectedPointsMode { mean_blom, mean_uniform, median };

// Probability points for the expected quantiles: Blom-style plotting
// positions, exact uniform order-statistic means i/(n+1), or exact medians
// Beta^{-1}(1/2; i, n+1-i).
std::vector<double> expected_points(int n, ExpectedPointsMode mode);

// A complete simultaneous testing band, in probability scale and mapped to
// data scale through the (possibly estimated) reference distribution.
struct TestingBand {
  int n = 0;
  double alpha = 0.05;
  BandMethod method = BandMethod::ell;
  Side side = Side::two_sided;
  double eta = 0.0;              // ELL only
  std::string eta_path;          // "table" | "exact" | "asymptotic", ELL only
  std::vector<double> prob_lower;
  std::vector<double> prob_upper;
  std::vector<double> lower;     // quantile(prob_lower)
  std::vector<double> upper;     // quantile(prob_upper); +inf where unbounded
  std::vector<double> expected;  // quantile(expected points)
  ReferenceDistribution dist;    // final parameters (estimated or known)
  Estimator estimation = Estimator::known_params;
  bool effective_n_decoupled = false;
};

struct BandRequest {
  int n = 0;                   // used when data is empty
  std::vector<double> data;    // optional observations: sets n, feeds estimation
  ReferenceDistribution dist = ReferenceDistribution::uniform();
  double alpha = 0.05;
  BandMethod method = BandMethod::ell;
  Side side = Side::two_sided;
  Estimator estimation = Estimator::known_params;
  ExpectedPointsMode points_mode = ExpectedPointsMode::median;
  SolvePolicy policy = SolvePolicy::auto_policy;
  const TableStore* tables = nullptr;
};

TestingBand get_qq_band(const BandRequest& request);

// Band built for an effective number of independent tests; identical to
// get_qq_band at n = neff except that the result is flagged as having
// x-coordinates decoupled from the observations' plotting positions.
TestingBand band_effective_n(int neff, const BandRequest& request);

struct BandCheckResult {
  bool exited = false;
  int first_index = 0;  // 1-based rank of the first exit
  enum class Direction { low, high } direction = Direction::low;
};

// Sorts the observations and tests each against its open interval; a value
// exactly at an endpoint counts as an exit.
BandCheckResult band_check(std::span<const double> observations,
                           const TestingBand& band);

// JSON band schema emission/parsing (the CLI wire format).  Non-finite
// endpoint values serialize as null.
std::string band_to_json(const TestingBand& band);
TestingBand band_from_json(std::string_view text);

}  // namespace ellband
