#include "ellband/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "double_format.hpp"
#include "ellband/ell_two_sided.hpp"
#include "ellband/level_solver.hpp"
#include "ellband/numerics.hpp"

namespace ellband {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Two-sided band endpoints on the z scale: a standard-normal sample exits
// the (mu, sigma)-estimated band iff some sorted value leaves
// [mu + sigma*z_lo_i, mu + sigma*z_hi_i].
struct ZBand {
  std::vector<double> lo;
  std::vector<double> hi;
};

ZBand ell_z_band(int n, double alpha) {
  const double eta = solve_local_level(n, alpha, Side::two_sided, 1e-4);
  const TwoSidedBounds b = bounds_from_eta_two_sided(n, eta);
  ZBand z;
  z.lo.resize(static_cast<size_t>(n));
  z.hi.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    z.lo[static_cast<size_t>(i)] = normal_quantile(b.lower[static_cast<size_t>(i)]);
    z.hi[static_cast<size_t>(i)] = normal_quantile(b.upper[static_cast<size_t>(i)]);
  }
  return z;
}

ZBand ks_z_band(int n, double alpha) {
  const double d = kolmogorov_critical(alpha, n);
  ZBand z;
  z.lo.resize(static_cast<size_t>(n));
  z.hi.resize(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const double p_lo = static_cast<double>(i) / n - d;
    const double p_hi = static_cast<double>(i - 1) / n + d;
    z.lo[static_cast<size_t>(i - 1)] =
        p_lo <= 0.0 ? kNegInf : normal_quantile(p_lo);
    z.hi[static_cast<size_t>(i - 1)] =
        p_hi >= 1.0 ? kPosInf : normal_quantile(p_hi);
  }
  return z;
}

bool exits_band(const std::vector<double>& sorted, const ZBand& z, double mu,
                double sigma) {
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] <= mu + sigma * z.lo[i] || sorted[i] >= mu + sigma * z.hi[i]) {
      return true;
    }
  }
  return false;
}

// Runs `body(replicate_index)` for 0..replicates-1 over `threads` workers in
// fixed ranges; each replicate derives its own RNG substream, so the
// partition never affects results.
void parallel_replicates(int replicates, int threads, const auto& body) {
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int r = 0; r < replicates; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const int begin = static_cast<int>(
        static_cast<long long>(replicates) * t / threads);
    const int end = static_cast<int>(
        static_cast<long long>(replicates) * (t + 1) / threads);
    pool.emplace_back([&body, begin, end] {
      for (int r = begin; r < end; ++r) body(r);
    });
  }
  for (auto& th : pool) th.join();
}

SimReport make_report(std::string scenario, int replicates, int rejections,
                      std::uint64_t seed, int degenerate, std::string config) {
  SimReport rep;
  rep.scenario = std::move(scenario);
  rep.replicates = replicates;
  rep.rejections = rejections;
  rep.rejection_rate = static_cast<double>(rejections) / replicates;
  rep.standard_error =
      std::sqrt(rep.rejection_rate * (1.0 - rep.rejection_rate) / replicates);
  rep.seed = seed;
  rep.degenerate_samples = degenerate;
  rep.config = std::move(config);
  return rep;
}

}  // namespace

std::string SimReport::to_json() const {
  std::string out = "{\"scenario\":\"" + scenario + "\"";
  out += ",\"replicates\":" + std::to_string(replicates);
  out += ",\"rejections\":" + std::to_string(rejections);
  out += ",\"rejection_rate\":";
  detail::append_double(out, rejection_rate);
  out += ",\"standard_error\":";
  detail::append_double(out, standard_error);
  out += ",\"seed\":" + std::to_string(seed);
  out += ",\"degenerate_samples\":" + std::to_string(degenerate_samples);
  out += ",\"config\":" + config + "}";
  return out;
}

SimReport type1_study(int n, Estimator estimator, double alpha, int replicates,
                      std::uint64_t seed, int threads) {
  if (n < 2) throw std::domain_error("type1_study requires n >= 2");
  if (replicates < 100) {
    throw std::invalid_argument("type1_study requires replicates >= 100");
  }
  const ZBand z = ell_z_band(n, alpha);
  std::vector<std::uint8_t> rejected(static_cast<size_t>(replicates), 0);
  std::vector<std::uint8_t> degenerate(static_cast<size_t>(replicates), 0);
  parallel_replicates(replicates, threads, [&](int r) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(r));
    std::vector<double> sample(static_cast<size_t>(n));
    for (double& x : sample) x = normal_quantile(rng.next_unit());
    double mu = 0.0;
    double sigma = 1.0;
    if (estimator != Estimator::known_params) {
      try {
        std::tie(mu, sigma) = estimate_normal(sample, estimator);
      } catch (const degenerate_sample_error&) {
        degenerate[static_cast<size_t>(r)] = 1;
        return;
      }
    }
    std::sort(sample.begin(), sample.end());
    rejected[static_cast<size_t>(r)] = exits_band(sample, z, mu, sigma) ? 1 : 0;
  });
  int rejections = 0;
  int degenerate_count = 0;
  for (int r = 0; r < replicates; ++r) {
    rejections += rejected[static_cast<size_t>(r)];
    degenerate_count += degenerate[static_cast<size_t>(r)];
  }
  std::string config = "{\"n\":" + std::to_string(n) + ",\"alpha\":";
  detail::append_double(config, alpha);
  config += ",\"estimator\":\"";
  config += estimator_name(estimator);
  config += "\"}";
  return make_report("type1-normal", replicates, rejections, seed,
                     degenerate_count, std::move(config));
}

namespace {

PairedPowerReport run_power(double t_df, int n, double alpha, int replicates,
                            std::uint64_t seed, int threads) {
  if (n < 2) throw std::domain_error("power_study requires n >= 2");
  if (replicates < 1) {
    throw std::invalid_argument("power_study requires replicates >= 1");
  }
  if (!(t_df > 0.0)) throw std::domain_error("t df must be > 0");
  const ZBand ell = ell_z_band(n, alpha);
  const ZBand ks = ks_z_band(n, alpha);
  const ReferenceDistribution alt = ReferenceDistribution::student_t(t_df);
  std::vector<std::uint8_t> ell_rej(static_cast<size_t>(replicates), 0);
  std::vector<std::uint8_t> ks_rej(static_cast<size_t>(replicates), 0);
  std::vector<std::uint8_t> degenerate(static_cast<size_t>(replicates), 0);
  parallel_replicates(replicates, threads, [&](int r) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(r));
    std::vector<double> sample(static_cast<size_t>(n));
    for (double& x : sample) x = alt.quantile(rng.next_unit());
    double mu;
    double sigma;
    try {
      std::tie(mu, sigma) = estimate_normal(sample, Estimator::median_sn);
    } catch (const degenerate_sample_error&) {
      degenerate[static_cast<size_t>(r)] = 1;
      return;
    }
    std::sort(sample.begin(), sample.end());
    ell_rej[static_cast<size_t>(r)] = exits_band(sample, ell, mu, sigma) ? 1 : 0;
    ks_rej[static_cast<size_t>(r)] = exits_band(sample, ks, mu, sigma) ? 1 : 0;
  });
  PairedPowerReport rep;
  int ell_count = 0;
  int ks_count = 0;
  int degenerate_count = 0;
  for (int r = 0; r < replicates; ++r) {
    const bool e = ell_rej[static_cast<size_t>(r)] != 0;
    const bool k = ks_rej[static_cast<size_t>(r)] != 0;
    ell_count += e;
    ks_count += k;
    rep.ell_only += e && !k;
    rep.ks_only += k && !e;
    degenerate_count += degenerate[static_cast<size_t>(r)];
  }
  std::string config = "{\"n\":" + std::to_string(n) + ",\"alpha\":";
  detail::append_double(config, alpha);
  config += ",\"t_df\":";
  detail::append_double(config, t_df);
  config += ",\"estimator\":\"median-sn\"}";
  rep.ell = make_report("power-ell-vs-t", replicates, ell_count, seed,
                        degenerate_count, config);
  rep.ks = make_report("power-ks-vs-t", replicates, ks_count, seed,
                       degenerate_count, config);
  return rep;
}

}  // namespace

SimReport power_study(BandMethod method, double t_df, int n, double alpha,
                      int replicates, std::uint64_t seed, int threads) {
  if (method != BandMethod::ell && method != BandMethod::ks) {
    throw std::invalid_argument("power_study compares ell and ks bands");
  }
  PairedPowerReport rep = run_power(t_df, n, alpha, replicates, seed, threads);
  return method == BandMethod::ell ? std::move(rep.ell) : std::move(rep.ks);
}

PairedPowerReport power_study_paired(double t_df, int n, double alpha,
                                     int replicates, std::uint64_t seed,
                                     int threads) {
  return run_power(t_df, n, alpha, replicates, seed, threads);
}

std::vector<double> chisq_calibration_generate(int s, double a, double b,
                                               int tables, std::uint64_t seed) {
  if (s < 2) {
    throw std::invalid_argument(
        "table sample size must be >= 2 (a single observation always leaves "
        "an empty row or column)");
  }
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) {
    throw std::domain_error("cell margins a, b must be in (0, 1)");
  }
  if (tables < 1) throw std::invalid_argument("need at least one table");
  std::vector<double> pvalues(static_cast<size_t>(tables));
  for (int t = 0; t < tables; ++t) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(t));
    double stat = 0.0;
    for (;;) {
      // Rows and columns are independent under the null, so each observation
      // is two Bernoulli draws.
      int count[2][2] = {{0, 0}, {0, 0}};
      for (int obs = 0; obs < s; ++obs) {
        const int i = rng.next_unit() < a ? 1 : 0;
        const int j = rng.next_unit() < b ? 1 : 0;
        count[i][j] += 1;
      }
      const int row1 = count[1][0] + count[1][1];
      const int col1 = count[0][1] + count[1][1];
      if (row1 == 0 || row1 == s || col1 == 0 || col1 == s) continue;  // redraw
      stat = 0.0;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const double row = i == 1 ? row1 : s - row1;
          const double col = j == 1 ? col1 : s - col1;
          const double expected = row * col / s;
          const double delta = count[i][j] - expected;
          stat += delta * delta / expected;
        }
      }
      break;
    }
    // Upper tail of chi-square with 1 df.
    pvalues[static_cast<size_t>(t)] = gamma_q(0.5, stat / 2.0);
  }
  return pvalues;
}

}  // namespace ellband
