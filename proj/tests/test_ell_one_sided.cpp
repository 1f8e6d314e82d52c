#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ellband/ell_one_sided.hpp"
#include "ellband/numerics.hpp"

using namespace ellband;

TEST_CASE("one-sided bounds closed forms") {
  const OneSidedBounds b1 = bounds_from_eta_one_sided(1, 0.05);
  CHECK(b1.lower[0] == doctest::Approx(0.05).epsilon(1e-12));

  const OneSidedBounds b2 = bounds_from_eta_one_sided(2, 0.1);
  CHECK(b2.lower[0] == doctest::Approx(1.0 - std::sqrt(0.9)).epsilon(1e-12));
  CHECK(b2.lower[1] == doctest::Approx(std::sqrt(0.1)).epsilon(1e-12));

  CHECK_THROWS_AS(bounds_from_eta_one_sided(3, 0.0), std::domain_error);
  CHECK_THROWS_AS(bounds_from_eta_one_sided(3, 1.0), std::domain_error);
}

TEST_CASE("one-sided bounds invert the order-statistic cdfs") {
  const int n = 50;
  const double eta = 0.013;
  const OneSidedBounds b = bounds_from_eta_one_sided(n, eta);
  for (int i = 1; i <= n; ++i) {
    if (i > 1) CHECK(b.lower[i - 1] > b.lower[i - 2]);
    const BetaParams params{static_cast<double>(i),
                            static_cast<double>(n - i + 1)};
    CHECK(std::fabs(beta_cdf(b.lower[i - 1], params) - eta) <= 1e-12);
  }
}

TEST_CASE("exact level, small closed forms") {
  CHECK(global_level_one_sided_exact(std::vector<double>{0.03}) ==
        doctest::Approx(0.03).epsilon(1e-14));

  // n = 2, bounds (a, b): stay-inside probability is
  // P(both > b) + P(one in (a,b], one > b) = (1-b)^2 + 2(b-a)(1-b).
  const double a = 0.2;
  const double b = 0.5;
  const double inside = (1 - b) * (1 - b) + 2 * (b - a) * (1 - b);
  CHECK(global_level_one_sided_exact(std::vector<double>{a, b}) ==
        doctest::Approx(1.0 - inside).epsilon(1e-14));
}

TEST_CASE("exact recursion matches the multinomial oracle") {
  for (int n = 1; n <= 6; ++n) {
    for (double eta : {0.001, 0.01, 0.05, 0.2}) {
      const OneSidedBounds b = bounds_from_eta_one_sided(n, eta);
      CHECK(std::fabs(global_level_one_sided_exact(b.lower) -
                      multinomial_oracle_one_sided(b.lower)) <= 1e-12);
    }
  }
  const std::vector<double> h8{0.01, 0.02, 0.1, 0.3, 0.42, 0.55, 0.7, 0.95};
  CHECK(std::fabs(global_level_one_sided_exact(h8) -
                  multinomial_oracle_one_sided(h8)) <= 1e-12);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(global_level_one_sided_exact(std::vector<double>{0.3, 0.2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(global_level_one_sided_exact(std::vector<double>{0.3, 0.3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(global_level_one_sided_exact(std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(multinomial_oracle_one_sided(std::vector<double>(
                      {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09})),
                  std::length_error);
  const std::vector<double> ok{0.1, 0.2};
  CHECK_THROWS_AS(global_level_one_sided_approx(ok, 1, 50, 1e-4),
                  std::domain_error);
  CHECK_THROWS_AS(global_level_one_sided_approx(ok, 50, 0, 1e-4),
                  std::domain_error);
  CHECK_THROWS_AS(global_level_one_sided_approx(ok, 50, 50, 0.0),
                  std::domain_error);
}

TEST_CASE("approximation is conservative and error-bounded") {
  for (int n : {100, 500}) {
    for (double eta : {1e-4, 1e-3, 1e-2}) {
      const OneSidedBounds b = bounds_from_eta_one_sided(n, eta);
      const double exact = global_level_one_sided_exact(b.lower);
      for (double max_rel_err : {1e-2, 1e-4, 1e-6}) {
        const OneSidedApproxResult res =
            global_level_one_sided_approx(b.lower, 50, 50, max_rel_err);
        const double rel = (res.alpha - exact) / exact;
        CHECK(rel >= -1e-13);
        CHECK(rel <= max_rel_err);
      }
    }
  }
}

TEST_CASE("huge error budget still respects the bound") {
  const OneSidedBounds b = bounds_from_eta_one_sided(300, 5e-3);
  const double exact = global_level_one_sided_exact(b.lower);
  const OneSidedApproxResult res =
      global_level_one_sided_approx(b.lower, 10, 5, 0.8);
  const double rel = (res.alpha - exact) / exact;
  CHECK(rel >= -1e-13);
  CHECK(rel <= 0.8);
}

TEST_CASE("tight tolerance reproduces the exact level") {
  const OneSidedBounds b = bounds_from_eta_one_sided(500, 2e-3);
  const double exact = global_level_one_sided_exact(b.lower);
  const OneSidedApproxResult res =
      global_level_one_sided_approx(b.lower, 50, 50, 1e-12);
  // The certified error is 1e-12 relative; the extra absolute slack covers
  // round-off between the two summation orders.
  CHECK(std::fabs(res.alpha - exact) <= 1e-12 * exact + 5e-13);
}

TEST_CASE("no checkpoints below first_check reproduces exact arithmetic") {
  const OneSidedBounds b = bounds_from_eta_one_sided(30, 1e-3);
  const OneSidedApproxResult res = global_level_one_sided_approx(b.lower);
  CHECK(res.alpha == global_level_one_sided_exact(b.lower));
  CHECK(res.skip == -1);
  CHECK(res.drop_points.empty());
  CHECK(res.accumul_err_upper_bnd == 0.0);
}

TEST_CASE("drop log is monotone") {
  const OneSidedBounds b = bounds_from_eta_one_sided(2000, 1e-3);
  const OneSidedApproxResult res =
      global_level_one_sided_approx(b.lower, 50, 50, 1e-4);
  CHECK(!res.drop_points.empty());
  int prev_k = 0;
  int prev_skip = -1;
  for (const auto& [k, skip] : res.drop_points) {
    CHECK(k > prev_k);
    CHECK(skip > prev_skip);
    CHECK(skip < k);
    prev_k = k;
    prev_skip = skip;
  }
  CHECK(res.skip == prev_skip);
  CHECK(res.accumul_err_upper_bnd >= 0.0);
}

TEST_CASE("multiply-add count formula matches the instrumented engine") {
  for (int n : {2, 3, 17, 50, 200}) {
    const OneSidedBounds b = bounds_from_eta_one_sided(n, 1e-3);
    std::uint64_t ops = 0;
    global_level_one_sided_exact(b.lower, &ops);
    CHECK(ops == exact_one_sided_multiply_adds(n));
  }
}

TEST_CASE("dropping saves work") {
  const int n = 2000;
  const OneSidedBounds b = bounds_from_eta_one_sided(n, 1e-3);
  const OneSidedApproxResult res =
      global_level_one_sided_approx(b.lower, 50, 50, 1e-3);
  CHECK(res.multiply_adds < exact_one_sided_multiply_adds(n));
}
