#include "ellband/ell_two_sided.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "binomial_kernel.hpp"
#include "ellband/numerics.hpp"

namespace ellband {

namespace {

struct MergedBounds {
  // b[0] = 0, b[1..2n] = sorted endpoints, b[2n+1] = 1.
  std::vector<double> b;
  // u[k] = count of lower endpoints among b[1..k-1]; l[k] = count of upper
  // endpoints among b[1..k].  Valid partial sums at step k lie in [l_k, u_k].
  std::vector<int> u;
  std::vector<int> l;
};

void validate_band(std::span<const double> lower, std::span<const double> upper) {
  const size_t n = lower.size();
  if (n == 0 || upper.size() != n) {
    throw std::invalid_argument("band must have matching nonempty bounds");
  }
  for (size_t i = 0; i < n; ++i) {
    if (!(lower[i] >= 0.0) || !(upper[i] <= 1.0) || !(lower[i] < upper[i])) {
      throw std::invalid_argument("band requires 0 <= lower_i < upper_i <= 1");
    }
    if (i > 0 && (lower[i] < lower[i - 1] || upper[i] < upper[i - 1])) {
      throw std::invalid_argument("band endpoint sequences must be nondecreasing");
    }
  }
}

MergedBounds merge_bounds(std::span<const double> lower,
                          std::span<const double> upper) {
  const int n = static_cast<int>(lower.size());
  std::vector<std::pair<double, bool>> pts;
  pts.reserve(2 * static_cast<size_t>(n));
  for (double h : lower) pts.emplace_back(h, false);
  for (double g : upper) pts.emplace_back(g, true);
  // Ties put lower endpoints first; the zero-width bin then carries the
  // extra constraint.
  std::sort(pts.begin(), pts.end());

  MergedBounds m;
  m.b.resize(2 * static_cast<size_t>(n) + 2);
  m.u.resize(2 * static_cast<size_t>(n) + 1);
  m.l.resize(2 * static_cast<size_t>(n) + 1);
  m.b[0] = 0.0;
  m.b[2 * static_cast<size_t>(n) + 1] = 1.0;
  int n_lower = 0;
  int n_upper = 0;
  for (int k = 1; k <= 2 * n; ++k) {
    m.u[static_cast<size_t>(k)] = n_lower;
    const auto& [value, is_upper] = pts[static_cast<size_t>(k - 1)];
    m.b[static_cast<size_t>(k)] = value;
    (is_upper ? n_upper : n_lower) += 1;
    m.l[static_cast<size_t>(k)] = n_upper;
  }
  return m;
}

// Runs the forward recursion up to and including row `k_last`, leaving that
// row in `cur` and the preceding row in `prev` (both indexed by the absolute
// count j).
struct RecursionRows {
  std::vector<double> prev;
  std::vector<double> cur;
};

RecursionRows run_recursion(const MergedBounds& m, int n, int k_last,
                            const LogFactorialTable& lf, std::uint64_t* ops) {
  RecursionRows rows;
  rows.prev.assign(static_cast<size_t>(n) + 1, 0.0);
  rows.cur.assign(static_cast<size_t>(n) + 1, 0.0);
  rows.cur[0] = std::pow(1.0 - m.b[1], n);
  for (int k = 2; k <= k_last; ++k) {
    std::swap(rows.prev, rows.cur);
    const double rem = 1.0 - m.b[static_cast<size_t>(k - 1)];
    double p = 0.0;
    double q = 1.0;
    if (rem > 0.0) {
      p = (m.b[static_cast<size_t>(k)] - m.b[static_cast<size_t>(k - 1)]) / rem;
      q = (1.0 - m.b[static_cast<size_t>(k)]) / rem;
      if (p < 0.0) p = 0.0;
      if (p > 1.0) p = 1.0;
      if (q < 0.0) q = 0.0;
    }
    const detail::BinomialWindow window(lf, p, q);
    const int row_lo = m.l[static_cast<size_t>(k)];
    const int row_hi = m.u[static_cast<size_t>(k)];
    std::fill(rows.cur.begin() + row_lo, rows.cur.begin() + row_hi + 1, 0.0);
    const int prev_lo = m.l[static_cast<size_t>(k - 1)];
    const int prev_hi = m.u[static_cast<size_t>(k - 1)];
    for (int mm = prev_lo; mm <= prev_hi; ++mm) {
      const double w = rows.prev[static_cast<size_t>(mm)];
      if (w == 0.0) continue;
      const int d_lo = std::max(0, row_lo - mm);
      const int d_hi = row_hi - mm;
      if (d_hi < d_lo) continue;
      window.accumulate(w, n - mm, d_lo, d_hi,
                        rows.cur.data() + mm + d_lo, ops);
    }
  }
  return rows;
}

}  // namespace

TwoSidedBounds bounds_from_eta_two_sided(int n, double eta) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::domain_error("eta must be in (0, 1)");
  }
  TwoSidedBounds out;
  out.n = n;
  out.eta = eta;
  out.lower.resize(static_cast<size_t>(n));
  out.upper.resize(static_cast<size_t>(n));
  const double q = eta / 2.0;
  double guess = q / n;  // rough seed for i = 1
  for (int i = 1; i <= n; ++i) {
    const BetaParams params{static_cast<double>(i), static_cast<double>(n - i + 1)};
    guess = beta_quantile_guess(q, params, guess);
    out.lower[static_cast<size_t>(i - 1)] = guess;
    // Warm start the next order statistic near the current root.
    guess = std::min(guess + 1.0 / (n + 1.0), 1.0 - 1e-16);
  }
  for (int i = 1; i <= n; ++i) {
    out.upper[static_cast<size_t>(i - 1)] =
        1.0 - out.lower[static_cast<size_t>(n - i)];
  }
  return out;
}

double global_level_two_sided(std::span<const double> lower,
                              std::span<const double> upper,
                              std::uint64_t* ops) {
  validate_band(lower, upper);
  const int n = static_cast<int>(lower.size());
  const MergedBounds m = merge_bounds(lower, upper);
  const LogFactorialTable lf(n);
  const RecursionRows rows = run_recursion(m, n, 2 * n, lf, ops);
  const double inside = rows.cur[static_cast<size_t>(n)];
  return std::clamp(1.0 - inside, 0.0, 1.0);
}

double global_level_two_sided_symmetric(std::span<const double> lower,
                                        std::span<const double> upper,
                                        std::uint64_t* ops) {
  validate_band(lower, upper);
  const int n = static_cast<int>(lower.size());
  for (int i = 0; i < n; ++i) {
    const double mirrored = 1.0 - lower[static_cast<size_t>(n - 1 - i)];
    if (std::fabs(upper[static_cast<size_t>(i)] - mirrored) > 1e-9) {
      throw std::invalid_argument(
          "band is not ELL-symmetric: upper_i must equal 1 - lower_{n+1-i}");
    }
  }
  const MergedBounds m = merge_bounds(lower, upper);
  const LogFactorialTable lf(n);
  RecursionRows rows = run_recursion(m, n, n + 1, lf, ops);
  // rows.cur = row n+1, rows.prev = row n (n >= 2); for n = 1 row 2 == row
  // n+1 and row 1 == row n already.
  const std::vector<double>& row_n = rows.prev;
  const std::vector<double>& row_np1 = rows.cur;
  const double bn = m.b[static_cast<size_t>(n)];
  const double log_bn = bn > 0.0 ? std::log(bn) : 0.0;
  const double log_rem = bn < 1.0 ? std::log1p(-bn) : 0.0;
  double inside = 0.0;
  for (int j = m.l[static_cast<size_t>(n)]; j <= m.u[static_cast<size_t>(n)]; ++j) {
    const double cj = row_n[static_cast<size_t>(j)];
    const double ck = row_np1[static_cast<size_t>(n - j)];
    if (cj <= 0.0 || ck <= 0.0) continue;
    if ((j > 0 && bn == 0.0) || (j < n && bn == 1.0)) continue;
    const double log_pmf = lf.log_choose(n, j) + j * log_bn + (n - j) * log_rem;
    inside += std::exp(std::log(cj) + std::log(ck) - log_pmf);
  }
  return std::clamp(1.0 - inside, 0.0, 1.0);
}

double multinomial_oracle_two_sided(std::span<const double> lower,
                                    std::span<const double> upper) {
  validate_band(lower, upper);
  const int n = static_cast<int>(lower.size());
  if (n > 8) throw std::length_error("multinomial oracle is limited to n <= 8");
  const MergedBounds m = merge_bounds(lower, upper);

  double inside = 0.0;
  // DFS over bin counts m_1..m_2n; `factor` carries the telescoped product
  // of binomial choices and bin-width powers.
  const auto recurse = [&](auto&& self, int k, int s, double factor) -> void {
    if (k > 2 * n) {
      if (s == n) inside += factor;
      return;
    }
    const double width =
        m.b[static_cast<size_t>(k)] - m.b[static_cast<size_t>(k - 1)];
    const int lo = std::max(0, m.l[static_cast<size_t>(k)] - s);
    const int hi = std::min(m.u[static_cast<size_t>(k)] - s, n - s);
    double choose = 1.0;
    double power = 1.0;
    for (int mk = 0; mk <= hi; ++mk) {
      if (mk > 0) {
        choose *= static_cast<double>(n - s - mk + 1) / mk;
        power *= width;
      }
      if (mk >= lo) self(self, k + 1, s + mk, factor * choose * power);
    }
  };
  recurse(recurse, 1, 0, 1.0);
  return std::clamp(1.0 - inside, 0.0, 1.0);
}

}  // namespace ellband
