#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ellband/common.hpp"

namespace ellband {

enum class SolvePolicy { auto_policy, exact, table, asymptotic };

struct LocalLevelQuery {
  int n = 0;
  double alpha = 0.05;
  Side side = Side::two_sided;
  SolvePolicy policy = SolvePolicy::auto_policy;
};

// Pre-solved (n, eta) grid for one (alpha, side) pair.
struct EtaTable {
  double alpha = 0.0;
  Side side = Side::two_sided;
  double tol = 0.0;
  std::vector<std::pair<int, double>> grid;  // ascending n, decreasing eta

  int n_min() const { return grid.front().first; }
  int n_max() const { return grid.back().first; }
  bool covers(int n) const {
    return !grid.empty() && n >= n_min() && n <= n_max();
  }
};

// Bisection on eta over the Bonferroni bracket (alpha/n, alpha) until the
// recomputed global level matches alpha within tol_rel relative.  Throws
// non_convergence_error after 64 bisections (a numerical defect: the level is
// strictly monotone in eta).
double solve_local_level(int n, double alpha, Side side, double tol_rel);

// Large-n closed form with empirically calibrated correction constants
// c_{0.01} = 1.591, c_{0.05} = 1.3, c_{0.1} = 1.1 (two-sided).  Requires
// n >= 100; throws unsupported_combination_error for other alpha.
double eta_asymptotic(long n, double alpha);

EtaTable table_build(double alpha, Side side, std::span<const int> n_grid,
                     double tol);

// Linear interpolation in (n, eta) between grid neighbors; exact grid hits
// return the stored value.  Throws std::out_of_range outside the grid span.
double table_interpolate(const EtaTable& table, int n);

std::string table_serialize(const EtaTable& table);
EtaTable table_parse(std::string_view text);

// Immutable collection of tables loaded from *.tsv files in a directory.
class TableStore {
 public:
  TableStore() = default;
  static TableStore load_directory(const std::filesystem::path& dir);

  void add(EtaTable table) { tables_.push_back(std::move(table)); }
  const EtaTable* find(double alpha, Side side) const;
  size_t size() const { return tables_.size(); }

 private:
  std::vector<EtaTable> tables_;
};

struct EtaResult {
  double eta = 0.0;
  enum class Path { table, exact, asymptotic } path = Path::exact;
};

inline const char* path_name(EtaResult::Path p) {
  switch (p) {
    case EtaResult::Path::table: return "table";
    case EtaResult::Path::exact: return "exact";
    default: return "asymptotic";
  }
}

// Dispatch over table / exact / asymptotic per query policy.  The automatic
// policy prefers a covering table, falls back to the exact solver up to
// kExactNCap, and uses the asymptotic form beyond that where calibrated;
// anything else raises unsupported_combination_error.
EtaResult resolve_eta(const LocalLevelQuery& query,
                      const TableStore* tables = nullptr);

inline constexpr int kExactNCap = 20000;
inline constexpr double kSolveTolDefault = 1e-4;   // on-the-fly solves
inline constexpr double kTableTolDefault = 1e-6;   // table generation

// 10..1000 in steps of 10, then ~40 log-spaced points up to 20000.
std::vector<int> default_table_grid();

}  // namespace ellband
