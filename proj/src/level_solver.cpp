#include "ellband/level_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ellband/ell_one_sided.hpp"
#include "ellband/ell_two_sided.hpp"

namespace ellband {

namespace {

// Above this size the exact one-sided recursion (cubic in n) gives way to the
// certified approximation run well below the solver tolerance.
constexpr int kOneSidedExactCap = 800;

double level_at_eta(int n, double eta, Side side, double tol_rel) {
  if (side == Side::two_sided) {
    return global_level_two_sided_symmetric(bounds_from_eta_two_sided(n, eta));
  }
  const OneSidedBounds b = bounds_from_eta_one_sided(n, eta);
  if (n <= kOneSidedExactCap) return global_level_one_sided_exact(b.lower);
  return global_level_one_sided_approx(b.lower, 50, 50, tol_rel / 8.0).alpha;
}

void validate_query(int n, double alpha) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("alpha must be in (0, 1)");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double solve_local_level(int n, double alpha, Side side, double tol_rel) {
  validate_query(n, alpha);
  if (!(tol_rel > 0.0)) throw std::domain_error("tolerance must be > 0");
  if (n == 1) return alpha;  // a single local test is the global test
  double lo = alpha / n;
  double hi = alpha;
  for (int iter = 0; iter < 64; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double level = level_at_eta(n, mid, side, tol_rel);
    if (std::fabs(level - alpha) <= tol_rel * alpha) return mid;
    if (level < alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw non_convergence_error("local-level bisection failed to converge");
}

double eta_asymptotic(long n, double alpha) {
  if (n < 100) {
    throw std::domain_error("asymptotic local level requires n >= 100");
  }
  double c;
  if (std::fabs(alpha - 0.01) <= 1e-12) {
    c = 1.591;
  } else if (std::fabs(alpha - 0.05) <= 1e-12) {
    c = 1.3;
  } else if (std::fabs(alpha - 0.1) <= 1e-12) {
    c = 1.1;
  } else {
    throw unsupported_combination_error(
        "asymptotic local level is calibrated only for alpha in {0.01, 0.05, 0.1}");
  }
  const double log_n = std::log(static_cast<double>(n));
  const double log_log_n = std::log(log_n);
  const double log3_n = std::log(log_log_n);
  return -std::log1p(-alpha) / (2.0 * log_log_n * log_n) *
         (1.0 - c * log3_n / log_log_n);
}

EtaTable table_build(double alpha, Side side, std::span<const int> n_grid,
                     double tol) {
  if (n_grid.empty()) throw std::invalid_argument("table grid must be nonempty");
  EtaTable table;
  table.alpha = alpha;
  table.side = side;
  table.tol = tol;
  table.grid.reserve(n_grid.size());
  int prev_n = 0;
  for (int n : n_grid) {
    if (n <= prev_n) {
      throw std::invalid_argument("table grid must be strictly ascending");
    }
    prev_n = n;
    table.grid.emplace_back(n, solve_local_level(n, alpha, side, tol));
  }
  for (size_t i = 1; i < table.grid.size(); ++i) {
    if (!(table.grid[i].second < table.grid[i - 1].second)) {
      throw std::logic_error("table eta values failed to decrease in n");
    }
  }
  return table;
}

double table_interpolate(const EtaTable& table, int n) {
  if (table.grid.empty() || !table.covers(n)) {
    throw std::out_of_range("n outside table grid span");
  }
  const auto it = std::lower_bound(
      table.grid.begin(), table.grid.end(), n,
      [](const std::pair<int, double>& e, int v) { return e.first < v; });
  if (it->first == n) return it->second;
  const auto& [n2, eta2] = *it;
  const auto& [n1, eta1] = *(it - 1);
  const double t = static_cast<double>(n - n1) / static_cast<double>(n2 - n1);
  return eta1 + t * (eta2 - eta1);
}

std::string table_serialize(const EtaTable& table) {
  std::string out = "ellband-table v1 ";
  out += side_name(table.side);
  out += " alpha=" + format_double(table.alpha);
  out += " tol=" + format_double(table.tol);
  out += '\n';
  for (const auto& [n, eta] : table.grid) {
    out += std::to_string(n);
    out += '\t';
    out += format_double(eta);
    out += '\n';
  }
  return out;
}

namespace {

[[noreturn]] void parse_fail(const std::string& why) {
  throw std::invalid_argument("malformed ellband table: " + why);
}

double parse_strict_double(const std::string& s, const char* what) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    parse_fail(std::string("bad ") + what);
  }
  if (pos != s.size()) parse_fail(std::string("trailing junk after ") + what);
  return v;
}

}  // namespace

EtaTable table_parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header)) parse_fail("empty input");
  std::istringstream hs(header);
  std::string magic, version, side_tok, alpha_tok, tol_tok, extra;
  hs >> magic >> version >> side_tok >> alpha_tok >> tol_tok;
  if (magic != "ellband-table" || version != "v1") parse_fail("bad header");
  if (hs >> extra) parse_fail("unexpected header field");
  EtaTable table;
  if (side_tok == "one-sided") {
    table.side = Side::one_sided;
  } else if (side_tok == "two-sided") {
    table.side = Side::two_sided;
  } else {
    parse_fail("unknown side '" + side_tok + "'");
  }
  if (alpha_tok.rfind("alpha=", 0) != 0) parse_fail("missing alpha field");
  if (tol_tok.rfind("tol=", 0) != 0) parse_fail("missing tol field");
  table.alpha = parse_strict_double(alpha_tok.substr(6), "alpha");
  table.tol = parse_strict_double(tol_tok.substr(4), "tol");
  if (!(table.alpha > 0.0 && table.alpha < 1.0)) parse_fail("alpha out of range");

  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      if (in.peek() != std::char_traits<char>::eof()) {
        parse_fail("blank line " + std::to_string(line_no));
      }
      break;
    }
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      parse_fail("line " + std::to_string(line_no) + " missing tab");
    }
    const std::string n_str = line.substr(0, tab);
    size_t pos = 0;
    long n = 0;
    try {
      n = std::stol(n_str, &pos);
    } catch (const std::exception&) {
      parse_fail("bad n on line " + std::to_string(line_no));
    }
    if (pos != n_str.size() || n < 1) {
      parse_fail("bad n on line " + std::to_string(line_no));
    }
    const double eta = parse_strict_double(line.substr(tab + 1), "eta");
    if (!(eta > 0.0 && eta < 1.0)) {
      parse_fail("eta out of range on line " + std::to_string(line_no));
    }
    if (!table.grid.empty()) {
      if (n <= table.grid.back().first) {
        parse_fail("n not ascending on line " + std::to_string(line_no));
      }
      if (!(eta < table.grid.back().second)) {
        parse_fail("eta not decreasing on line " + std::to_string(line_no));
      }
    }
    table.grid.emplace_back(static_cast<int>(n), eta);
  }
  if (table.grid.empty()) parse_fail("no grid rows");
  return table;
}

TableStore TableStore::load_directory(const std::filesystem::path& dir) {
  TableStore store;
  if (!std::filesystem::is_directory(dir)) return store;
  std::set<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tsv") {
      files.insert(entry.path());
    }
  }
  for (const auto& file : files) {
    std::ifstream in(file);
    std::ostringstream buf;
    buf << in.rdbuf();
    store.add(table_parse(buf.str()));
  }
  return store;
}

const EtaTable* TableStore::find(double alpha, Side side) const {
  for (const auto& t : tables_) {
    if (t.side == side && std::fabs(t.alpha - alpha) <= 1e-12) return &t;
  }
  return nullptr;
}

EtaResult resolve_eta(const LocalLevelQuery& query, const TableStore* tables) {
  validate_query(query.n, query.alpha);
  const EtaTable* table =
      tables ? tables->find(query.alpha, query.side) : nullptr;
  const bool table_covers = table && table->covers(query.n);

  switch (query.policy) {
    case SolvePolicy::table:
      if (!table_covers) {
        throw unsupported_combination_error(
            "no loaded table covers this (alpha, side, n)");
      }
      return {table_interpolate(*table, query.n), EtaResult::Path::table};
    case SolvePolicy::exact:
      return {solve_local_level(query.n, query.alpha, query.side,
                                kSolveTolDefault),
              EtaResult::Path::exact};
    case SolvePolicy::asymptotic:
      if (query.side != Side::two_sided) {
        throw unsupported_combination_error(
            "asymptotic local levels are calibrated for two-sided bands only");
      }
      return {eta_asymptotic(query.n, query.alpha), EtaResult::Path::asymptotic};
    case SolvePolicy::auto_policy:
      break;
  }

  if (table_covers) {
    return {table_interpolate(*table, query.n), EtaResult::Path::table};
  }
  if (query.n <= kExactNCap) {
    return {solve_local_level(query.n, query.alpha, query.side,
                              kSolveTolDefault),
            EtaResult::Path::exact};
  }
  if (query.side == Side::two_sided && query.n >= 100) {
    try {
      return {eta_asymptotic(query.n, query.alpha), EtaResult::Path::asymptotic};
    } catch (const unsupported_combination_error&) {
      // fall through to the advice below
    }
  }
  throw unsupported_combination_error(
      "no computation path for alpha=" + std::to_string(query.alpha) +
      ", n=" + std::to_string(query.n) + " (" + side_name(query.side) +
      "): lower n, use alpha in {0.01, 0.05, 0.1} for the large-n "
      "asymptotics, or supply a lookup table built with the `table` command");
}

std::vector<int> default_table_grid() {
  std::vector<int> grid;
  for (int n = 10; n <= 1000; n += 10) grid.push_back(n);
  const double ratio = std::log(20000.0 / 1000.0);
  for (int i = 1; i <= 40; ++i) {
    const int n = static_cast<int>(std::lround(
        1000.0 * std::exp(ratio * static_cast<double>(i) / 40.0)));
    if (n > grid.back()) grid.push_back(n);
  }
  return grid;
}

}  // namespace ellband
