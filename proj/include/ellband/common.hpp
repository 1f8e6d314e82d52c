#pragma once

#include <stdexcept>
#include <string>

namespace ellband {

enum class Side { one_sided, two_sided };

inline const char* side_name(Side s) {
  return s == Side::one_sided ? "one-sided" : "two-sided";
}

// A (alpha, n, side) combination that no available computation path can
// serve.  The CLI maps this to its own exit code.
class unsupported_combination_error : public std::runtime_error {
 public:
  explicit unsupported_combination_error(const std::string& what)
      : std::runtime_error(what) {}
};

// An iterative solver hit its iteration cap; indicates a numerical defect
// rather than bad input.
class non_convergence_error : public std::runtime_error {
 public:
  explicit non_convergence_error(const std::string& what)
      : std::runtime_error(what) {}
};

// All sample points equal (or otherwise scale-free), so no scale estimate
// exists.
class degenerate_sample_error : public std::invalid_argument {
 public:
  explicit degenerate_sample_error(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace ellband
