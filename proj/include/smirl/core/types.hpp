#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace smirl {

/// Fixed-length real vector emitted by an environment each step.
using Observation = std::vector<double>;

/// Raised when a caller breaks an operation's precondition (wrong dimension,
/// acting on a finished episode, invalid configuration value).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractError(what);
}

inline void require_dim(std::size_t got, std::size_t expected, const char* where) {
  if (got != expected) {
    throw ContractError(std::string(where) + ": dimension mismatch (got " + std::to_string(got) +
                        ", expected " + std::to_string(expected) + ")");
  }
}

inline bool all_finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace smirl
