#pragma once

#include <stdexcept>
#include <string>

namespace besov {

// Invalid user input: out-of-range parameters, unknown names, malformed files.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// The wavelet does not satisfy the nonvanishing condition on (0, 1 + delta1].
class AssumptionViolation : public ConfigError {
 public:
  explicit AssumptionViolation(const std::string& what) : ConfigError(what) {}
};

// A numerical quantity is undefined for the given inputs (zero energy, singular
// refinement system, ...).
class DegenerateError : public std::runtime_error {
 public:
  explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace besov
