#pragma once

#include <stdexcept>
#include <string>

namespace tepid {

// Malformed or incomplete experiment configuration. Carries the 1-based line
// number of the offending entry when one is known (0 = whole file / no line).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A request that exceeds what dense simulation is willing to honor: register
// wider than the hard cap, subspace larger than the register, and so on.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A violated numerical contract: expectation of a Hermitian observable with a
// large imaginary residue, probabilities negative beyond tolerance, strict
// truncation that would split a degenerate level, ...
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Contract violations on caller-supplied arguments use std::invalid_argument.

}  // namespace tepid
