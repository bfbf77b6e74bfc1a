#pragma once

#include <stdexcept>
#include <string>

namespace spikecount {

// Argument outside the domain of an analytic function (x <= 0 for h, x <= 1 for psi, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Root target not enclosed by the (expanded) bracket.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative method exhausted its budget before reaching tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or degenerate input data (shape mismatch, nonfinite entries, nonpositive logs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment plan or command configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace spikecount
