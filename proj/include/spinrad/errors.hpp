#pragma once

#include <stdexcept>
#include <string>

namespace spinrad {

/// Argument outside the domain of a function (poles, overflow, z = 0 for Hankel, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A quantity that diverges where the caller is expected to take a limit instead.
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Tabulated data queried outside its grid.
class ExtrapolationError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Near-vanishing denominator in a scattering amplitude.
class ResonanceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Time step too large for the explicit stochastic integrator.
class StepSizeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Numerical procedure failed to reach its tolerance (quadrature, mode sums, grids).
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Invalid scenario configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spinrad
