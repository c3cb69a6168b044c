#ifndef LORENZCODE_ERRORS_HPP
#define LORENZCODE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lzc {

// Base class for all library errors. The CLI maps subtypes onto exit codes:
// domain/validation failures exit 1, I/O and format failures exit 2.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text (decimal literals, keys, config values).
class ParseError : public Error {
public:
  using Error::Error;
};

// Precondition violations: mixed precisions, division by zero, invalid
// parameter ranges, samples too small.
class DomainError : public Error {
public:
  using Error::Error;
};

// Exponent overflow/underflow beyond the configured range. Results are
// never silently saturated.
class NonFiniteError : public Error {
public:
  using Error::Error;
};

// An integration produced a non-finite state. Carries the step at which
// it happened (0-based index of the failing step).
class DivergedError : public Error {
public:
  DivergedError(const std::string& msg, std::size_t step)
      : Error(msg + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

// Least-squares fit could not be performed (degenerate design, bad anchors).
class FitError : public Error {
public:
  using Error::Error;
};

// A divergence-time measurement ran past its horizon without crossing the
// threshold. Carries the horizon that was searched.
class MectHorizonError : public Error {
public:
  MectHorizonError(const std::string& msg, double t_max)
      : Error(msg + " (t_max " + std::to_string(t_max) + ")"), t_max_(t_max) {}
  double t_max() const noexcept { return t_max_; }

private:
  double t_max_;
};

// Invalid configuration (base parameters violating one-way invariants,
// unknown config keys).
class ConfigError : public Error {
public:
  using Error::Error;
};

// Structurally invalid serialized data: bad magic, unsupported version,
// inconsistent lengths.
class FormatError : public Error {
public:
  using Error::Error;
};

// Filesystem-level failure.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace lzc

#endif
