#pragma once

#include <stdexcept>
#include <string>

namespace dcrn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed `.crn`, history, or expression input. Carries a 1-based
/// line/column when the input is line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line = 0, int column = 0)
      : Error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) +
                             ": " + message
                       : message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Input lies outside what the implementation supports (e.g. too many
/// species for exhaustive subset enumeration).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition does not hold (e.g. network not complex
/// balanced, certificate not persistent).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: quadrature non-convergence, Newton divergence,
/// integration blow-up, LP breakdown.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid solver or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dcrn
