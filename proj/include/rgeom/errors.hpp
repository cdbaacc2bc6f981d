#pragma once

#include <stdexcept>
#include <string>

namespace rgeom {

/// Base class for all engine errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A chart point left (or started outside) the declared domain box,
/// or a metric failed to be positive definite where it must be.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Syntax or semantic error in a .metric definition. Carries 1-based
/// line/column of the offending token (0 when not applicable).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_ = 0;
  int column_ = 0;
};

/// Iterative solver failure: boundary-value shooting did not converge
/// (typically an out-of-injectivity-radius request) or produced a
/// non-finite state.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rgeom
