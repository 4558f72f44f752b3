#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evcap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure failed to bracket or converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, std::string field = {})
      : Error(what), line_(line), field_(std::move(field)) {}
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

/// Structurally valid data that violates one or more model invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// No open station covers a zone at some scenario node.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// A construction procedure could not produce a feasible deployment.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A limit expired before any feasible point was found.
class TimeLimitError : public Error {
 public:
  using Error::Error;
};

/// Bad generator or command-line parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

}  // namespace evcap
