#pragma once

#include <stdexcept>
#include <string>

namespace tssqp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The problem's formulas produced a non-finite value at the requested point.
class EvaluationFailure : public Error {
 public:
  using Error::Error;
};

class UnknownProblem : public Error {
 public:
  explicit UnknownProblem(const std::string& name)
      : Error("unknown problem '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Malformed problem file. `line` is 1-based, 0 when the error is not tied
/// to a position in the text (e.g. a missing field).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, std::string field)
      : Error(what), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

class RankDeficientJacobian : public Error {
 public:
  using Error::Error;
};

class IndefiniteReducedHessian : public Error {
 public:
  using Error::Error;
};

class NonPositiveBeta : public Error {
 public:
  using Error::Error;
};

class InvalidLineSearchConfig : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

}  // namespace tssqp
