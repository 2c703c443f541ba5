#pragma once

#include <stdexcept>
#include <string>

namespace mdagid {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unknown vertex, model or variable name.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Malformed arguments: overlapping sets, invalid orders, bad values.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

enum class ModelErrorKind { RestrictionA, RestrictionB, Acyclicity, UnknownVertex, InvalidName, Unsupported };

class ModelError : public Error {
 public:
  ModelError(ModelErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  ModelErrorKind kind() const { return kind_; }

 private:
  ModelErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Raised when an operation needs to sum out a vertex the kernel is
// implicitly conditioned on.
class SelectionBlocked : public Error {
 public:
  SelectionBlocked(const std::string& vertex, const std::string& what) : Error(what), vertex_(vertex) {}
  const std::string& vertex() const { return vertex_; }

 private:
  std::string vertex_;
};

class ContradictionError : public Error {
 public:
  using Error::Error;
};

class NotCompilable : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class StateSpaceError : public Error {
 public:
  using Error::Error;
};

class UnsupportedQuery : public Error {
 public:
  using Error::Error;
};

}  // namespace mdagid
