#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boxworld {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSystemSpec : public Error {
 public:
  using Error::Error;
};

class InvalidLabel : public Error {
 public:
  using Error::Error;
};

class InvalidAssignment : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotInCone : public Error {
 public:
  using Error::Error;
};

class ClassicalSystemUnsupported : public Error {
 public:
  using Error::Error;
};

class ResourceBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class InvalidWitnessProblem : public Error {
 public:
  using Error::Error;
};

/// An internal postcondition failed. Seeing this means a bug (or a
/// counterexample to a verified statement), never bad input.
class ConstructionBug : public Error {
 public:
  using Error::Error;
};

class PreconditionNotMet : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace boxworld
