#pragma once

#include <stdexcept>
#include <string>

namespace ctt {

// Base class of every exception thrown by the library. The C API maps each
// subclass onto a distinct error code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line()` is 1-based; 0 means end of input.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed input that violates a semantic invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Misuse of the model builder (duplicate names, foreign references, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ExternalSolverError : public Error {
 public:
  enum class Kind { kProcessFailure, kUnparsable, kInconsistent };
  ExternalSolverError(Kind kind, const std::string& message)
      : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace ctt
