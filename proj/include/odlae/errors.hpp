#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace odlae {

// Base for every error raised by the library. Callers that only need a
// message catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-conforming tensor shapes or element counts.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A value violates an operation's precondition (NaN input, negative loss,
// label outside the class range).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A gradient or parameter became non-finite.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Bad configuration: out-of-range hyperparameter, unsupported transform.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data. `record` is the 1-based line (CSV) or 0-based
// stream index, whichever the raiser documents.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t record)
      : Error(what), record_(record) {}
  std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

// Checkpoint file is unreadable, truncated or of an incompatible version.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace odlae
