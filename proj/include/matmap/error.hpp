#pragma once

#include <stdexcept>
#include <string>

namespace matmap {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an operation's arguments was violated.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A file or stream could not be interpreted. Carries the source name and,
/// when known, the 1-based line the failure was detected on (0 = unknown).
class ParseError : public Error {
 public:
  ParseError(std::string source, int line, const std::string& message)
      : Error(format(source, line, message)), source_(std::move(source)), line_(line) {}

  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& source, int line, const std::string& message) {
    if (line > 0) return source + ":" + std::to_string(line) + ": " + message;
    return source + ": " + message;
  }

  std::string source_;
  int line_;
};

/// Tensor or container dimensions do not match an operation's contract.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A configuration value or referenced file failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation was called in the wrong order (e.g. backward before forward).
class StateError : public Error {
 public:
  using Error::Error;
};

/// A bounding box contains no cloud points, so no voxel can support it.
class NoSupportError : public Error {
 public:
  using Error::Error;
};

/// Filesystem read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Warning sink for non-fatal conditions (unknown material names, empty box
/// lists). Writes to stderr; kept as a function so tests can stay quiet.
void log_warning(const std::string& message);
void set_warnings_enabled(bool enabled);

}  // namespace matmap
