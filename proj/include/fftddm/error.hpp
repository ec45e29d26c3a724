#pragma once

#include <stdexcept>
#include <string>

namespace fftddm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  /// Short machine-readable category used by the CLI error line.
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

/// A composite or rectangle failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

/// A direct solve hit a (numerically) singular operator.
class SingularError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "singular"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

}  // namespace fftddm
