#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cupgeo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point outside the chart domain, or a field that is not finite there.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Requested derivative order exceeds what the jet engine carries.
class UnsupportedOrderError : public Error {
 public:
  using Error::Error;
};

/// Slot kinds do not match the requested index operation.
class VarianceError : public Error {
 public:
  using Error::Error;
};

class SingularMetricError : public Error {
 public:
  SingularMetricError(const std::string& what, double smallest_eigenvalue)
      : Error(what), smallest_eigenvalue_(smallest_eigenvalue) {}

  double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

/// Expression syntax error. `position` is a 0-based byte offset into the
/// source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Malformed model, rescaling or suite configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cupgeo
