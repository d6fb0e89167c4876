#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace zoopt {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad dimensions, empty index lists, duplicate coordinates and similar caller mistakes.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Sample index outside the objective's sample space.
class InvalidSample : public Error {
 public:
  using Error::Error;
};

/// Input outside a function's mathematical domain (e.g. atanh at the box boundary).
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// An invariant that upstream code guarantees was violated.
class InternalInvariant : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared. Carries the offending point and, inside an
/// optimizer loop, the iteration index.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, std::vector<double> point = {},
                        std::optional<std::int64_t> iteration = std::nullopt)
      : Error(what), point_(std::move(point)), iteration_(iteration) {}

  const std::vector<double>& point() const noexcept { return point_; }
  std::optional<std::int64_t> iteration() const noexcept { return iteration_; }

 private:
  std::vector<double> point_;
  std::optional<std::int64_t> iteration_;
};

/// Invalid run configuration. `key()` names the offending setting.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace zoopt
