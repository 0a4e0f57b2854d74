#pragma once

#include <stdexcept>
#include <string>

namespace l0bb {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Point outside the effective domain of a function whose subdifferential was requested.
struct DomainError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct BranchError : Error {
  using Error::Error;
};

struct SizeError : Error {
  using Error::Error;
};

struct DegenerateError : Error {
  using Error::Error;
};

/// Invalid configuration. Carries the dotted path of the offending field when known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
  ConfigError(std::string field, const std::string& msg)
      : Error(field + ": " + msg), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace l0bb
