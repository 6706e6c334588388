#pragma once

#include <stdexcept>
#include <string>

namespace qtd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration. `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Argument outside the physical domain (e.g. at or below the horizon).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Quadrature did not reach the requested tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimate, double error_bound)
      : Error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// A derived quantity was requested from data that cannot support it.
class ValidityError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtd
