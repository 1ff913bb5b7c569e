#pragma once

#include <stdexcept>
#include <string>

namespace prefsim {

// A value violates a documented parameter invariant (non-finite, out of range).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A structurally invalid argument, e.g. an empty choice set.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A choice-probability ratio was requested where one of the terms is zero.
class UndefinedRatio : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input outside the mathematical domain of a closed form.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation requested on data it does not support (SLiC on |Y| != 2,
// malformed statistics files).
class UnsupportedFormat : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver or objective produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment configuration failed validation. `field()` names the offending
// key so front ends can report it.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace prefsim
