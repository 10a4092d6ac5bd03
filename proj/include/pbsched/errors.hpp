#pragma once

#include <stdexcept>
#include <string>

namespace pbsched {

/// Base of every error raised by the library. Callers that only need a
/// diagnostic can catch this; tests match on the concrete subclasses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (non-positive resistance, SOC outside (0, 1], negative time, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix sizes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A condition that valid inputs cannot produce; indicates a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// A sensor reading the discharge-only scheduler cannot interpret.
class MeasurementError : public Error {
 public:
  using Error::Error;
};

/// The scheduler produced a duty cycle outside (0, 1].
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration failed validation; message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class FileError : public Error {
 public:
  using Error::Error;
};

}  // namespace pbsched
