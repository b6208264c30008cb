#pragma once

#include <stdexcept>
#include <string>

namespace dlra {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Matrix dimensions do not match the operation's contract.
class ShapeError : public Error {
  using Error::Error;
};

/// A factor or core matrix lost rank where full rank is required.
class RankDeficiencyError : public Error {
  using Error::Error;
};

/// The requested retraction (or its inverse) is undefined for this argument.
class RetractionDomainError : public Error {
  using Error::Error;
};

/// A vector field lacks a capability (Jacobian action, time derivative)
/// required by the requested operation.
class CapabilityError : public Error {
  using Error::Error;
};

/// Invalid experiment configuration.
class ConfigError : public Error {
  using Error::Error;
};

/// A De Casteljau segment could not be evaluated. `level` identifies the
/// recursion level that failed: 0 for the control-point construction,
/// 1..3 for the blending levels.
class HermiteError : public Error {
 public:
  HermiteError(int level, const std::string& what_arg)
      : Error("hermite level " + std::to_string(level) + ": " + what_arg),
        level_(level) {}

  int level() const { return level_; }

 private:
  int level_;
};

}  // namespace dlra
