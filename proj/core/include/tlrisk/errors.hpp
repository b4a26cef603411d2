#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tlrisk {

enum class ErrorKind {
  DimensionMismatch,
  InvalidArgument,
  NotSymmetric,
  NotPositiveSemidefinite,
  SingularInputCovariance,
  SingularReference,
  SingularIntermediateCovariance,
  DegeneratePushforward,
  InconsistentAugmentation,
  NonpositiveLambda,
  EmptyIntermediateSet,
  EmptySample,
  SizeMismatch,
  NegativeRisk,
  OrderZero,
  OrderTooLarge,
  DegeneratePath,
  WindowTooLong,
  EmptyTestSet,
  InsufficientHistory,
  DegenerateVariance,
  NonPSDSigma,
  ZeroVariancePortfolio,
  NotOneDimensional,
  SchemaError,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for errors caused by malformed or inconsistent input (CLI exit code 2);
/// false for failures of the numerics on otherwise valid input (exit code 3).
bool is_validation_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace tlrisk
