#include "tlrisk/errors.hpp"

namespace tlrisk {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorKind::SingularInputCovariance: return "SingularInputCovariance";
    case ErrorKind::SingularReference: return "SingularReference";
    case ErrorKind::SingularIntermediateCovariance: return "SingularIntermediateCovariance";
    case ErrorKind::DegeneratePushforward: return "DegeneratePushforward";
    case ErrorKind::InconsistentAugmentation: return "InconsistentAugmentation";
    case ErrorKind::NonpositiveLambda: return "NonpositiveLambda";
    case ErrorKind::EmptyIntermediateSet: return "EmptyIntermediateSet";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::NegativeRisk: return "NegativeRisk";
    case ErrorKind::OrderZero: return "OrderZero";
    case ErrorKind::OrderTooLarge: return "OrderTooLarge";
    case ErrorKind::DegeneratePath: return "DegeneratePath";
    case ErrorKind::WindowTooLong: return "WindowTooLong";
    case ErrorKind::EmptyTestSet: return "EmptyTestSet";
    case ErrorKind::InsufficientHistory: return "InsufficientHistory";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::NonPSDSigma: return "NonPSDSigma";
    case ErrorKind::ZeroVariancePortfolio: return "ZeroVariancePortfolio";
    case ErrorKind::NotOneDimensional: return "NotOneDimensional";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SingularInputCovariance:
    case ErrorKind::SingularReference:
    case ErrorKind::SingularIntermediateCovariance:
    case ErrorKind::DegeneratePushforward:
    case ErrorKind::DegenerateVariance:
    case ErrorKind::ZeroVariancePortfolio:
      return false;
    default:
      return true;
  }
}

}  // namespace tlrisk
