#include "mlrfe/error.hpp"

namespace mlrfe {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AxisTooShort: return "AxisTooShort";
    case ErrorCode::NotStrictlyIncreasing: return "NotStrictlyIncreasing";
    case ErrorCode::OutOfHull: return "OutOfHull";
    case ErrorCode::InvalidTable: return "InvalidTable";
    case ErrorCode::DanglingVariable: return "DanglingVariable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BoundsOutsideHull: return "BoundsOutsideHull";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::NoValidSegment: return "NoValidSegment";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ProblemTooLarge: return "ProblemTooLarge";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace mlrfe
