#pragma once

#include <stdexcept>
#include <string>

namespace mlrfe {

enum class ErrorCode {
  AxisTooShort,
  NotStrictlyIncreasing,
  OutOfHull,
  InvalidTable,
  DanglingVariable,
  DimensionMismatch,
  BoundsOutsideHull,
  InvalidModel,
  NoValidSegment,
  NumericalFailure,
  ProblemTooLarge,
  EnumerationTooLarge,
  InvalidScenario,
  ParseError,
  UnsupportedFormat,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mlrfe
