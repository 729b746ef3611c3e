#pragma once

#include <stdexcept>
#include <string>

namespace relint {

enum class ErrorCode {
  kInvalidArgument,
  kMalformedProblem,
  kNumericalFailure,
  kIo,
  kParse,
  kLabel,
  kSpec,
  kFold,
  kDimension,
  kInfeasible,
  kOptimizationFailure,
  kDegenerateDistribution,
  kBudgetExceeded,
  kNotFound,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; the code drives C status and HTTP
// status mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace relint
