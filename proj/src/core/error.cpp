#include "error.hpp"

namespace relint {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedProblem: return "MalformedProblem";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kLabel: return "LabelError";
    case ErrorCode::kSpec: return "SpecError";
    case ErrorCode::kFold: return "FoldError";
    case ErrorCode::kDimension: return "DimensionError";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kOptimizationFailure: return "OptimizationFailure";
    case ErrorCode::kDegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kNotFound: return "NotFound";
  }
  return "Unknown";
}

}  // namespace relint
