#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "analysis.hpp"
#include "data.hpp"

namespace relint {

inline constexpr int kSchemaVersion = 1;

nlohmann::json baseline_summary(const BaselineModel& baseline);

// {schema, params, baseline, cv, threshold, prediction_interval, counts,
//  features: [{name, lower, upper, lower_norm, upper_norm, class, relevance}]}
nlohmann::json analysis_to_json(const AnalysisResult& analysis);

// Same feature layout plus per-feature `constrained` and `error`, and the
// applied constraints.
nlohmann::json constrained_to_json(const AnalysisResult& analysis,
                                   const ConstrainedResult& result);

// Accepts {"constraints": [...], "normalized": bool} or a bare array. Items
// are {"feature": name|index, "min": a, "max": b} or {"feature", "value"}.
// Normalized values are multiples of mu. Throws Error(kInvalidArgument).
ConstraintSet constraints_from_json(const nlohmann::json& body, const AnalysisResult& analysis);

nlohmann::json params_to_json(const AnalyzeParams& params);
AnalyzeParams params_from_json(const nlohmann::json& j);

nlohmann::json spec_to_json(const SimulationSpec& spec);
// Missing keys keep their defaults. Throws Error(kSpec).
SimulationSpec spec_from_json(const nlohmann::json& j);

// Two-space indented dump with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace relint
