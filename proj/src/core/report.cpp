#include "report.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace relint {

using nlohmann::json;

namespace {

// NaN and infinities become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

json feature_json(const AnalysisResult& analysis, const RelevanceIntervals& intervals,
                  const RelevanceClasses& classes, Eigen::Index j) {
  const auto c = classes.classes[static_cast<std::size_t>(j)];
  json f;
  f["name"] = analysis.data.feature_names[static_cast<std::size_t>(j)];
  f["lower"] = number(intervals.lower[j]);
  f["upper"] = number(intervals.upper[j]);
  f["lower_norm"] = number(intervals.lower_normalized(j));
  f["upper_norm"] = number(intervals.upper_normalized(j));
  f["class"] = static_cast<int>(c);
  f["relevance"] = to_string(c);
  return f;
}

json counts_json(const RelevanceClasses& classes) {
  return {{"strong", classes.count(RelevanceClass::kStrong)},
          {"weak", classes.count(RelevanceClass::kWeak)},
          {"irrelevant", classes.count(RelevanceClass::kIrrelevant)}};
}

double normalized(double value, double mu) { return mu > 0.0 ? value / mu : 0.0; }

double get_number(const json& item, const char* key) {
  const auto it = item.find(key);
  if (it == item.end() || !it->is_number()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("constraint needs a numeric '") + key + "'");
  }
  return it->get<double>();
}

}  // namespace

json baseline_summary(const BaselineModel& baseline) {
  return {{"C", baseline.C},
          {"mu", baseline.mu},
          {"rho", baseline.rho},
          {"cv_score", baseline.cv_score}};
}

json analysis_to_json(const AnalysisResult& analysis) {
  const double mu = analysis.baseline.mu;
  json out;
  out["schema"] = kSchemaVersion;
  out["params"] = params_to_json(analysis.params);
  json baseline = baseline_summary(analysis.baseline);
  baseline["bias"] = analysis.baseline.bias;
  baseline["weights"] = vector_json(analysis.baseline.weights);
  baseline["train_accuracy"] =
      accuracy(analysis.data.labels, predict(analysis.baseline, analysis.data.samples));
  out["baseline"] = baseline;
  out["cv"] = {{"grid", analysis.cv.grid}, {"scores", analysis.cv.mean_scores}};
  out["threshold"] = number(analysis.pi.upper);
  out["threshold_norm"] = number(normalized(analysis.pi.upper, mu));
  out["prediction_interval"] = {{"mean", analysis.pi.mean},
                                {"sd", analysis.pi.sd},
                                {"p", analysis.pi.p},
                                {"t", analysis.pi.t_quantile},
                                {"lower", analysis.pi.lower},
                                {"upper", analysis.pi.upper},
                                {"n_probes", analysis.probes.n_probes},
                                {"skipped", analysis.probes.skipped}};
  out["counts"] = counts_json(analysis.classes);
  json features = json::array();
  for (Eigen::Index j = 0; j < analysis.intervals.size(); ++j) {
    json f = feature_json(analysis, analysis.intervals, analysis.classes, j);
    if (!analysis.intervals.ok(j)) f["error"] = analysis.intervals.errors[static_cast<std::size_t>(j)];
    features.push_back(std::move(f));
  }
  out["features"] = std::move(features);
  return out;
}

json constrained_to_json(const AnalysisResult& analysis, const ConstrainedResult& result) {
  const double mu = analysis.baseline.mu;
  json out;
  out["schema"] = kSchemaVersion;
  out["baseline"] = baseline_summary(analysis.baseline);
  out["threshold"] = number(analysis.pi.upper);
  out["threshold_norm"] = number(normalized(analysis.pi.upper, mu));
  json constraints = json::array();
  for (const auto& [l, range] : result.constraints) {
    constraints.push_back({{"feature", analysis.data.feature_names[static_cast<std::size_t>(l)]},
                           {"index", l},
                           {"min", range.min},
                           {"max", range.max}});
  }
  out["constraints"] = std::move(constraints);
  out["counts"] = counts_json(result.classes);
  json features = json::array();
  for (Eigen::Index j = 0; j < result.intervals.size(); ++j) {
    json f = feature_json(analysis, result.intervals, result.classes, j);
    f["constrained"] = static_cast<bool>(result.intervals.constrained[static_cast<std::size_t>(j)]);
    const auto& error = result.intervals.errors[static_cast<std::size_t>(j)];
    f["error"] = error.empty() ? json(nullptr) : json(error);
    features.push_back(std::move(f));
  }
  out["features"] = std::move(features);
  return out;
}

ConstraintSet constraints_from_json(const json& body, const AnalysisResult& analysis) {
  const json* items = &body;
  bool scaled = false;
  if (body.is_object()) {
    const auto it = body.find("constraints");
    if (it == body.end()) throw Error(ErrorCode::kInvalidArgument, "missing 'constraints'");
    items = &*it;
    if (const auto n = body.find("normalized"); n != body.end()) {
      if (!n->is_boolean()) throw Error(ErrorCode::kInvalidArgument, "'normalized' must be a boolean");
      scaled = n->get<bool>();
    }
  }
  if (!items->is_array()) throw Error(ErrorCode::kInvalidArgument, "constraints must be an array");

  const auto& names = analysis.data.feature_names;
  const double factor = scaled ? analysis.baseline.mu : 1.0;
  ConstraintSet out;
  for (const auto& item : *items) {
    if (!item.is_object()) throw Error(ErrorCode::kInvalidArgument, "constraint must be an object");
    const auto feature = item.find("feature");
    if (feature == item.end()) throw Error(ErrorCode::kInvalidArgument, "constraint needs 'feature'");
    int index = -1;
    if (feature->is_number_integer()) {
      index = feature->get<int>();
    } else if (feature->is_string()) {
      const auto name = feature->get<std::string>();
      const auto pos = std::find(names.begin(), names.end(), name);
      if (pos == names.end()) throw Error(ErrorCode::kInvalidArgument, "unknown feature '" + name + "'");
      index = static_cast<int>(pos - names.begin());
    } else {
      throw Error(ErrorCode::kInvalidArgument, "'feature' must be a name or an index");
    }
    if (index < 0 || index >= static_cast<int>(names.size())) {
      throw Error(ErrorCode::kInvalidArgument, "feature index " + std::to_string(index) + " out of range");
    }
    if (out.contains(index)) {
      throw Error(ErrorCode::kInvalidArgument, "feature " + names[static_cast<std::size_t>(index)] +
                                                   " constrained twice");
    }
    FeatureConstraint range;
    if (item.contains("value")) {
      range.min = range.max = get_number(item, "value") * factor;
    } else {
      range.min = get_number(item, "min") * factor;
      range.max = get_number(item, "max") * factor;
    }
    out[index] = range;
  }
  validate_constraints(out, analysis.data.num_features());
  return out;
}

json params_to_json(const AnalyzeParams& params) {
  return {{"delta", params.delta},
          {"p", params.coverage},
          {"n_probes", params.n_probes},
          {"seed", params.seed},
          {"folds", params.folds},
          {"c_grid", params.c_grid},
          {"strong_tolerance", params.strong_tolerance}};
}

AnalyzeParams params_from_json(const json& j) {
  AnalyzeParams p;
  try {
    p.delta = j.value("delta", p.delta);
    p.coverage = j.value("p", p.coverage);
    p.n_probes = j.value("n_probes", p.n_probes);
    p.seed = j.value("seed", p.seed);
    p.folds = j.value("folds", p.folds);
    p.c_grid = j.value("c_grid", p.c_grid);
    p.strong_tolerance = j.value("strong_tolerance", p.strong_tolerance);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad analysis parameters: ") + e.what());
  }
  p.validate();
  return p;
}

json spec_to_json(const SimulationSpec& spec) {
  return {{"n_strong", spec.n_strong},
          {"n_weak", spec.n_weak},
          {"n_irrelevant", spec.n_irrelevant},
          {"n_samples", spec.n_samples},
          {"random_seed", spec.random_seed},
          {"weak_group_size", spec.weak_group_size},
          {"weak_jitter", spec.weak_jitter},
          {"label_flip_rate", spec.label_flip_rate}};
}

SimulationSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSpec, "simulation spec must be a JSON object");
  SimulationSpec s;
  try {
    s.n_strong = j.value("n_strong", s.n_strong);
    s.n_weak = j.value("n_weak", s.n_weak);
    s.n_irrelevant = j.value("n_irrelevant", s.n_irrelevant);
    s.n_samples = j.value("n_samples", s.n_samples);
    s.random_seed = j.value("random_seed", s.random_seed);
    s.weak_group_size = j.value("weak_group_size", s.weak_group_size);
    s.weak_jitter = j.value("weak_jitter", s.weak_jitter);
    s.label_flip_rate = j.value("label_flip_rate", s.label_flip_rate);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSpec, std::string("bad simulation spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace relint
