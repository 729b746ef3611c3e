#pragma once

#include <cstdint>
#include <vector>

#include "baseline.hpp"
#include "bounds.hpp"
#include "classify.hpp"
#include "data.hpp"
#include "lp.hpp"

namespace relint {

inline constexpr int kDefaultFolds = 3;

struct AnalyzeParams {
  double delta = kDefaultDelta;
  double coverage = kDefaultCoverage;
  int n_probes = kDefaultProbes;
  std::uint64_t seed = 0;
  // 0 = one per hardware thread. Never changes results.
  int workers = 0;
  int folds = kDefaultFolds;
  std::vector<double> c_grid = default_c_grid();
  double strong_tolerance = kDefaultStrongTolerance;

  // Throws Error(kInvalidArgument).
  void validate() const;
};

// Independent seed for stream `stream` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct AnalysisResult {
  AnalyzeParams params;
  Dataset data;  // standardized
  ColumnScaling scaling;
  CvReport cv;
  BaselineModel baseline;
  RelevanceIntervals intervals;
  ProbeResult probes;
  PredictionInterval pi;
  RelevanceClasses classes;
};

// standardize -> select C -> fit -> bounds -> probes -> classify.
AnalysisResult analyze(const Dataset& raw, const AnalyzeParams& params,
                       const lp::SolverConfig& solver = {});

struct ConstrainedResult {
  ConstraintSet constraints;
  RelevanceIntervals intervals;
  RelevanceClasses classes;
};

// Bounds of the unconstrained features under `constraints`, classified
// against the threshold of the original analysis. Throws Error(kInfeasible).
ConstrainedResult apply_constraints(const AnalysisResult& analysis,
                                    const ConstraintSet& constraints, int workers = 0,
                                    const lp::SolverConfig& solver = {});

}  // namespace relint
