#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "baseline.hpp"
#include "bounds.hpp"
#include "data.hpp"
#include "lp.hpp"

namespace relint {

inline constexpr int kDefaultProbes = 50;
inline constexpr double kDefaultCoverage = 0.999;
inline constexpr double kDefaultStrongTolerance = 1e-4;

struct ProbeResult {
  std::vector<double> probe_values;
  // Column each probe was permuted from, parallel to probe_values.
  std::vector<int> source_features;
  int n_probes = 0;  // requested
  int skipped = 0;
  std::uint64_t seed = 0;
};

// Each probe permutes a randomly chosen column, appends it and records its
// maxRel under the unchanged mu and rho. Failed probes are skipped; more than
// 10% skipped throws Error(kOptimizationFailure).
ProbeResult generate_probes(const Dataset& dataset, const BaselineModel& baseline,
                            int n_probes, double delta, std::uint64_t seed,
                            int workers = 0, const lp::SolverConfig& solver = {});

struct PredictionInterval {
  double mean = 0.0;
  double sd = 0.0;
  double p = kDefaultCoverage;
  double t_quantile = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// mean +- t_{n-1}(p) sd sqrt(1 + 1/n) with the n-1 sd. Throws
// Error(kDegenerateDistribution) for fewer than two values and
// Error(kInvalidArgument) unless 0.5 < p < 1.
PredictionInterval prediction_interval(const std::vector<double>& values, double p);
PredictionInterval prediction_interval(const ProbeResult& probes, double p);

struct RelevanceClasses {
  std::vector<RelevanceClass> classes;
  double threshold = 0.0;
  double strong_tolerance = kDefaultStrongTolerance;

  int count(RelevanceClass c) const;
};

// Irrelevant if upper <= threshold, strong if lower / mu > strong_tolerance,
// weak otherwise. Features whose bounds failed are irrelevant.
RelevanceClasses classify_features(const RelevanceIntervals& intervals,
                                   const PredictionInterval& pi,
                                   double strong_tolerance = kDefaultStrongTolerance);

std::string to_string(RelevanceClass c);

}  // namespace relint
