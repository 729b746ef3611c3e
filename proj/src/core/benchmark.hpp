#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "data.hpp"

namespace relint {

struct SelectionScore {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  // 0 whenever the denominator is 0.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Relevant = weak or strong in the truth. Throws Error(kDimension) on size
// mismatch.
SelectionScore score_selection(const std::vector<bool>& predicted_relevant,
                               const GroundTruth& truth);
SelectionScore score_counts(int tp, int fp, int fn);

struct NamedSpec {
  std::string name;
  SimulationSpec spec;
};

// Sim1..Sim5: (4,4,22), (12,8,10), (4,0,26), (18,0,12), (0,20,10), 500
// samples each.
std::vector<NamedSpec> standard_configs();

struct ReplicateRow;

// Sees each successful replicate. Called from worker threads.
using ReplicateObserver =
    std::function<void(const ReplicateRow&, const Simulation&, const AnalysisResult&)>;

struct BenchmarkOptions {
  int replicates = 10;
  std::uint64_t seed = 0;
  AnalyzeParams analysis;
  // Replicates in flight at once; each replicate runs single threaded.
  int workers = 0;
  ReplicateObserver observer;
};

struct ReplicateRow {
  std::size_t config = 0;
  int replicate = 0;
  std::uint64_t data_seed = 0;
  bool ok = false;
  std::string error;
  SelectionScore score;
  double train_accuracy = 0.0;
  int strong = 0;
  int weak = 0;
  int irrelevant = 0;
  double seconds = 0.0;
};

struct ConfigSummary {
  NamedSpec config;
  int replicates = 0;
  int failures = 0;
  double mean_precision = 0.0;
  double sd_precision = 0.0;
  double mean_recall = 0.0;
  double sd_recall = 0.0;
  double mean_f1 = 0.0;
  double sd_f1 = 0.0;
  double mean_train_accuracy = 0.0;
  double min_train_accuracy = 0.0;
  double mean_seconds = 0.0;
};

struct BenchmarkReport {
  std::vector<ConfigSummary> configs;
  std::vector<ReplicateRow> rows;
};

// Per replicate: simulate -> analyze -> score. Failures are recorded in the
// row and left out of the aggregates.
BenchmarkReport run_benchmark(const std::vector<NamedSpec>& configs,
                              const BenchmarkOptions& options,
                              const lp::SolverConfig& solver = {});

// Aggregates over the successful rows of one config.
ConfigSummary summarize(const NamedSpec& config, const std::vector<ReplicateRow>& rows);

// Timings are only written when `timing` is set.
nlohmann::json report_to_json(const BenchmarkReport& report, bool timing = false);
std::string report_to_csv(const BenchmarkReport& report, bool timing = false);

// Accepts an array of specs, each optionally named ("name"), or
// {"configs": [...]}. Throws Error(kSpec).
std::vector<NamedSpec> configs_from_json(const nlohmann::json& j);

}  // namespace relint
