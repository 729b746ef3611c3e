#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace relint {

enum class RelevanceClass : int { kIrrelevant = 0, kWeak = 1, kStrong = 2 };

struct Dataset {
  Eigen::MatrixXd samples;  // n x d
  Eigen::VectorXd labels;   // entries in {-1, +1}
  std::vector<std::string> feature_names;
  // Original label symbols mapped to -1 and +1.
  std::array<std::string, 2> label_names{"-1", "1"};
  std::string label_column = "label";
  bool standardized = false;
  // Filled by standardize(): columns with zero variance, now all zeros.
  std::vector<bool> constant_columns;

  Eigen::Index num_samples() const { return samples.rows(); }
  Eigen::Index num_features() const { return samples.cols(); }

  // n >= 2, both classes present, consistent dimensions; throws Error.
  void validate() const;

  Dataset select_rows(std::span<const int> rows) const;
  Dataset append_column(const Eigen::VectorXd& column, std::string name) const;
};

struct ColumnScaling {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;  // population sd; 0 for constant columns
};

// CSV with header row, ',' separator, '.' decimal. The label column may hold
// any two distinct symbols; the smaller one (numerically when both parse as
// numbers) maps to -1.
Dataset parse_csv(std::string_view text, std::string_view label_column,
                  std::string_view source = "<memory>");
Dataset load_csv(const std::filesystem::path& path, std::string_view label_column);

// Shortest round-trip formatting: reload gives bit-identical values.
std::string to_csv(const Dataset& dataset);
void write_csv(const Dataset& dataset, const std::filesystem::path& path);

// Per-column z-score with population sd. Constant columns become zeros and
// are flagged in constant_columns.
Dataset standardize(const Dataset& dataset, ColumnScaling* scaling = nullptr);
Eigen::MatrixXd destandardize(const Eigen::MatrixXd& standardized,
                              const ColumnScaling& scaling);

struct SimulationSpec {
  int n_strong = 4;
  int n_weak = 4;
  int n_irrelevant = 22;
  int n_samples = 500;
  std::uint64_t random_seed = 0;
  // Members per weakly relevant group; the last groups absorb remainders.
  int weak_group_size = 4;
  // Sd of the per-member jitter around the replaced latent feature. 0 gives
  // exact copies.
  double weak_jitter = 0.0;
  double label_flip_rate = 0.0;

  int num_features() const { return n_strong + n_weak + n_irrelevant; }
  void validate() const;
};

struct GroundTruth {
  std::vector<RelevanceClass> true_class;
};

struct Simulation {
  Dataset dataset;
  GroundTruth truth;
};

// Labels come from the side of a random hyperplane through the origin in a
// latent standard-normal space. Strong features are latent coordinates; each
// weak group replaces one latent coordinate f by columns c_i with
// sum_i a_i c_i = f; irrelevant features are independent N(0,1).
Simulation simulate(const SimulationSpec& spec);

// Header "feature,class", then one row per feature with its class code.
std::string ground_truth_csv(const Dataset& dataset, const GroundTruth& truth);
void write_ground_truth(const Dataset& dataset, const GroundTruth& truth,
                        const std::filesystem::path& path);

struct Fold {
  std::vector<int> train;
  std::vector<int> test;
};

std::vector<Fold> stratified_kfold(const Eigen::VectorXd& labels, int k,
                                   std::uint64_t seed);

}  // namespace relint
