#pragma once

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "baseline.hpp"
#include "data.hpp"
#include "lp.hpp"
#include "svm_lp.hpp"

namespace relint {

inline constexpr double kDefaultDelta = 0.001;

// Range [min, max] imposed on |w_l| for a user-constrained feature.
struct FeatureConstraint {
  double min = 0.0;
  double max = 0.0;
};

// Feature index -> range. Not every feature needs an entry.
using ConstraintSet = std::map<int, FeatureConstraint>;

// Throws Error(kInvalidArgument) on bad indices or ranges outside
// 0 <= min <= max.
void validate_constraints(const ConstraintSet& constraints, Eigen::Index num_features);

struct BoundResult {
  double value = 0.0;
  // Model attaining the bound.
  Eigen::VectorXd witness_weights;
  double witness_bias = 0.0;
  Eigen::VectorXd witness_slacks;
};

// The set of models as good as the baseline, as LPs prepared for repeated
// bound solves. One LP per sign assignment of constrained features whose
// baseline weight is zero and whose range excludes zero.
class ModelClass {
 public:
  // `extends` may describe the same samples with fewer (leading) features
  // and the same constraints; its feasible start is reused.
  ModelClass(const Dataset& dataset, const BaselineModel& baseline, double delta,
             const ConstraintSet& constraints = {}, const lp::SolverConfig& solver = {},
             const ModelClass* extends = nullptr);

  // False when the constraints admit no model.
  bool feasible() const;
  Eigen::Index num_features() const { return layout_.features; }

  // nullopt when every branch is infeasible.
  std::optional<BoundResult> min_abs(Eigen::Index j) const;
  // Largest sign * w_j.
  std::optional<BoundResult> max_signed(Eigen::Index j, double sign) const;

 private:
  std::optional<BoundResult> optimize(Eigen::Index j, double positive_cost,
                                      double negative_cost, bool minimize) const;

  svm_lp::Layout layout_;
  lp::SolverConfig solver_;
  std::vector<std::shared_ptr<const lp::PreparedProblem>> branches_;
  std::vector<bool> branch_feasible_;
};

// Smallest |w_j| over the model class
//   y_i (w^T x_i - b) >= 1 - xi_i, xi >= 0, sum xi <= rho,
//   ||w||_1 <= (1 + delta) mu
// plus, for each constrained l, K_min <= sign(w~_l) w_l <= K_max. Throws
// Error(kInfeasible) if no model satisfies the constraints.
BoundResult min_rel(const Dataset& dataset, const BaselineModel& baseline,
                    Eigen::Index j, double delta, const ConstraintSet& constraints = {},
                    const lp::SolverConfig& solver = {});

// Largest |w_j| over the same model class (max of the two signed LPs).
BoundResult max_rel(const Dataset& dataset, const BaselineModel& baseline,
                    Eigen::Index j, double delta, const ConstraintSet& constraints = {},
                    const lp::SolverConfig& solver = {});

// Throws Error(kInfeasible) when the constraint set admits no equivalent
// model.
void check_feasible(const Dataset& dataset, const BaselineModel& baseline,
                    double delta, const ConstraintSet& constraints,
                    const lp::SolverConfig& solver = {});

struct RelevanceIntervals {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double delta = kDefaultDelta;
  // mu of the baseline, used for display scaling.
  double normalization = 0.0;
  // Features fixed by the user report their range instead of a solve.
  std::vector<bool> constrained;
  // Empty when the feature solved cleanly.
  std::vector<std::string> errors;

  Eigen::Index size() const { return lower.size(); }
  double lower_normalized(Eigen::Index j) const;
  double upper_normalized(Eigen::Index j) const;
  bool ok(Eigen::Index j) const { return errors[static_cast<std::size_t>(j)].empty(); }
};

// All 2d bound problems (three LPs per feature), spread over `workers`
// threads. Identical to a sequential run.
RelevanceIntervals compute_all(const Dataset& dataset, const BaselineModel& baseline,
                               double delta, const ConstraintSet& constraints = {},
                               int workers = 0, const lp::SolverConfig& solver = {});

}  // namespace relint
