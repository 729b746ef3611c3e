#include "bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "error.hpp"
#include "parallel.hpp"
#include "svm_lp.hpp"

namespace relint {

void validate_constraints(const ConstraintSet& constraints, Eigen::Index num_features) {
  for (const auto& [feature, range] : constraints) {
    if (feature < 0 || feature >= num_features) {
      throw Error(ErrorCode::kInvalidArgument,
                  "constraint on unknown feature index " + std::to_string(feature));
    }
    if (!std::isfinite(range.min) || !std::isfinite(range.max) || range.min < 0.0 ||
        range.min > range.max) {
      throw Error(ErrorCode::kInvalidArgument,
                  "constraint on feature " + std::to_string(feature) +
                      " must satisfy 0 <= min <= max");
    }
  }
}

double RelevanceIntervals::lower_normalized(Eigen::Index j) const {
  return normalization > 0.0 ? lower[j] / normalization : 0.0;
}

double RelevanceIntervals::upper_normalized(Eigen::Index j) const {
  return normalization > 0.0 ? upper[j] / normalization : 0.0;
}

namespace {

constexpr std::size_t kMaxSignBranches = 12;

[[noreturn]] void solve_failed(Eigen::Index j, const Error& e) {
  if (e.code() == ErrorCode::kBudgetExceeded) throw e;
  throw Error(ErrorCode::kOptimizationFailure,
              "bound LP for feature " + std::to_string(j) + " failed: " + e.what());
}

void check_index(const Dataset& dataset, Eigen::Index j, const ConstraintSet& constraints) {
  if (j < 0 || j >= dataset.num_features()) {
    throw Error(ErrorCode::kInvalidArgument, "feature index " + std::to_string(j) + " out of range");
  }
  if (constraints.contains(static_cast<int>(j))) {
    throw Error(ErrorCode::kInvalidArgument,
                "feature " + std::to_string(j) + " is itself constrained");
  }
}

[[noreturn]] void throw_infeasible() {
  throw Error(ErrorCode::kInfeasible,
              "no equivalent model satisfies the feature constraints");
}

}  // namespace

ModelClass::ModelClass(const Dataset& dataset, const BaselineModel& baseline, double delta,
                       const ConstraintSet& constraints, const lp::SolverConfig& solver,
                       const ModelClass* extends)
    : layout_{dataset.num_features(), dataset.num_samples()}, solver_(solver) {
  if (!dataset.standardized) {
    throw Error(ErrorCode::kInvalidArgument, "relevance bounds expect a standardized dataset");
  }
  if (baseline.weights.size() != dataset.num_features() ||
      baseline.slacks.size() != dataset.num_samples()) {
    throw Error(ErrorCode::kDimension, "baseline model does not match the dataset");
  }
  if (!(delta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be >= 0");
  validate_constraints(constraints, dataset.num_features());

  const double sign_eps = 1e-9 * std::max(1.0, baseline.mu);
  std::vector<int> unsigned_features;
  Eigen::Index extra = 2;
  for (const auto& [l, range] : constraints) {
    const bool known = std::abs(baseline.weights[l]) > sign_eps;
    if (!known && range.min > 0.0) unsigned_features.push_back(l);
    extra += (range.min == range.max || (!known && range.min == 0.0)) ? 1 : 2;
  }
  if (unsigned_features.size() > kMaxSignBranches) {
    throw Error(ErrorCode::kInvalidArgument,
                "too many constrained features with zero baseline weight and a positive minimum");
  }

  auto base = svm_lp::margin_problem(dataset, layout_, extra);
  const Eigen::Index n = layout_.samples;
  const Eigen::Index d = layout_.features;
  base.constraint_matrix.row(n).tail(n).setOnes();
  base.constraint_rhs[n] = baseline.rho;
  base.constraint_matrix.row(n + 1).head(2 * d).setOnes();
  base.constraint_rhs[n + 1] = (1.0 + delta) * baseline.mu;

  // Variable k of the extended model class is variable hint_map[k] here.
  std::vector<Eigen::Index> hint_map;
  if (extends != nullptr && extends->layout_.samples == n && extends->layout_.features <= d) {
    const auto& old = extends->layout_;
    hint_map.resize(static_cast<std::size_t>(old.num_variables()));
    for (Eigen::Index j = 0; j < old.features; ++j) {
      hint_map[old.positive(j)] = layout_.positive(j);
      hint_map[old.negative(j)] = layout_.negative(j);
    }
    hint_map[old.bias()] = layout_.bias();
    for (Eigen::Index i = 0; i < n; ++i) hint_map[old.slack(i)] = layout_.slack(i);
  }

  const std::size_t count = std::size_t{1} << unsigned_features.size();
  for (std::size_t mask = 0; mask < count; ++mask) {
    auto problem = base;
    Eigen::Index row = n + 2;
    for (const auto& [l, range] : constraints) {
      double sign = 0.0;
      if (std::abs(baseline.weights[l]) > sign_eps) {
        sign = baseline.weights[l] > 0.0 ? 1.0 : -1.0;
      } else if (range.min > 0.0) {
        const auto bit = std::find(unsigned_features.begin(), unsigned_features.end(), l) -
                         unsigned_features.begin();
        sign = (mask >> bit) & 1U ? -1.0 : 1.0;
      }
      auto set_row = [&](double scale_pos, double scale_neg, lp::Sense sense, double rhs) {
        problem.constraint_matrix(row, layout_.positive(l)) = scale_pos;
        problem.constraint_matrix(row, layout_.negative(l)) = scale_neg;
        problem.constraint_sense[static_cast<std::size_t>(row)] = sense;
        problem.constraint_rhs[row] = rhs;
        ++row;
      };
      if (sign == 0.0) {
        // |w_l| <= K_max through the split, no sign needed.
        set_row(1.0, 1.0, lp::Sense::kLessEqual, range.max);
      } else if (range.min == range.max) {
        set_row(sign, -sign, lp::Sense::kEqual, range.min);
      } else {
        set_row(sign, -sign, lp::Sense::kGreaterEqual, range.min);
        set_row(sign, -sign, lp::Sense::kLessEqual, range.max);
      }
    }
    const lp::PreparedProblem* hint = nullptr;
    if (!hint_map.empty() && extends->branches_.size() == count) {
      hint = extends->branches_[mask].get();
    }
    try {
      branches_.push_back(solver_.prepare(problem, hint, hint_map));
      const auto probe = solver_.solve(*branches_.back(), Eigen::VectorXd::Zero(layout_.num_variables()));
      branch_feasible_.push_back(probe.status == lp::Status::kOptimal);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kBudgetExceeded) throw;
      throw Error(ErrorCode::kOptimizationFailure,
                  std::string("model class LP could not be prepared: ") + e.what());
    }
  }
}

bool ModelClass::feasible() const {
  return std::find(branch_feasible_.begin(), branch_feasible_.end(), true) !=
         branch_feasible_.end();
}

std::optional<BoundResult> ModelClass::min_abs(Eigen::Index j) const {
  return optimize(j, 1.0, 1.0, true);
}

std::optional<BoundResult> ModelClass::max_signed(Eigen::Index j, double sign) const {
  return optimize(j, -sign, sign, false);
}

// Minimizes c+ w+_j + c- w-_j on every feasible branch; the reported value
// is the bound on |w_j| (negated objective when maximizing).
std::optional<BoundResult> ModelClass::optimize(Eigen::Index j, double positive_cost,
                                                double negative_cost, bool minimize) const {
  if (j < 0 || j >= layout_.features) {
    throw Error(ErrorCode::kInvalidArgument, "feature index " + std::to_string(j) + " out of range");
  }
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(layout_.num_variables());
  objective[layout_.positive(j)] = positive_cost;
  objective[layout_.negative(j)] = negative_cost;

  std::optional<BoundResult> best;
  for (std::size_t b = 0; b < branches_.size(); ++b) {
    if (!branch_feasible_[b]) continue;
    lp::LpSolution solution;
    try {
      solution = solver_.solve(*branches_[b], objective);
    } catch (const Error& e) {
      solve_failed(j, e);
    }
    if (solution.status == lp::Status::kInfeasible) continue;
    if (solution.status == lp::Status::kUnbounded) {
      throw Error(ErrorCode::kOptimizationFailure,
                  "bound LP for feature " + std::to_string(j) + " is unbounded");
    }
    const double value = std::max(0.0, minimize ? solution.objective_value
                                                : -solution.objective_value);
    const bool better = !best || (minimize ? value < best->value : value > best->value);
    if (better) {
      BoundResult result;
      result.value = value;
      result.witness_weights = layout_.weights(solution.variable_values);
      result.witness_bias = solution.variable_values[layout_.bias()];
      result.witness_slacks = solution.variable_values.tail(layout_.samples);
      best = std::move(result);
    }
  }
  return best;
}

BoundResult min_rel(const Dataset& dataset, const BaselineModel& baseline, Eigen::Index j,
                    double delta, const ConstraintSet& constraints,
                    const lp::SolverConfig& solver) {
  check_index(dataset, j, constraints);
  const ModelClass model(dataset, baseline, delta, constraints, solver);
  auto result = model.min_abs(j);
  if (!result) throw_infeasible();
  return std::move(*result);
}

BoundResult max_rel(const Dataset& dataset, const BaselineModel& baseline, Eigen::Index j,
                    double delta, const ConstraintSet& constraints,
                    const lp::SolverConfig& solver) {
  check_index(dataset, j, constraints);
  const ModelClass model(dataset, baseline, delta, constraints, solver);
  auto positive = model.max_signed(j, 1.0);
  auto negative = model.max_signed(j, -1.0);
  if (!positive && !negative) throw_infeasible();
  if (!positive) return std::move(*negative);
  if (!negative) return std::move(*positive);
  return negative->value > positive->value ? std::move(*negative) : std::move(*positive);
}

void check_feasible(const Dataset& dataset, const BaselineModel& baseline, double delta,
                    const ConstraintSet& constraints, const lp::SolverConfig& solver) {
  const ModelClass model(dataset, baseline, delta, constraints, solver);
  if (!model.feasible()) throw_infeasible();
}

RelevanceIntervals compute_all(const Dataset& dataset, const BaselineModel& baseline,
                               double delta, const ConstraintSet& constraints, int workers,
                               const lp::SolverConfig& solver) {
  const ModelClass model(dataset, baseline, delta, constraints, solver);
  if (!model.feasible()) throw_infeasible();
  const Eigen::Index d = dataset.num_features();

  RelevanceIntervals out;
  out.lower = Eigen::VectorXd::Zero(d);
  out.upper = Eigen::VectorXd::Zero(d);
  out.delta = delta;
  out.normalization = baseline.mu;
  out.constrained.assign(static_cast<std::size_t>(d), false);
  out.errors.assign(static_cast<std::size_t>(d), std::string());

  std::vector<Eigen::Index> free_features;
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto it = constraints.find(static_cast<int>(j));
    if (it == constraints.end()) {
      free_features.push_back(j);
    } else {
      out.lower[j] = it->second.min;
      out.upper[j] = it->second.max;
      out.constrained[static_cast<std::size_t>(j)] = true;
    }
  }

  // Per feature: min |w_j|, max w_j, max -w_j.
  const std::size_t tasks = free_features.size() * 3;
  std::vector<std::optional<double>> values(tasks);
  std::vector<std::string> task_errors(tasks);
  parallel_for(tasks, workers, [&](std::size_t t) {
    const Eigen::Index j = free_features[t / 3];
    try {
      std::optional<BoundResult> result;
      switch (t % 3) {
        case 0: result = model.min_abs(j); break;
        case 1: result = model.max_signed(j, 1.0); break;
        default: result = model.max_signed(j, -1.0); break;
      }
      if (result) values[t] = result->value;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kBudgetExceeded) throw;
      task_errors[t] = e.what();
    }
  });

  for (std::size_t f = 0; f < free_features.size(); ++f) {
    const Eigen::Index j = free_features[f];
    std::string& error = out.errors[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < 3; ++k) {
      if (error.empty() && !task_errors[3 * f + k].empty()) error = task_errors[3 * f + k];
    }
    const auto& lo = values[3 * f];
    const auto& hi_pos = values[3 * f + 1];
    const auto& hi_neg = values[3 * f + 2];
    if (error.empty() && (!lo || (!hi_pos && !hi_neg))) error = "Infeasible";
    if (!error.empty()) {
      out.lower[j] = std::numeric_limits<double>::quiet_NaN();
      out.upper[j] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    out.lower[j] = *lo;
    out.upper[j] = std::max(hi_pos.value_or(0.0), hi_neg.value_or(0.0));
  }
  return out;
}

}  // namespace relint
