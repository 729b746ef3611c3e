#include "baseline.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"
#include "svm_lp.hpp"

namespace relint {

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(std::pow(10.0, -3.0 + 6.0 * i / 9.0));
  return grid;
}

BaselineModel fit_l1_svm(const Dataset& dataset, double C,
                         const lp::SolverConfig& solver) {
  if (!dataset.standardized) {
    throw Error(ErrorCode::kInvalidArgument, "fit_l1_svm expects a standardized dataset");
  }
  if (!(C > 0.0)) throw Error(ErrorCode::kInvalidArgument, "C must be positive");
  dataset.validate();

  const svm_lp::Layout layout{dataset.num_features(), dataset.num_samples()};
  auto problem = svm_lp::margin_problem(dataset, layout, 0);
  problem.objective.head(2 * layout.features).setOnes();
  problem.objective.tail(layout.samples).setConstant(C);

  lp::LpSolution solution;
  try {
    solution = solver.solve(problem);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBudgetExceeded) throw;
    throw Error(ErrorCode::kOptimizationFailure,
                std::string("baseline SVM did not solve: ") + e.what());
  }
  if (solution.status != lp::Status::kOptimal) {
    throw Error(ErrorCode::kOptimizationFailure,
                std::string("baseline SVM LP is ") + std::string(lp::to_string(solution.status)));
  }

  BaselineModel model;
  model.C = C;
  model.weights = layout.weights(solution.variable_values);
  model.bias = solution.variable_values[layout.bias()];
  const Eigen::VectorXd margins =
      dataset.labels.cwiseProduct(dataset.samples * model.weights -
                                  Eigen::VectorXd::Constant(layout.samples, model.bias));
  model.slacks = (1.0 - margins.array()).max(0.0).matrix();
  model.mu = model.weights.lpNorm<1>();
  model.rho = model.slacks.sum();
  return model;
}

Eigen::VectorXd predict(const BaselineModel& model, const Eigen::MatrixXd& samples) {
  if (samples.cols() != model.weights.size()) {
    throw Error(ErrorCode::kDimension, "sample width " + std::to_string(samples.cols()) +
                                           " does not match model width " +
                                           std::to_string(model.weights.size()));
  }
  const Eigen::VectorXd decision =
      samples * model.weights - Eigen::VectorXd::Constant(samples.rows(), model.bias);
  return decision.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
}

double weighted_f1(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted) {
  if (truth.size() != predicted.size() || truth.size() == 0) {
    throw Error(ErrorCode::kDimension, "weighted_f1 needs equal, non-empty vectors");
  }
  const auto n = static_cast<double>(truth.size());
  double score = 0.0;
  for (double cls : {-1.0, 1.0}) {
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
      const bool is = truth[i] == cls;
      const bool said = predicted[i] == cls;
      tp += is && said;
      fp += !is && said;
      fn += is && !said;
    }
    const double support = tp + fn;
    if (support == 0.0) continue;
    const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    const double recall = tp / support;
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    score += support / n * f1;
  }
  return score;
}

double accuracy(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted) {
  if (truth.size() != predicted.size() || truth.size() == 0) {
    throw Error(ErrorCode::kDimension, "accuracy needs equal, non-empty vectors");
  }
  return (truth.array() == predicted.array()).cast<double>().mean();
}

CvReport select_c(const Dataset& dataset, std::span<const double> grid, int k,
                  std::uint64_t seed, int workers, const lp::SolverConfig& solver) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "C grid is empty");
  for (double c : grid) {
    if (!(c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "C grid values must be positive");
  }
  const auto folds = stratified_kfold(dataset.labels, k, seed);
  const std::size_t tasks = grid.size() * folds.size();
  std::vector<double> scores(tasks, 0.0);
  parallel_for(tasks, workers, [&](std::size_t t) {
    const auto& fold = folds[t % folds.size()];
    const double c = grid[t / folds.size()];
    const auto train = dataset.select_rows(fold.train);
    const auto test = dataset.select_rows(fold.test);
    const auto model = fit_l1_svm(train, c, solver);
    scores[t] = weighted_f1(test.labels, predict(model, test.samples));
  });

  CvReport report;
  report.grid.assign(grid.begin(), grid.end());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) sum += scores[g * folds.size() + f];
    report.mean_scores.push_back(sum / static_cast<double>(folds.size()));
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double s = report.mean_scores[g];
    const double b = report.mean_scores[best];
    if (s > b || (s == b && grid[g] < grid[best])) best = g;
  }
  report.chosen_c = grid[best];
  return report;
}

BaselineModel fit_baseline(const Dataset& dataset, std::span<const double> grid,
                           int k, std::uint64_t seed, int workers,
                           const lp::SolverConfig& solver, CvReport* report) {
  auto cv = select_c(dataset, grid, k, seed, workers, solver);
  auto model = fit_l1_svm(dataset, cv.chosen_c, solver);
  const auto best = std::find(cv.grid.begin(), cv.grid.end(), cv.chosen_c) - cv.grid.begin();
  model.cv_score = cv.mean_scores[static_cast<std::size_t>(best)];
  if (report != nullptr) *report = std::move(cv);
  return model;
}

}  // namespace relint
