#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "data.hpp"
#include "lp.hpp"

namespace relint {

// L1-regularized soft-margin SVM optimum and the model-class budget it
// defines: mu = ||w||_1 and rho = sum of slacks.
struct BaselineModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  Eigen::VectorXd slacks;
  double C = 1.0;
  double mu = 0.0;
  double rho = 0.0;
  double cv_score = 0.0;
};

struct CvReport {
  std::vector<double> grid;
  std::vector<double> mean_scores;
  double chosen_c = 0.0;
};

// 10 log-spaced values in [1e-3, 1e3].
std::vector<double> default_c_grid();

// min ||w||_1 + C sum xi  s.t.  y_i (w^T x_i - b) >= 1 - xi_i, xi >= 0.
// Slacks and rho are the exact hinge losses of the returned (w, b).
BaselineModel fit_l1_svm(const Dataset& dataset, double C,
                         const lp::SolverConfig& solver = {});

// Mean support-weighted F1 over k stratified folds per grid value; the best
// mean wins, ties go to the smallest C.
CvReport select_c(const Dataset& dataset, std::span<const double> grid, int k,
                  std::uint64_t seed, int workers = 1,
                  const lp::SolverConfig& solver = {});

// select_c followed by a refit on the full dataset; cv_score is the winning
// mean score.
BaselineModel fit_baseline(const Dataset& dataset, std::span<const double> grid,
                           int k, std::uint64_t seed, int workers = 1,
                           const lp::SolverConfig& solver = {},
                           CvReport* report = nullptr);

// sign(w^T x - b) per row, with 0 mapped to +1.
Eigen::VectorXd predict(const BaselineModel& model, const Eigen::MatrixXd& samples);

// Per-class F1 averaged with weights equal to the class support fractions.
double weighted_f1(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted);

double accuracy(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted);

}  // namespace relint
