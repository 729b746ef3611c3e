#pragma once

// Variable layout shared by the baseline SVM and the relevance-bound LPs:
//   [w+_0 .. w+_{d-1}, w-_0 .. w-_{d-1}, b, xi_0 .. xi_{n-1}]
// with w = w+ - w-, b free and everything else >= 0.

#include "data.hpp"
#include "lp.hpp"

namespace relint::svm_lp {

struct Layout {
  Eigen::Index features = 0;
  Eigen::Index samples = 0;

  Eigen::Index positive(Eigen::Index j) const { return j; }
  Eigen::Index negative(Eigen::Index j) const { return features + j; }
  Eigen::Index bias() const { return 2 * features; }
  Eigen::Index slack(Eigen::Index i) const { return 2 * features + 1 + i; }
  Eigen::Index num_variables() const { return 2 * features + 1 + samples; }

  Eigen::VectorXd weights(const Eigen::VectorXd& x) const {
    return x.head(features) - x.segment(features, features);
  }
};

// Margin rows y_i (w^T x_i - b) + xi_i >= 1 for every sample, followed by
// `extra_rows` zero rows (sense <=, rhs 0) for the caller to fill in.
inline lp::LpProblem margin_problem(const Dataset& ds, const Layout& layout,
                                    Eigen::Index extra_rows) {
  const Eigen::Index n = layout.samples;
  const Eigen::Index d = layout.features;
  auto problem = lp::LpProblem::with_variables(layout.num_variables());
  problem.variable_lower_bounds[layout.bias()] = -lp::kInfinity;
  problem.constraint_matrix = Eigen::MatrixXd::Zero(n + extra_rows, layout.num_variables());
  problem.constraint_rhs = Eigen::VectorXd::Zero(n + extra_rows);
  problem.constraint_sense.assign(static_cast<std::size_t>(n + extra_rows), lp::Sense::kLessEqual);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = ds.labels[i];
    auto row = problem.constraint_matrix.row(i);
    row.segment(0, d) = y * ds.samples.row(i);
    row.segment(d, d) = -y * ds.samples.row(i);
    row[layout.bias()] = -y;
    row[layout.slack(i)] = 1.0;
    problem.constraint_rhs[i] = 1.0;
    problem.constraint_sense[static_cast<std::size_t>(i)] = lp::Sense::kGreaterEqual;
  }
  return problem;
}

}  // namespace relint::svm_lp
