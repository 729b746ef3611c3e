#pragma once

// Linear programs in the form
//
//   minimize    c^T x
//   subject to  A_i x {<=, =, >=} b_i   for every row i
//               lower <= x <= upper     (bounds may be infinite)
//
// and a bundled dense revised-simplex solver.

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace relint::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

enum class Status { kOptimal, kInfeasible, kUnbounded };

std::string_view to_string(Status status);

struct LpProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraint_matrix;
  Eigen::VectorXd constraint_rhs;
  std::vector<Sense> constraint_sense;
  Eigen::VectorXd variable_lower_bounds;
  Eigen::VectorXd variable_upper_bounds;

  // Empty problem with `num_variables` columns, zero objective and x >= 0.
  static LpProblem with_variables(Eigen::Index num_variables);

  Eigen::Index num_rows() const { return constraint_matrix.rows(); }
  Eigen::Index num_variables() const { return objective.size(); }

  // Appends a row and returns its index.
  Eigen::Index add_row(const Eigen::Ref<const Eigen::RowVectorXd>& coefficients,
                       Sense sense, double rhs);

  // Throws Error(kMalformedProblem) on any dimension or bound inconsistency.
  void validate() const;
};

struct LpSolution {
  Status status = Status::kInfeasible;
  // Defined iff status == kOptimal.
  double objective_value = 0.0;
  Eigen::VectorXd variable_values;
  // Lagrange multipliers of the original rows (>= rows: >= 0, <= rows: <= 0
  // for a minimization). Defined iff status == kOptimal.
  Eigen::VectorXd row_duals;
  std::size_t iterations = 0;
};

struct SolverOptions {
  double tolerance = 1e-8;
  // 0 selects 50 * (rows + cols) of the internal standard form.
  std::size_t max_iterations = 0;
  // Solves abort with Error(kBudgetExceeded) once this point is passed.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Constraint system readied for several objectives. The base class only
// keeps the problem; solvers derive from it to cache a feasible start.
class PreparedProblem {
 public:
  explicit PreparedProblem(LpProblem problem) : problem_(std::move(problem)) {}
  virtual ~PreparedProblem() = default;
  const LpProblem& problem() const { return problem_; }

 private:
  LpProblem problem_;
};

// Pluggable solver interface. Implementations must be safe to call from
// several threads at once on distinct problems, and on one prepared problem.
class LpSolver {
 public:
  virtual ~LpSolver() = default;
  virtual std::string_view name() const = 0;
  // Throws Error(kMalformedProblem) for ill-formed input and
  // Error(kNumericalFailure) when no verdict is reached within the iteration
  // cap.
  virtual LpSolution solve(const LpProblem& problem,
                           const SolverOptions& options) const = 0;

  // `hint` may be a prepared problem with the same rows whose variable k is
  // variable hint_variables[k] here; solvers may start from its basis.
  virtual std::shared_ptr<const PreparedProblem> prepare(
      const LpProblem& problem, const SolverOptions& options,
      const PreparedProblem* hint = nullptr,
      std::span<const Eigen::Index> hint_variables = {}) const;
  // Solves the prepared constraints under `objective`.
  virtual LpSolution solve(const PreparedProblem& prepared,
                           const Eigen::VectorXd& objective,
                           const SolverOptions& options) const;
};

// Dense revised simplex. Dantzig pricing with lowest-index tie-breaking and a
// switch to Bland's rule after a run of degenerate pivots. Two phases, with
// a triangular crash basis so that rows coverable by slack or singleton
// columns need no artificial variable.
class DenseSimplexSolver final : public LpSolver {
 public:
  std::string_view name() const override { return "dense-simplex"; }
  LpSolution solve(const LpProblem& problem,
                   const SolverOptions& options) const override;
  // Runs phase one once; later solves only need phase two.
  std::shared_ptr<const PreparedProblem> prepare(
      const LpProblem& problem, const SolverOptions& options,
      const PreparedProblem* hint = nullptr,
      std::span<const Eigen::Index> hint_variables = {}) const override;
  LpSolution solve(const PreparedProblem& prepared, const Eigen::VectorXd& objective,
                   const SolverOptions& options) const override;
};

const LpSolver& default_solver();

LpSolution solve(const LpProblem& problem, double tolerance = 1e-8);

// Solver plus options, passed down to every module that lowers to an LP.
struct SolverConfig {
  const LpSolver* solver = &default_solver();
  SolverOptions options;

  LpSolution solve(const LpProblem& problem) const {
    return solver->solve(problem, options);
  }
  std::shared_ptr<const PreparedProblem> prepare(
      const LpProblem& problem, const PreparedProblem* hint = nullptr,
      std::span<const Eigen::Index> hint_variables = {}) const {
    return solver->prepare(problem, options, hint, hint_variables);
  }
  LpSolution solve(const PreparedProblem& prepared, const Eigen::VectorXd& objective) const {
    return solver->solve(prepared, objective, options);
  }
};

// Largest violation of any row or bound by `x`, scaled by 1 + |rhs|.
double max_violation(const LpProblem& problem, const Eigen::VectorXd& x);

}  // namespace relint::lp
