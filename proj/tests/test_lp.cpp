#include <random>

#include "doctest.h"
#include "error.hpp"
#include "lp.hpp"

using relint::Error;
using relint::ErrorCode;
using namespace relint::lp;

namespace {

struct KnownOptimum {
  LpProblem problem;
  Eigen::VectorXd dual;  // feasible dual point in the solver's sign convention
  double optimum = 0.0;
};

// Builds min c^T x, A x >= b (some rows negated into <=), x >= 0 from a
// chosen primal x*, dual y* >= 0 and reduced costs r >= 0 that satisfy
// complementary slackness; c^T x* = b^T y* is then the optimum.
KnownOptimum construct_from_primal_dual_pair(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (unit(rng) < 0.5) {
      x[j] = 0.5 + 2.0 * unit(rng);
    } else {
      r[j] = 0.1 + unit(rng);
    }
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd b = a * x;
  for (int i = 0; i < m; ++i) {
    if (unit(rng) < 0.6) {
      y[i] = 0.1 + unit(rng);
    } else {
      b[i] -= 0.2 + unit(rng);  // inactive row
    }
  }
  KnownOptimum out;
  out.problem = LpProblem::with_variables(n);
  out.problem.objective = a.transpose() * y + r;
  out.dual = y;
  for (int i = 0; i < m; ++i) {
    if (unit(rng) < 0.3) {
      out.problem.add_row(-a.row(i), Sense::kLessEqual, -b[i]);
      out.dual[i] = -y[i];
    } else {
      out.problem.add_row(a.row(i), Sense::kGreaterEqual, b[i]);
    }
  }
  out.optimum = b.dot(y);
  return out;
}

}  // namespace

TEST_CASE("single active lower bound row") {
  auto problem = LpProblem::with_variables(1);
  problem.objective << 1.0;
  problem.variable_lower_bounds << -kInfinity;
  problem.add_row(Eigen::RowVectorXd::Ones(1), Sense::kGreaterEqual, 3.0);
  const auto sol = solve(problem);
  REQUIRE(sol.status == Status::kOptimal);
  CHECK(sol.objective_value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sol.variable_values[0] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("contradictory rows are infeasible") {
  auto problem = LpProblem::with_variables(1);
  problem.variable_lower_bounds << -kInfinity;
  problem.add_row(Eigen::RowVectorXd::Ones(1), Sense::kLessEqual, 1.0);
  problem.add_row(Eigen::RowVectorXd::Ones(1), Sense::kGreaterEqual, 2.0);
  CHECK(solve(problem).status == Status::kInfeasible);
}

TEST_CASE("unbounded direction is reported") {
  auto problem = LpProblem::with_variables(2);
  problem.objective << -1.0, 0.0;
  Eigen::RowVectorXd row(2);
  row << 1.0, -1.0;
  problem.add_row(row, Sense::kLessEqual, 1.0);
  CHECK(solve(problem).status == Status::kUnbounded);
}

TEST_CASE("free, mirrored and boxed variables with equality rows") {
  // min x0 - x1 + 2 x2, x0 free, x1 <= 4 (no lower), 1 <= x2 <= 3
  // x0 + x1 = 2, x0 - x2 >= -10, x2 + x1 >= 1
  auto problem = LpProblem::with_variables(3);
  problem.objective << 1.0, -1.0, 2.0;
  problem.variable_lower_bounds << -kInfinity, -kInfinity, 1.0;
  problem.variable_upper_bounds << kInfinity, 4.0, 3.0;
  Eigen::RowVectorXd r1(3), r2(3), r3(3);
  r1 << 1, 1, 0;
  r2 << 1, 0, -1;
  r3 << 0, 1, 1;
  problem.add_row(r1, Sense::kEqual, 2.0);
  problem.add_row(r2, Sense::kGreaterEqual, -10.0);
  problem.add_row(r3, Sense::kGreaterEqual, 1.0);
  const auto sol = solve(problem);
  REQUIRE(sol.status == Status::kOptimal);
  // x1 = 4, x0 = -2, x2 = 1 -> -2 - 4 + 2 = -4
  CHECK(sol.objective_value == doctest::Approx(-4.0));
  CHECK(sol.variable_values[0] == doctest::Approx(-2.0));
  CHECK(sol.variable_values[1] == doctest::Approx(4.0));
  CHECK(sol.variable_values[2] == doctest::Approx(1.0));
}

TEST_CASE("malformed problems are rejected") {
  auto problem = LpProblem::with_variables(2);
  problem.add_row(Eigen::RowVectorXd::Ones(2), Sense::kLessEqual, 1.0);
  SUBCASE("rhs length mismatch") {
    problem.constraint_rhs.resize(2);
  }
  SUBCASE("objective length mismatch") {
    problem.objective.resize(3);
  }
  SUBCASE("lower above upper") {
    problem.variable_lower_bounds[0] = 2.0;
    problem.variable_upper_bounds[0] = 1.0;
  }
  try {
    solve(problem);
    FAIL("expected MalformedProblem");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedProblem);
  }
}

TEST_CASE("iteration cap yields NumericalFailure, not Infeasible") {
  std::mt19937_64 rng(3);
  auto known = construct_from_primal_dual_pair(rng, 20, 12);
  SolverOptions options;
  options.max_iterations = 1;
  try {
    default_solver().solve(known.problem, options);
    FAIL("expected NumericalFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumericalFailure);
  }
}

TEST_CASE("constructed primal/dual pairs: optimum, weak duality, slackness") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 40; ++trial) {
    auto known = construct_from_primal_dual_pair(rng, 20, 12);
    const auto sol = solve(known.problem);
    REQUIRE(sol.status == Status::kOptimal);
    CHECK(std::abs(sol.objective_value - known.optimum) < 1e-6);
    CHECK(max_violation(known.problem, sol.variable_values) < 1e-8);

    // Weak duality against the constructed feasible dual point.
    CHECK(sol.objective_value >= known.problem.constraint_rhs.dot(known.dual) - 1e-8);

    // The solver's own certificate: dual feasible, complementary slack.
    const auto& p = known.problem;
    const Eigen::VectorXd reduced =
        p.objective - p.constraint_matrix.transpose() * sol.row_duals;
    CHECK(reduced.minCoeff() > -1e-7);
    const Eigen::VectorXd activity = p.constraint_matrix * sol.variable_values;
    for (Eigen::Index i = 0; i < activity.size(); ++i) {
      const bool ge = p.constraint_sense[i] == Sense::kGreaterEqual;
      CHECK((ge ? sol.row_duals[i] : -sol.row_duals[i]) > -1e-9);
      CHECK(std::abs(sol.row_duals[i] * (activity[i] - p.constraint_rhs[i])) < 1e-7);
    }
    CHECK(std::abs(reduced.dot(sol.variable_values)) < 1e-7);
  }
}

TEST_CASE("identical input gives identical output") {
  std::mt19937_64 rng(99);
  auto known = construct_from_primal_dual_pair(rng, 20, 15);
  const auto first = solve(known.problem);
  const auto second = solve(known.problem);
  CHECK(first.status == second.status);
  CHECK(first.objective_value == second.objective_value);
  CHECK(first.variable_values == second.variable_values);
}

TEST_CASE("scaling the objective scales the optimum and keeps the argmin") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto known = construct_from_primal_dual_pair(rng, 20, 12);
    const auto base = solve(known.problem);
    for (double lambda : {0.5, 4.0}) {
      auto scaled = known.problem;
      scaled.objective *= lambda;
      const auto sol = solve(scaled);
      REQUIRE(sol.status == Status::kOptimal);
      CHECK(sol.objective_value == doctest::Approx(lambda * base.objective_value).epsilon(1e-12));
      CHECK(sol.variable_values == base.variable_values);
    }
  }
}

TEST_CASE("degenerate problem with many ties terminates") {
  // Klee-Minty-like degenerate corner: many constraints through the origin.
  const int n = 6;
  auto problem = LpProblem::with_variables(n);
  problem.objective = -Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
      row[i] = 1.0;
      row[k] -= 1.0;
      if (i != k) problem.add_row(row, Sense::kLessEqual, 0.0);
    }
  }
  problem.add_row(Eigen::RowVectorXd::Ones(n), Sense::kLessEqual, 6.0);
  const auto sol = solve(problem);
  REQUIRE(sol.status == Status::kOptimal);
  CHECK(sol.objective_value == doctest::Approx(-6.0));
}

TEST_CASE("expired deadline aborts with BudgetExceeded") {
  std::mt19937_64 rng(11);
  auto known = construct_from_primal_dual_pair(rng, 120, 100);
  SolverOptions options;
  options.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  try {
    const auto sol = default_solver().solve(known.problem, options);
    // Small problems may finish before the first deadline probe.
    CHECK(sol.iterations < 64);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBudgetExceeded);
  }
}

TEST_CASE("prepared and hinted solves reach the cold optimum") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const DenseSimplexSolver solver;
  const SolverOptions opt;
  for (int r = 0; r < 15; ++r) {
    auto k = construct_from_primal_dual_pair(rng, 6 + r % 5, 4 + r % 4);
    const auto prepared = solver.prepare(k.problem, opt);
    const auto first = solver.solve(*prepared, k.problem.objective, opt);
    REQUIRE(first.status == Status::kOptimal);
    CHECK(first.objective_value == doctest::Approx(k.optimum).epsilon(1e-9));
    std::vector<Eigen::Index> identity(static_cast<std::size_t>(k.problem.num_variables()));
    for (std::size_t j = 0; j < identity.size(); ++j) identity[j] = static_cast<Eigen::Index>(j);
    const auto hinted = solver.prepare(k.problem, opt, prepared.get(), identity);
    for (int t = 0; t < 5; ++t) {
      LpProblem cold = k.problem;
      for (Eigen::Index j = 0; j < cold.num_variables(); ++j) cold.objective[j] = unit(rng);
      const auto expect = solver.solve(cold, opt);
      const auto warm = solver.solve(*prepared, cold.objective, opt);
      const auto hint = solver.solve(*hinted, cold.objective, opt);
      REQUIRE(expect.status == Status::kOptimal);
      REQUIRE(warm.status == Status::kOptimal);
      REQUIRE(hint.status == Status::kOptimal);
      CHECK(warm.objective_value == doctest::Approx(expect.objective_value).epsilon(1e-9));
      CHECK(hint.objective_value == doctest::Approx(expect.objective_value).epsilon(1e-9));
    }
  }
}
