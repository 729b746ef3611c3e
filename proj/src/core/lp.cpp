#include "lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace relint::lp {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kOptimal: return "Optimal";
    case Status::kInfeasible: return "Infeasible";
    case Status::kUnbounded: return "Unbounded";
  }
  return "Unknown";
}

LpProblem LpProblem::with_variables(Eigen::Index num_variables) {
  LpProblem problem;
  problem.objective = Eigen::VectorXd::Zero(num_variables);
  problem.constraint_matrix.resize(0, num_variables);
  problem.constraint_rhs.resize(0);
  problem.variable_lower_bounds = Eigen::VectorXd::Zero(num_variables);
  problem.variable_upper_bounds =
      Eigen::VectorXd::Constant(num_variables, kInfinity);
  return problem;
}

Eigen::Index LpProblem::add_row(
    const Eigen::Ref<const Eigen::RowVectorXd>& coefficients, Sense sense,
    double rhs) {
  if (coefficients.size() != num_variables()) {
    throw Error(ErrorCode::kMalformedProblem,
                "row has " + std::to_string(coefficients.size()) +
                    " coefficients, problem has " +
                    std::to_string(num_variables()) + " variables");
  }
  const Eigen::Index row = constraint_matrix.rows();
  constraint_matrix.conservativeResize(row + 1, Eigen::NoChange);
  constraint_matrix.row(row) = coefficients;
  constraint_rhs.conservativeResize(row + 1);
  constraint_rhs[row] = rhs;
  constraint_sense.push_back(sense);
  return row;
}

void LpProblem::validate() const {
  const Eigen::Index n = objective.size();
  const Eigen::Index m = constraint_matrix.rows();
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kMalformedProblem, what);
  };
  if (constraint_matrix.cols() != n) {
    fail("constraint matrix has " + std::to_string(constraint_matrix.cols()) +
         " columns, objective has " + std::to_string(n));
  }
  if (constraint_rhs.size() != m ||
      static_cast<Eigen::Index>(constraint_sense.size()) != m) {
    fail("row count mismatch between matrix, rhs and sense");
  }
  if (variable_lower_bounds.size() != n || variable_upper_bounds.size() != n) {
    fail("bound vectors do not match the number of variables");
  }
  if (!objective.allFinite() || !constraint_matrix.allFinite() ||
      !constraint_rhs.allFinite()) {
    fail("objective, matrix and rhs must be finite");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = variable_lower_bounds[j];
    const double hi = variable_upper_bounds[j];
    if (std::isnan(lo) || std::isnan(hi) || lo > hi || lo == kInfinity ||
        hi == -kInfinity) {
      fail("invalid bounds for variable " + std::to_string(j));
    }
  }
}

double max_violation(const LpProblem& problem, const Eigen::VectorXd& x) {
  double worst = 0.0;
  const Eigen::VectorXd activity = problem.constraint_matrix * x;
  for (Eigen::Index i = 0; i < activity.size(); ++i) {
    const double rhs = problem.constraint_rhs[i];
    double v = 0.0;
    switch (problem.constraint_sense[i]) {
      case Sense::kLessEqual: v = activity[i] - rhs; break;
      case Sense::kGreaterEqual: v = rhs - activity[i]; break;
      case Sense::kEqual: v = std::abs(activity[i] - rhs); break;
    }
    worst = std::max(worst, v / (1.0 + std::abs(rhs)));
  }
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double lo = problem.variable_lower_bounds[j];
    const double hi = problem.variable_upper_bounds[j];
    if (std::isfinite(lo)) worst = std::max(worst, (lo - x[j]) / (1.0 + std::abs(lo)));
    if (std::isfinite(hi)) worst = std::max(worst, (x[j] - hi) / (1.0 + std::abs(hi)));
  }
  return worst;
}

namespace {

enum class ColumnKind { kStructural, kSlack, kArtificial };

// x = offset + x'  (kShifted), x = offset - x' (kMirrored),
// x = x+ - x- (kSplit, offset unused).
struct VariableMap {
  enum class Kind { kShifted, kMirrored, kSplit };
  Kind kind = Kind::kShifted;
  double offset = 0.0;
  int column = -1;
  int negative_column = -1;
};

// Internal problem: min cost^T z, M z = rhs, z >= 0, rhs >= 0, stored by
// column.
struct StandardForm {
  int rows = 0;
  int original_rows = 0;
  std::vector<int> col_start{0};
  std::vector<int> row_index;
  std::vector<double> value;
  std::vector<double> cost;
  std::vector<ColumnKind> kind;
  Eigen::VectorXd rhs;
  std::vector<double> row_sign;
  std::vector<Sense> sense;
  std::vector<VariableMap> variables;

  int num_columns() const { return static_cast<int>(cost.size()); }

  int add_column(ColumnKind k, double c) {
    cost.push_back(c);
    kind.push_back(k);
    col_start.push_back(col_start.back());
    return num_columns() - 1;
  }
  void push_entry(int row, double v) {
    row_index.push_back(row);
    value.push_back(v);
    ++col_start.back();
  }
  int nnz_begin(int col) const { return col_start[col]; }
  int nnz_end(int col) const { return col_start[col + 1]; }
};

StandardForm build_standard_form(const LpProblem& problem) {
  const int m = static_cast<int>(problem.num_rows());
  const int n = static_cast<int>(problem.num_variables());
  const auto& a = problem.constraint_matrix;

  StandardForm sf;
  sf.original_rows = m;
  sf.variables.resize(n);

  // Finite upper bounds on shifted variables become extra <= rows.
  std::vector<int> bound_row_of(n, -1);
  int extra_rows = 0;
  for (int j = 0; j < n; ++j) {
    const double lo = problem.variable_lower_bounds[j];
    const double hi = problem.variable_upper_bounds[j];
    auto& map = sf.variables[j];
    if (std::isfinite(lo)) {
      map.kind = VariableMap::Kind::kShifted;
      map.offset = lo;
      if (std::isfinite(hi)) bound_row_of[j] = m + extra_rows++;
    } else if (std::isfinite(hi)) {
      map.kind = VariableMap::Kind::kMirrored;
      map.offset = hi;
    } else {
      map.kind = VariableMap::Kind::kSplit;
    }
  }
  sf.rows = m + extra_rows;

  Eigen::VectorXd rhs(sf.rows);
  std::vector<Sense> sense(sf.rows, Sense::kLessEqual);
  for (int i = 0; i < m; ++i) {
    rhs[i] = problem.constraint_rhs[i];
    sense[i] = problem.constraint_sense[i];
  }
  for (int j = 0; j < n; ++j) {
    const auto& map = sf.variables[j];
    if (map.kind != VariableMap::Kind::kSplit && map.offset != 0.0) {
      rhs.head(m) -= a.col(j) * map.offset;
    }
    if (bound_row_of[j] >= 0) {
      rhs[bound_row_of[j]] =
          problem.variable_upper_bounds[j] - problem.variable_lower_bounds[j];
    }
  }

  sf.row_sign.assign(sf.rows, 1.0);
  for (int i = 0; i < sf.rows; ++i) {
    if (rhs[i] < 0.0) {
      rhs[i] = -rhs[i];
      sf.row_sign[i] = -1.0;
      if (sense[i] == Sense::kLessEqual) {
        sense[i] = Sense::kGreaterEqual;
      } else if (sense[i] == Sense::kGreaterEqual) {
        sense[i] = Sense::kLessEqual;
      }
    }
  }
  sf.rhs = rhs;
  sf.sense = sense;

  auto emit_structural = [&](int j, double sign) {
    const int col =
        sf.add_column(ColumnKind::kStructural, sign * problem.objective[j]);
    for (int i = 0; i < m; ++i) {
      const double v = a(i, j);
      if (v != 0.0) sf.push_entry(i, sign * v * sf.row_sign[i]);
    }
    if (bound_row_of[j] >= 0) {
      const int r = bound_row_of[j];
      sf.push_entry(r, sf.row_sign[r]);
    }
    return col;
  };
  for (int j = 0; j < n; ++j) {
    auto& map = sf.variables[j];
    switch (map.kind) {
      case VariableMap::Kind::kShifted: map.column = emit_structural(j, 1.0); break;
      case VariableMap::Kind::kMirrored: map.column = emit_structural(j, -1.0); break;
      case VariableMap::Kind::kSplit:
        map.column = emit_structural(j, 1.0);
        map.negative_column = emit_structural(j, -1.0);
        break;
    }
  }
  for (int i = 0; i < sf.rows; ++i) {
    if (sense[i] == Sense::kEqual) continue;
    sf.add_column(ColumnKind::kSlack, 0.0);
    sf.push_entry(i, sense[i] == Sense::kLessEqual ? 1.0 : -1.0);
  }
  return sf;
}

constexpr double kPivotTolerance = 1e-9;
constexpr int kMaintenanceInterval = 100;
constexpr int kDeadlineCheckInterval = 64;

// A basis together with its explicit inverse and basic values.
struct BasisState {
  StandardForm sf;
  std::vector<int> basis;
  Eigen::MatrixXd binv;
  Eigen::VectorXd xb;
};

class DensePrepared final : public PreparedProblem {
 public:
  using PreparedProblem::PreparedProblem;
  bool feasible = false;
  std::size_t iterations = 0;
  // Primal feasible after phase one, artificials at zero.
  BasisState state;
};

class SimplexRun {
 public:
  SimplexRun(BasisState& state, const SolverOptions& options, std::size_t iterations = 0)
      : sf_(state.sf),
        basis_(state.basis),
        binv_(state.binv),
        xb_(state.xb),
        tol_(options.tolerance),
        deadline_(options.deadline),
        iterations_(iterations) {
    iteration_cap_ = options.max_iterations != 0
                         ? options.max_iterations
                         : 50 * static_cast<std::size_t>(sf_.rows + sf_.num_columns());
  }

  // Crash basis plus phase one. False when the rows are infeasible.
  bool find_feasible();
  // Takes the basis in the state as is. False unless it is a valid
  // factorization of a feasible basis.
  bool adopt_basis();
  // Phase two from a feasible basis under the costs stored in the form.
  LpSolution optimize(const LpProblem& problem, const Eigen::VectorXd& objective);

  std::size_t iterations() const { return iterations_; }

 private:
  enum class PhaseResult { kOptimal, kUnbounded };

  void crash();
  void index_basis();
  void refactor();
  void recompute_primal();
  void recompute_duals();
  double reduced_cost(int col) const;
  void column_image(int col, Eigen::VectorXd& out) const;
  int choose_entering(bool bland, double& best_d) const;
  int choose_leaving(const Eigen::VectorXd& alpha, bool bland) const;
  void pivot(int row, int col, const Eigen::VectorXd& alpha, double theta,
             double reduced);
  PhaseResult iterate();
  bool drive_out_artificials();
  double primal_residual() const;
  void tick();

  StandardForm& sf_;
  std::vector<int>& basis_;
  Eigen::MatrixXd& binv_;
  Eigen::VectorXd& xb_;
  double tol_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::size_t iteration_cap_ = 0;
  std::size_t iterations_ = 0;

  std::vector<double> phase_cost_;
  std::vector<int> position_;
  std::vector<char> eligible_;
  Eigen::VectorXd pi_;
  Eigen::VectorXd alpha_;
};

void SimplexRun::tick() {
  ++iterations_;
  if (iterations_ > iteration_cap_) {
    throw Error(ErrorCode::kNumericalFailure,
                "simplex iteration cap of " + std::to_string(iteration_cap_) +
                    " reached");
  }
  if (deadline_ && iterations_ % kDeadlineCheckInterval == 0 &&
      std::chrono::steady_clock::now() > *deadline_) {
    throw Error(ErrorCode::kBudgetExceeded, "LP solve exceeded its time budget");
  }
}

// Builds a triangular starting basis. Rows are covered, in order of
// preference, by a slack with the right sign, by a structural column whose
// other nonzeros only touch slack-covered <= rows, and finally by an
// artificial column. Slack rows whose value turns negative because of the
// crash columns are handed to an artificial with coefficient -1.
void SimplexRun::crash() {
  const int m = sf_.rows;
  basis_.assign(m, -1);
  std::vector<double> diag(m, 0.0);

  std::vector<int> slack_of(m, -1);
  for (int c = 0; c < sf_.num_columns(); ++c) {
    if (sf_.kind[c] == ColumnKind::kSlack) slack_of[sf_.row_index[sf_.nnz_begin(c)]] = c;
  }
  for (int i = 0; i < m; ++i) {
    if (sf_.sense[i] == Sense::kLessEqual ||
        (sf_.sense[i] == Sense::kGreaterEqual && sf_.rhs[i] == 0.0)) {
      basis_[i] = slack_of[i];
      diag[i] = sf_.value[sf_.nnz_begin(slack_of[i])];
    }
  }

  std::vector<int> crashed_rows;
  for (int c = 0; c < sf_.num_columns(); ++c) {
    if (sf_.kind[c] != ColumnKind::kStructural) continue;
    int target = -1;
    bool ok = true;
    for (int k = sf_.nnz_begin(c); k < sf_.nnz_end(c) && ok; ++k) {
      const int r = sf_.row_index[k];
      if (sf_.sense[r] == Sense::kLessEqual && basis_[r] == slack_of[r]) continue;
      if (target >= 0 || basis_[r] >= 0 || sf_.value[k] <= 0.0) {
        ok = false;
      } else {
        target = r;
      }
    }
    if (!ok || target < 0 || sf_.rhs[target] <= 0.0) continue;
    basis_[target] = c;
    crashed_rows.push_back(target);
  }

  // Basic values: crash columns first, then slacks absorb the remainder.
  xb_ = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd slack_value = sf_.rhs;
  for (int r : crashed_rows) {
    const int c = basis_[r];
    double a_rr = 0.0;
    for (int k = sf_.nnz_begin(c); k < sf_.nnz_end(c); ++k) {
      if (sf_.row_index[k] == r) a_rr = sf_.value[k];
    }
    diag[r] = a_rr;
    xb_[r] = sf_.rhs[r] / a_rr;
    for (int k = sf_.nnz_begin(c); k < sf_.nnz_end(c); ++k) {
      if (sf_.row_index[k] != r) slack_value[sf_.row_index[k]] -= sf_.value[k] * xb_[r];
    }
  }
  for (int i = 0; i < m; ++i) {
    if (basis_[i] >= 0 && sf_.kind[basis_[i]] == ColumnKind::kSlack) {
      const double v = slack_value[i] / diag[i];
      if (v >= 0.0) {
        xb_[i] = v;
        continue;
      }
      // Negative slack: this row needs an artificial.
      const int art = sf_.add_column(ColumnKind::kArtificial, 0.0);
      sf_.push_entry(i, -1.0);
      basis_[i] = art;
      diag[i] = -1.0;
      xb_[i] = -slack_value[i];
    } else if (basis_[i] < 0) {
      const int art = sf_.add_column(ColumnKind::kArtificial, 0.0);
      sf_.push_entry(i, 1.0);
      basis_[i] = art;
      diag[i] = 1.0;
      xb_[i] = sf_.rhs[i];
    }
  }

  // B = D + N with N touching only (slack-row, crash-column) positions, hence
  // B^-1 = D^-1 - D^-1 N D^-1.
  binv_ = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) binv_(i, i) = 1.0 / diag[i];
  for (int r : crashed_rows) {
    const int c = basis_[r];
    for (int k = sf_.nnz_begin(c); k < sf_.nnz_end(c); ++k) {
      const int i = sf_.row_index[k];
      if (i != r) binv_(i, r) = -sf_.value[k] / (diag[i] * diag[r]);
    }
  }
  index_basis();
}

void SimplexRun::index_basis() {
  position_.assign(sf_.num_columns(), -1);
  for (int i = 0; i < sf_.rows; ++i) position_[basis_[i]] = i;
  eligible_.assign(sf_.num_columns(), 1);
  for (int c = 0; c < sf_.num_columns(); ++c) {
    // Artificials never enter; once they leave they are gone for good.
    if (sf_.kind[c] == ColumnKind::kArtificial) eligible_[c] = 0;
  }
}

void SimplexRun::refactor() {
  const int m = sf_.rows;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const int c = basis_[i];
    for (int k = sf_.nnz_begin(c); k < sf_.nnz_end(c); ++k) b(sf_.row_index[k], i) = sf_.value[k];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
  binv_ = lu.inverse();
  if (!binv_.allFinite()) {
    throw Error(ErrorCode::kNumericalFailure, "basis matrix became singular");
  }
  recompute_primal();
  recompute_duals();
}

void SimplexRun::recompute_primal() { xb_.noalias() = binv_ * sf_.rhs; }

void SimplexRun::recompute_duals() {
  Eigen::VectorXd cb(sf_.rows);
  for (int i = 0; i < sf_.rows; ++i) cb[i] = phase_cost_[basis_[i]];
  pi_.noalias() = binv_.transpose() * cb;
}

double SimplexRun::reduced_cost(int col) const {
  double d = phase_cost_[col];
  for (int k = sf_.nnz_begin(col); k < sf_.nnz_end(col); ++k) {
    d -= pi_[sf_.row_index[k]] * sf_.value[k];
  }
  return d;
}

void SimplexRun::column_image(int col, Eigen::VectorXd& out) const {
  out.setZero(sf_.rows);
  for (int k = sf_.nnz_begin(col); k < sf_.nnz_end(col); ++k) {
    out.noalias() += sf_.value[k] * binv_.col(sf_.row_index[k]);
  }
}

int SimplexRun::choose_entering(bool bland, double& best_d) const {
  int best = -1;
  best_d = -tol_;
  for (int c = 0; c < sf_.num_columns(); ++c) {
    if (!eligible_[c] || position_[c] >= 0) continue;
    const double d = reduced_cost(c);
    if (d < best_d) {
      best_d = d;
      best = c;
      if (bland) break;
    }
  }
  return best;
}

int SimplexRun::choose_leaving(const Eigen::VectorXd& alpha, bool bland) const {
  const int m = sf_.rows;
  if (bland) {
    int best = -1;
    double best_ratio = kInfinity;
    for (int i = 0; i < m; ++i) {
      if (alpha[i] <= kPivotTolerance) continue;
      const double ratio = std::max(xb_[i], 0.0) / alpha[i];
      const double slack = 1e-12 * (1.0 + best_ratio);
      if (best < 0 || ratio < best_ratio - slack ||
          (ratio <= best_ratio + slack && basis_[i] < basis_[best])) {
        if (best < 0 || ratio < best_ratio) best_ratio = ratio;
        best = i;
      }
    }
    return best;
  }
  // Harris two-pass ratio test.
  double theta_max = kInfinity;
  for (int i = 0; i < m; ++i) {
    if (alpha[i] > kPivotTolerance) {
      theta_max = std::min(theta_max, (std::max(xb_[i], 0.0) + tol_) / alpha[i]);
    }
  }
  if (theta_max == kInfinity) return -1;
  int best = -1;
  for (int i = 0; i < m; ++i) {
    if (alpha[i] <= kPivotTolerance) continue;
    if (std::max(xb_[i], 0.0) / alpha[i] > theta_max) continue;
    if (best < 0 || alpha[i] > alpha[best] ||
        (alpha[i] == alpha[best] && basis_[i] < basis_[best])) {
      best = i;
    }
  }
  return best;
}

void SimplexRun::pivot(int row, int col, const Eigen::VectorXd& alpha,
                       double theta, double reduced) {
  const double pivot_value = alpha[row];
  const Eigen::RowVectorXd pivot_row = binv_.row(row);

  xb_.noalias() -= theta * alpha;
  xb_[row] = theta;
  pi_.noalias() += (reduced / pivot_value) * pivot_row.transpose();

  for (int j = 0; j < sf_.rows; ++j) {
    const double v = pivot_row[j];
    if (v == 0.0) continue;
    const double scaled = v / pivot_value;
    binv_.col(j).noalias() -= scaled * alpha;
    binv_(row, j) = scaled;
  }

  const int leaving = basis_[row];
  position_[leaving] = -1;
  if (sf_.kind[leaving] == ColumnKind::kArtificial) eligible_[leaving] = 0;
  basis_[row] = col;
  position_[col] = row;
}

double SimplexRun::primal_residual() const {
  Eigen::VectorXd r = sf_.rhs;
  for (int i = 0; i < sf_.rows; ++i) {
    const int c = basis_[i];
    for (int k = sf_.nnz_begin(c); k < sf_.nnz_end(c); ++k) {
      r[sf_.row_index[k]] -= sf_.value[k] * xb_[i];
    }
  }
  return r.lpNorm<Eigen::Infinity>() / (1.0 + sf_.rhs.lpNorm<Eigen::Infinity>());
}

SimplexRun::PhaseResult SimplexRun::iterate() {
  recompute_duals();
  bool bland = false;
  int degenerate_run = 0;
  const int degenerate_limit = 50 + sf_.rows / 4;
  int since_maintenance = 0;

  for (;;) {
    if (++since_maintenance >= kMaintenanceInterval) {
      since_maintenance = 0;
      recompute_primal();
      if (primal_residual() > 1e-10) {
        refactor();
      } else {
        recompute_duals();
      }
    }
    double d = 0.0;
    const int entering = choose_entering(bland, d);
    if (entering < 0) return PhaseResult::kOptimal;

    column_image(entering, alpha_);
    const int leaving = choose_leaving(alpha_, bland);
    if (leaving < 0) return PhaseResult::kUnbounded;
    tick();

    const double theta = std::max(xb_[leaving], 0.0) / alpha_[leaving];
    pivot(leaving, entering, alpha_, theta, d);

    if (theta * std::abs(d) <= 1e-12) {
      if (++degenerate_run > degenerate_limit) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }
  }
}

// Pivots zero-level artificials out of the basis after phase one. Returns
// false if an artificial remains at a nonzero level.
bool SimplexRun::drive_out_artificials() {
  const int m = sf_.rows;
  Eigen::VectorXd row(m);
  for (int r = 0; r < m; ++r) {
    const int c = basis_[r];
    if (sf_.kind[c] != ColumnKind::kArtificial) continue;
    row = binv_.row(r).transpose();
    int best = -1;
    double best_value = kPivotTolerance;
    for (int j = 0; j < sf_.num_columns(); ++j) {
      if (sf_.kind[j] == ColumnKind::kArtificial || position_[j] >= 0) continue;
      double v = 0.0;
      for (int k = sf_.nnz_begin(j); k < sf_.nnz_end(j); ++k) v += row[sf_.row_index[k]] * sf_.value[k];
      if (std::abs(v) > best_value) {
        best_value = std::abs(v);
        best = j;
      }
    }
    if (best < 0) continue;  // redundant row; the artificial stays at zero
    column_image(best, alpha_);
    const double theta = xb_[r] / alpha_[r];
    pivot(r, best, alpha_, theta, 0.0);
  }
  for (int r = 0; r < m; ++r) {
    if (sf_.kind[basis_[r]] == ColumnKind::kArtificial &&
        std::abs(xb_[r]) > tol_ * (1.0 + sf_.rhs[r])) {
      return false;
    }
  }
  return true;
}

bool SimplexRun::find_feasible() {
  crash();
  bool has_artificial = false;
  for (int r = 0; r < sf_.rows; ++r) {
    has_artificial |= sf_.kind[basis_[r]] == ColumnKind::kArtificial;
  }
  if (!has_artificial) return true;

  phase_cost_.assign(sf_.num_columns(), 0.0);
  for (int c = 0; c < sf_.num_columns(); ++c) {
    if (sf_.kind[c] == ColumnKind::kArtificial) phase_cost_[c] = 1.0;
  }
  iterate();
  recompute_primal();
  if (primal_residual() > 1e-10) refactor();
  for (int r = 0; r < sf_.rows; ++r) {
    if (sf_.kind[basis_[r]] == ColumnKind::kArtificial &&
        xb_[r] > tol_ * (1.0 + sf_.rhs[r])) {
      return false;
    }
  }
  return drive_out_artificials();
}

bool SimplexRun::adopt_basis() {
  const int m = sf_.rows;
  if (static_cast<int>(basis_.size()) != m || binv_.rows() != m || binv_.cols() != m) {
    return false;
  }
  std::vector<char> seen(sf_.num_columns(), 0);
  for (int c : basis_) {
    if (c < 0 || c >= sf_.num_columns() || seen[c]) return false;
    seen[c] = 1;
  }
  // B^-1 B must be the identity.
  Eigen::VectorXd image;
  for (int i = 0; i < m; ++i) {
    column_image(basis_[i], image);
    image[i] -= 1.0;
    if (image.lpNorm<Eigen::Infinity>() > 1e-9) return false;
  }
  recompute_primal();
  for (int r = 0; r < m; ++r) {
    const double floor = -tol_ * (1.0 + sf_.rhs[r]);
    if (xb_[r] < floor) return false;
    if (sf_.kind[basis_[r]] == ColumnKind::kArtificial && xb_[r] > -floor) return false;
  }
  index_basis();
  return true;
}

LpSolution SimplexRun::optimize(const LpProblem& problem, const Eigen::VectorXd& objective) {
  LpSolution solution;
  if (position_.empty()) index_basis();
  phase_cost_ = sf_.cost;
  for (int c = 0; c < sf_.num_columns(); ++c) {
    if (sf_.kind[c] == ColumnKind::kArtificial) phase_cost_[c] = 0.0;
  }
  if (iterate() == PhaseResult::kUnbounded) {
    solution.status = Status::kUnbounded;
    solution.iterations = iterations_;
    return solution;
  }
  recompute_primal();
  if (primal_residual() > 1e-10) {
    refactor();
    if (iterate() == PhaseResult::kUnbounded) {
      solution.status = Status::kUnbounded;
      solution.iterations = iterations_;
      return solution;
    }
    recompute_primal();
  }
  recompute_duals();

  Eigen::VectorXd z = Eigen::VectorXd::Zero(sf_.num_columns());
  for (int r = 0; r < sf_.rows; ++r) z[basis_[r]] = std::max(xb_[r], 0.0);

  const Eigen::Index n = problem.num_variables();
  Eigen::VectorXd x(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& map = sf_.variables[j];
    switch (map.kind) {
      case VariableMap::Kind::kShifted: x[j] = map.offset + z[map.column]; break;
      case VariableMap::Kind::kMirrored: x[j] = map.offset - z[map.column]; break;
      case VariableMap::Kind::kSplit: x[j] = z[map.column] - z[map.negative_column]; break;
    }
  }
  const double violation = max_violation(problem, x);
  if (violation > 100.0 * tol_) {
    throw Error(ErrorCode::kNumericalFailure,
                "optimal basis violates constraints by " + std::to_string(violation));
  }

  solution.status = Status::kOptimal;
  solution.variable_values = std::move(x);
  solution.objective_value = objective.dot(solution.variable_values);
  solution.row_duals.resize(sf_.original_rows);
  for (int i = 0; i < sf_.original_rows; ++i) {
    solution.row_duals[i] = pi_[i] * sf_.row_sign[i];
  }
  solution.iterations = iterations_;
  return solution;
}

// Standard-form costs for a new objective; slacks and artificials cost 0.
void set_costs(StandardForm& sf, const Eigen::VectorXd& objective) {
  std::fill(sf.cost.begin(), sf.cost.end(), 0.0);
  for (std::size_t j = 0; j < sf.variables.size(); ++j) {
    const auto& map = sf.variables[j];
    const double c = objective[static_cast<Eigen::Index>(j)];
    switch (map.kind) {
      case VariableMap::Kind::kShifted: sf.cost[map.column] = c; break;
      case VariableMap::Kind::kMirrored: sf.cost[map.column] = -c; break;
      case VariableMap::Kind::kSplit:
        sf.cost[map.column] = c;
        sf.cost[map.negative_column] = -c;
        break;
    }
  }
}

// Only bounds: each variable sits at its cheaper finite bound.
LpSolution solve_bounds_only(const LpProblem& problem, const Eigen::VectorXd& objective) {
  LpSolution solution;
  Eigen::VectorXd x(problem.num_variables());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double c = objective[j];
    const double lo = problem.variable_lower_bounds[j];
    const double hi = problem.variable_upper_bounds[j];
    const double pick = c > 0.0 ? lo : (c < 0.0 ? hi : (std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0)));
    if (!std::isfinite(pick)) {
      solution.status = Status::kUnbounded;
      return solution;
    }
    x[j] = pick;
  }
  solution.status = Status::kOptimal;
  solution.variable_values = x;
  solution.objective_value = objective.dot(x);
  solution.row_duals.resize(0);
  return solution;
}

// Carries the hint's basis over to `state`. Artificials basic in the hint
// are recreated on the same rows.
bool map_hint_basis(BasisState& state, const DensePrepared& hint,
                    std::span<const Eigen::Index> hint_variables) {
  const StandardForm& from = hint.state.sf;
  StandardForm& to = state.sf;
  if (!hint.feasible || from.rows != to.rows || from.rows == 0 ||
      hint_variables.size() != from.variables.size()) {
    return false;
  }
  std::vector<int> variable_of(from.num_columns(), -1);
  std::vector<char> negative_part(from.num_columns(), 0);
  for (std::size_t j = 0; j < from.variables.size(); ++j) {
    const auto& map = from.variables[j];
    variable_of[map.column] = static_cast<int>(j);
    if (map.kind == VariableMap::Kind::kSplit) {
      variable_of[map.negative_column] = static_cast<int>(j);
      negative_part[map.negative_column] = 1;
    }
  }
  std::vector<int> slack_of(to.rows, -1);
  for (int c = 0; c < to.num_columns(); ++c) {
    if (to.kind[c] == ColumnKind::kSlack) slack_of[to.row_index[to.nnz_begin(c)]] = c;
  }

  state.basis.assign(to.rows, -1);
  for (int r = 0; r < from.rows; ++r) {
    const int c = hint.state.basis[r];
    int mapped = -1;
    switch (from.kind[c]) {
      case ColumnKind::kStructural: {
        const Eigen::Index target = hint_variables[variable_of[c]];
        if (target < 0 || target >= static_cast<Eigen::Index>(to.variables.size())) return false;
        const auto& source_map = from.variables[variable_of[c]];
        const auto& target_map = to.variables[target];
        if (source_map.kind != target_map.kind) return false;
        mapped = negative_part[c] ? target_map.negative_column : target_map.column;
        break;
      }
      case ColumnKind::kSlack:
        mapped = slack_of[from.row_index[from.nnz_begin(c)]];
        break;
      case ColumnKind::kArtificial:
        mapped = to.add_column(ColumnKind::kArtificial, 0.0);
        to.push_entry(from.row_index[from.nnz_begin(c)], from.value[from.nnz_begin(c)]);
        break;
    }
    if (mapped < 0) return false;
    state.basis[r] = mapped;
  }
  state.binv = hint.state.binv;
  state.xb = hint.state.xb;
  return true;
}

}  // namespace

std::shared_ptr<const PreparedProblem> LpSolver::prepare(
    const LpProblem& problem, const SolverOptions&, const PreparedProblem*,
    std::span<const Eigen::Index>) const {
  problem.validate();
  return std::make_shared<PreparedProblem>(problem);
}

LpSolution LpSolver::solve(const PreparedProblem& prepared, const Eigen::VectorXd& objective,
                           const SolverOptions& options) const {
  LpProblem problem = prepared.problem();
  if (objective.size() != problem.num_variables()) {
    throw Error(ErrorCode::kMalformedProblem, "objective length does not match the problem");
  }
  problem.objective = objective;
  return solve(problem, options);
}

std::shared_ptr<const PreparedProblem> DenseSimplexSolver::prepare(
    const LpProblem& problem, const SolverOptions& options, const PreparedProblem* hint,
    std::span<const Eigen::Index> hint_variables) const {
  problem.validate();
  if (!(options.tolerance > 0.0)) {
    throw Error(ErrorCode::kMalformedProblem, "tolerance must be positive");
  }
  auto prepared = std::make_shared<DensePrepared>(problem);
  BasisState& state = prepared->state;
  state.sf = build_standard_form(problem);
  if (state.sf.rows == 0) {
    prepared->feasible = true;
    return prepared;
  }
  if (const auto* dense_hint = dynamic_cast<const DensePrepared*>(hint)) {
    if (map_hint_basis(state, *dense_hint, hint_variables)) {
      SimplexRun run(state, options);
      if (run.adopt_basis()) {
        prepared->feasible = true;
        return prepared;
      }
    }
    state = BasisState{};
    state.sf = build_standard_form(problem);
  }
  SimplexRun run(state, options);
  prepared->feasible = run.find_feasible();
  prepared->iterations = run.iterations();
  return prepared;
}

LpSolution DenseSimplexSolver::solve(const PreparedProblem& prepared,
                                     const Eigen::VectorXd& objective,
                                     const SolverOptions& options) const {
  const auto* dense = dynamic_cast<const DensePrepared*>(&prepared);
  if (dense == nullptr) return LpSolver::solve(prepared, objective, options);
  const LpProblem& problem = prepared.problem();
  if (objective.size() != problem.num_variables() || !objective.allFinite()) {
    throw Error(ErrorCode::kMalformedProblem, "objective must be finite with one entry per variable");
  }
  if (dense->state.sf.rows == 0) return solve_bounds_only(problem, objective);
  if (!dense->feasible) {
    LpSolution solution;
    solution.status = Status::kInfeasible;
    solution.iterations = dense->iterations;
    return solution;
  }
  BasisState state = dense->state;
  set_costs(state.sf, objective);
  SimplexRun run(state, options, dense->iterations);
  return run.optimize(problem, objective);
}

LpSolution DenseSimplexSolver::solve(const LpProblem& problem,
                                     const SolverOptions& options) const {
  const auto prepared = prepare(problem, options);
  return solve(*prepared, problem.objective, options);
}

const LpSolver& default_solver() {
  static const DenseSimplexSolver solver;
  return solver;
}

LpSolution solve(const LpProblem& problem, double tolerance) {
  SolverOptions options;
  options.tolerance = tolerance;
  return default_solver().solve(problem, options);
}

}  // namespace relint::lp
