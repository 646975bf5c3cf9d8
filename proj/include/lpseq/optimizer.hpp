#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lpseq/objective.hpp"

namespace lpseq {

struct OptimizerParams {
  double rel_tol = 1e-5;          // stop once (J_prev - J) < rel_tol * J
  double armijo_c = 0.5;          // sufficient-decrease constant
  int max_iters = 100000;
  double initial_step = 1.0;      // top of the backtracking ladder
  double backtrack_factor = 0.5;
  int max_backtracks = 60;

  void validate() const;
};

enum class Termination { converged, max_iters, stalled_line_search };

std::string to_string(Termination reason);

// One row per iterate: the objective value at iterate `iter`, the step that
// produced it (0 for the start point) and the gradient norm at the iterate.
// An accepted step is re-checkable from consecutive rows:
//   j_value[t] <= j_value[t-1] - armijo_c * step[t] * grad_norm[t-1]^2.
struct TraceEntry {
  int iter = 0;
  double j_value = 0.0;
  double step = 0.0;
  double grad_norm = 0.0;
};

struct OptimizerTrace {
  std::vector<TraceEntry> entries;
  Termination reason = Termination::converged;
};

using ObjectiveFn = std::function<double(const Eigen::MatrixXd&)>;

struct ArmijoResult {
  bool accepted = false;  // false: no rung of the ladder gave sufficient decrease
  double step = 0.0;
  Eigen::MatrixXd next;
  double j_next = 0.0;
};

// Backtracking line search along the negative gradient.  Tries
// initial_step * backtrack_factor^j for j = 0..max_backtracks and returns the
// first (largest) step whose objective value satisfies the sufficient
// decrease condition
//   J(S - mu * grad) <= J(S) - armijo_c * mu * ||grad||_F^2.
ArmijoResult armijo_step(const Eigen::MatrixXd& seq, const Eigen::MatrixXd& grad,
                         double j_current, const OptimizerParams& params, const ObjectiveFn& eval);

struct DescentResult {
  Eigen::MatrixXd seq;
  double j_value = 0.0;
  OptimizerTrace trace;
};

// Gradient descent on the analytic MSE using the factorized objective.
// Deterministic; returns the best iterate seen.
DescentResult gradient_descent(const Eigen::MatrixXd& seq0, const MomentSet& mom,
                               const KronFactorization& fact, const OptimizerParams& params);

}  // namespace lpseq
