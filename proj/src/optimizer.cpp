#include "lpseq/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace lpseq {

namespace {
// Objective values this small count as an exact minimum; the relative
// decrease test is meaningless at that scale.
constexpr double kAbsoluteFloor = 1e-30;
}  // namespace

void OptimizerParams::validate() const {
  if (!(rel_tol > 0.0)) throw std::domain_error("OptimizerParams: rel_tol must be positive");
  if (!(armijo_c > 0.0) || armijo_c >= 1.0)
    throw std::domain_error("OptimizerParams: armijo_c must lie in (0, 1)");
  if (max_iters < 1) throw std::domain_error("OptimizerParams: max_iters must be >= 1");
  if (!(initial_step > 0.0)) throw std::domain_error("OptimizerParams: initial_step must be positive");
  if (!(backtrack_factor > 0.0) || backtrack_factor >= 1.0)
    throw std::domain_error("OptimizerParams: backtrack_factor must lie in (0, 1)");
  if (max_backtracks < 0) throw std::domain_error("OptimizerParams: max_backtracks must be >= 0");
}

std::string to_string(Termination reason) {
  switch (reason) {
    case Termination::converged: return "converged";
    case Termination::max_iters: return "max_iters";
    case Termination::stalled_line_search: return "stalled_line_search";
  }
  return "unknown";
}

ArmijoResult armijo_step(const Eigen::MatrixXd& seq, const Eigen::MatrixXd& grad,
                         double j_current, const OptimizerParams& params, const ObjectiveFn& eval) {
  params.validate();
  if (seq.rows() != grad.rows() || seq.cols() != grad.cols())
    throw std::invalid_argument("armijo_step: gradient shape does not match the iterate");
  const double g2 = grad.squaredNorm();
  if (g2 == 0.0)
    throw std::invalid_argument("armijo_step: zero gradient; caller must terminate instead");

  ArmijoResult res;
  double mu = params.initial_step;
  for (int j = 0; j <= params.max_backtracks; ++j, mu *= params.backtrack_factor) {
    Eigen::MatrixXd cand = seq - mu * grad;
    const double j_next = eval(cand);
    if (j_next <= j_current - params.armijo_c * mu * g2) {
      res.accepted = true;
      res.step = mu;
      res.next = std::move(cand);
      res.j_next = j_next;
      return res;
    }
  }
  return res;
}

DescentResult gradient_descent(const Eigen::MatrixXd& seq0, const MomentSet& mom,
                               const KronFactorization& fact, const OptimizerParams& params) {
  params.validate();
  if (seq0.norm() == 0.0)
    throw std::domain_error("gradient_descent: start matrix is zero (a stationary point)");
  const ObjectiveFn eval = [&](const Eigen::MatrixXd& s) { return mse(s, mom, fact).total; };

  Eigen::MatrixXd seq = seq0;
  double j_cur = eval(seq);
  Eigen::MatrixXd grad = mse_gradient(seq, mom, fact);
  double gnorm = grad.norm();

  DescentResult res;
  res.trace.entries.push_back({0, j_cur, 0.0, gnorm});
  res.trace.reason = Termination::max_iters;

  for (int t = 1; t <= params.max_iters; ++t) {
    if (j_cur < kAbsoluteFloor || gnorm == 0.0) {
      res.trace.reason = Termination::converged;
      break;
    }
    const ArmijoResult step = armijo_step(seq, grad, j_cur, params, eval);
    if (!step.accepted) {
      res.trace.reason = Termination::stalled_line_search;
      break;
    }
    const double j_prev = j_cur;
    seq = step.next;
    j_cur = step.j_next;
    grad = mse_gradient(seq, mom, fact);
    gnorm = grad.norm();
    res.trace.entries.push_back({t, j_cur, step.step, gnorm});
    if (j_prev - j_cur < params.rel_tol * j_cur) {
      res.trace.reason = Termination::converged;
      break;
    }
  }

  // Accepted steps only ever decrease J, so the last iterate is the best.
  res.seq = std::move(seq);
  res.j_value = j_cur;
  return res;
}

}  // namespace lpseq
