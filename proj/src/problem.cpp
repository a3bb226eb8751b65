#include "contpath/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "contpath/errors.hpp"

namespace contpath {

problem problem::quadratic(design_matrix x, Eigen::VectorXd y) {
  if (y.size() != x.rows()) {
    throw std::invalid_argument("problem: y has wrong length");
  }
  problem prob{std::move(x), std::move(y)};
  prob.mu = 1.0;
  prob.nu = 1.0;
  prob.lambda_max = prob.X.max_abs_correlation(prob.y);
  return prob;
}

double eval_primal(const problem& prob, const Eigen::VectorXd& beta, double lambda) {
  if (beta.size() != prob.p()) {
    throw std::invalid_argument("eval_primal: beta has wrong length");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("eval_primal: lambda must be positive");
  }
  const Eigen::VectorXd residual = prob.y - prob.X.multiply(beta);
  return 0.5 * residual.squaredNorm() + lambda * beta.lpNorm<1>();
}

double eval_dual(const problem& prob, const Eigen::VectorXd& theta, double lambda) {
  if (theta.size() != prob.n()) {
    throw std::invalid_argument("eval_dual: theta has wrong length");
  }
  const double violation = prob.X.max_abs_correlation(theta) - 1.0;
  if (violation > 1e-10) {
    throw infeasible_dual_error("eval_dual: theta violates ||X^T theta||_inf <= 1", violation);
  }
  return 0.5 * prob.y.squaredNorm() - 0.5 * (prob.y - lambda * theta).squaredNorm();
}

primal_dual_state dual_point(const problem& prob, const Eigen::VectorXd& beta, double lambda) {
  if (beta.size() != prob.p()) {
    throw std::invalid_argument("dual_point: beta has wrong length");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("dual_point: lambda must be positive");
  }
  primal_dual_state s;
  s.lambda = lambda;
  s.beta = beta;

  // grad f(X beta) = X beta - y = -residual
  const Eigen::VectorXd residual = prob.y - prob.X.multiply(beta);
  const double corr_inf = prob.X.max_abs_correlation(residual);
  s.alpha = std::max(lambda, corr_inf);
  s.f_val = 0.5 * residual.squaredNorm();
  if (s.alpha > 0.0) {
    s.theta = residual / s.alpha;
  } else {
    s.theta = Eigen::VectorXd::Zero(prob.n());  // y = 0 and beta = 0
  }
  s.zeta = -lambda * s.theta;

  const double primal = s.f_val + lambda * beta.lpNorm<1>();
  const double dual =
      0.5 * prob.y.squaredNorm() - 0.5 * (prob.y - lambda * s.theta).squaredNorm();
  s.gap_local = detail::clamp_gap(primal - dual);
  s.delta_t = s.f_val - 0.5 * s.zeta.squaredNorm();
  return s;
}

double lambda_max(const problem& prob) { return prob.lambda_max; }

double gap_at(const problem& prob, const primal_dual_state& state, double lambda) {
  const double primal =
      state.f_val + lambda * state.beta.lpNorm<1>();
  const double dual =
      0.5 * prob.y.squaredNorm() - 0.5 * (prob.y - lambda * state.theta).squaredNorm();
  return detail::clamp_gap(primal - dual);
}

}  // namespace contpath
