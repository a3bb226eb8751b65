#ifndef CONTPATH_PROBLEM_HPP
#define CONTPATH_PROBLEM_HPP

#include <Eigen/Dense>

#include "contpath/design_matrix.hpp"

namespace contpath {

// l1-regularized least squares:
//
//   min_beta  P_lambda(beta) = f(X beta) + lambda ||beta||_1,
//   f(z) = 1/2 ||y - z||^2.
//
// The loss z -> f(z) is mu-strongly convex and nu-smooth with mu = nu = 1 and
// inf_z f(z) = 0. (mu, nu) are carried as data so the path policies stay
// generic in the constants, but only the quadratic loss ships.
struct problem {
  design_matrix X;
  Eigen::VectorXd y;
  double mu = 1.0;
  double nu = 1.0;
  double lambda_max = 0.0;  // ||X^T grad f(0)||_inf = ||X^T y||_inf

  static problem quadratic(design_matrix x, Eigen::VectorXd y);

  Eigen::Index n() const noexcept { return X.rows(); }
  Eigen::Index p() const noexcept { return X.cols(); }
};

// Primal-dual snapshot at one lambda. theta is the feasible dual point built
// by rescaling the residual:
//
//   theta = -grad f(X beta) / alpha,  alpha = max(lambda, ||X^T grad f(X beta)||_inf),
//   zeta  = -lambda * theta,
//   delta = f(X beta) - f(grad f*(zeta)) = 1/2 ||y - X beta||^2 - 1/2 ||zeta||^2.
struct primal_dual_state {
  Eigen::VectorXd beta;
  Eigen::VectorXd theta;
  double alpha = 0.0;
  Eigen::VectorXd zeta;
  double lambda = 0.0;
  double gap_local = 0.0;
  double delta_t = 0.0;
  double f_val = 0.0;

  double zeta_sq_norm() const { return zeta.squaredNorm(); }
};

// P_lambda(beta). Throws std::invalid_argument on dimension mismatch.
double eval_primal(const problem& prob, const Eigen::VectorXd& beta, double lambda);

// D_lambda(theta) = 1/2 ||y||^2 - 1/2 ||y - lambda theta||^2. Requires
// ||X^T theta||_inf <= 1 + 1e-10; throws infeasible_dual_error otherwise,
// carrying the maximum constraint violation.
double eval_dual(const problem& prob, const Eigen::VectorXd& theta, double lambda);

// Feasible dual point at (beta, lambda) by residual rescaling, together with
// the local gap, delta and f value. Gaps within -1e-10 of zero are clamped
// to 0.
primal_dual_state dual_point(const problem& prob, const Eigen::VectorXd& beta, double lambda);

// max_j |X_j^T y|; beta = 0 has zero duality gap for every lambda >= this.
double lambda_max(const problem& prob);

// Gap of an existing (beta, theta) pair re-evaluated at another lambda.
// Feasibility of theta does not depend on lambda, so no recheck is needed.
double gap_at(const problem& prob, const primal_dual_state& state, double lambda);

inline double soft_threshold(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

namespace detail {
// Gap clamp shared by dual_point / gap_at.
inline double clamp_gap(double gap) { return (gap < 0.0 && gap >= -1e-10) ? 0.0 : gap; }
}  // namespace detail

}  // namespace contpath

#endif  // CONTPATH_PROBLEM_HPP
