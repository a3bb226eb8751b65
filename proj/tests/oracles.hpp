#ifndef CONTPATH_TESTS_ORACLES_HPP
#define CONTPATH_TESTS_ORACLES_HPP

// Independent reference implementations used as test oracles. Everything here
// is deliberately naive (plain loops, no shared code with the library paths
// under test).

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "contpath/problem.hpp"
#include "contpath/rng.hpp"
#include "contpath/solver.hpp"

namespace oracles {

// P_lambda(beta) with explicit double loops.
inline double naive_primal(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& beta, double lambda) {
  double quad = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double dot = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      dot += x(i, j) * beta[j];
    }
    const double r = y[i] - dot;
    quad += r * r;
  }
  double l1 = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    l1 += std::abs(beta[j]);
  }
  return 0.5 * quad + lambda * l1;
}

// max_j |X_j^T y| with a per-column scan.
inline double naive_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double dot = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      dot += x(i, j) * y[i];
    }
    best = std::max(best, std::abs(dot));
  }
  return best;
}

// d_j(theta) via a per-feature loop.
inline Eigen::VectorXd naive_distances(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta) {
  Eigen::VectorXd d(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double dot = 0.0;
    double norm_sq = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      dot += x(i, j) * theta[i];
      norm_sq += x(i, j) * x(i, j);
    }
    d[j] = norm_sq > 0.0 ? (1.0 - std::abs(dot)) / std::sqrt(norm_sq)
                         : std::numeric_limits<double>::infinity();
  }
  return d;
}

// Closed-form Lasso solution for designs with orthonormal columns:
// beta_j = ST(X_j^T y, lambda).
inline Eigen::VectorXd orthonormal_solution(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                            double lambda) {
  Eigen::VectorXd beta(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double z = x.col(j).dot(y);
    beta[j] = contpath::soft_threshold(z, lambda);
  }
  return beta;
}

// Plain cyclic coordinate descent to a target duality gap; no screening, no
// working sets. This is the household high-precision solver the screening
// safety checks compare against.
inline contpath::primal_dual_state cd_oracle(const contpath::problem& prob, double lambda,
                                             double gap_tol, long max_epochs = 500000) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(prob.p());
  Eigen::VectorXd residual = prob.y;
  contpath::primal_dual_state state = contpath::dual_point(prob, beta, lambda);
  for (long epoch = 0; epoch < max_epochs; ++epoch) {
    if (state.gap_local <= gap_tol) {
      break;
    }
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      const double norm = prob.X.col_norm(j);
      if (norm == 0.0) {
        continue;
      }
      const double nj2 = norm * norm;
      const double g = prob.X.col_dot(j, residual);
      const double old = beta[j];
      const double next = contpath::soft_threshold(old + g / nj2, lambda / nj2);
      if (next != old) {
        prob.X.add_col(j, old - next, residual);
        beta[j] = next;
      }
    }
    state = contpath::dual_point(prob, beta, lambda);
  }
  return state;
}

// Small dense random instance: Gaussian design, sparse Laplace signal.
inline contpath::problem random_problem(contpath::rng& gen, int n, int p,
                                        double noise_sd = 1.0) {
  Eigen::MatrixXd x(n, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) {
      x(i, j) = gen.normal();
    }
  }
  Eigen::VectorXd beta_star = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < p; ++j) {
    if (gen.uniform01() < 0.3) {
      beta_star[j] = gen.laplace(1.0);
    }
  }
  Eigen::VectorXd y = x * beta_star;
  for (int i = 0; i < n; ++i) {
    y[i] += noise_sd * gen.normal();
  }
  return contpath::problem::quadratic(contpath::design_matrix::dense(std::move(x)),
                                      std::move(y));
}

inline Eigen::VectorXd random_vector(contpath::rng& gen, int size, double scale = 1.0) {
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) {
    v[i] = scale * gen.normal();
  }
  return v;
}

}  // namespace oracles

#endif  // CONTPATH_TESTS_ORACLES_HPP
