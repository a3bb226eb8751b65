#ifndef CONTPATH_SCREENING_HPP
#define CONTPATH_SCREENING_HPP

#include <utility>
#include <vector>

#include "contpath/problem.hpp"

namespace contpath {

// Dual ball certified to contain the optimal dual point:
// radius r(lambda) = sqrt(2 nu Gap_lambda(beta, theta) / lambda^2).
struct safe_region {
  Eigen::VectorXd center;
  double radius = 0.0;
};

// Outcome of one gap-safe pass. screened[j] iff distances[j] > radius;
// active is the complement (the safe active set). e_lo/e_hi are the
// lambda-independent envelopes of the optimization error term.
struct screening_report {
  Eigen::VectorXd distances;
  std::vector<char> screened;
  std::vector<int> active;
  double radius = 0.0;  // sqrt(2 nu gap) / lambda for the floored gap below
  double gap = 0.0;
  double e_lo = 0.0;
  double e_hi = 0.0;
};

// d_j(theta) = (1 - |X_j^T theta|) / ||X_j||; +inf for zero columns.
Eigen::VectorXd feature_distances(const problem& prob, const Eigen::VectorXd& theta);

// Gap-safe rule at lambda: d_j(theta) > r(lambda) implies the optimal
// coefficient at lambda is zero. The gap is recomputed internally at lambda
// from the state's (beta, theta). Envelopes are evaluated with target lambda.
screening_report gap_safe_screen(const problem& prob, const primal_dual_state& state,
                                 double lambda);

// Sequential safe radius: gap of the OLD pair evaluated at the NEW lambda.
double sequential_radius(const primal_dual_state& state_t, double lambda_next,
                         const problem& prob);

// Elimination threshold tying screening to grid spacing: a feature with
// d_j(theta_t) above the returned value has zero coefficient at lambda_next.
double support_path_threshold(const primal_dual_state& state_t, double lambda_next,
                              const problem& prob);

// (e_lo, e_hi) with e_lo <= E_t(lambda') / lambda'^2 <= e_hi for every
// lambda' in [target_lambda, state.lambda].
std::pair<double, double> error_envelopes(const primal_dual_state& state_t,
                                          double target_lambda);

struct screening_stop {
  bool keep_optimizing = true;
  bool screening_saturated = false;
};

// keep_optimizing: the inner solve is still inaccurate enough that screened
// features at lambda_t could be lost at the next step. screening_saturated:
// the error term is already proportional (constant c) to the irreducible
// residual term, so further inner iterations cannot shrink the active set.
screening_stop screening_stop_criteria(const screening_report& report,
                                       const primal_dual_state& state_t,
                                       double lambda_next, const problem& prob, double c);

// Unsafe heuristic: discard j when |X_j^T theta_t| < (2 lambda_next - lambda_t) / lambda_t.
// Empty whenever 2 lambda_next <= lambda_t.
std::vector<int> strong_rule_screen(const problem& prob, const Eigen::VectorXd& theta_t,
                                    double lambda_t, double lambda_next);

}  // namespace contpath

#endif  // CONTPATH_SCREENING_HPP
