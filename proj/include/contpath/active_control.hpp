#ifndef CONTPATH_ACTIVE_CONTROL_HPP
#define CONTPATH_ACTIVE_CONTROL_HPP

#include <optional>
#include <vector>

#include "contpath/problem.hpp"

namespace contpath {

// Target sizes for the safe active set along the path. Targets are clamped
// into [|A_t|, p] at use; LarsLike asks for |A_t| + 1 every step.
struct size_schedule {
  enum class mode_kind { fixed_increment, targets, lars_like };
  mode_kind mode = mode_kind::lars_like;
  int increment = 1;
  std::vector<int> targets;
  int cap = 0;  // 0 means "no cap below p"
};

// Unsafe working set W(beta, gamma) = { j : |X_j^T grad f(X beta)| >= gamma }.
struct working_set_t {
  enum class origin_kind { pathwise_unsafe, gap_safe, strong_rule };
  std::vector<int> indices;
  double threshold = 0.0;
  origin_kind origin = origin_kind::pathwise_unsafe;
};

// Lambda thresholds controlling membership of feature j in the sequential
// safe active set A_t(lambda'):
//   lambda' <= lo_rule  guarantees  j in A_t(lambda')      (reach rule)
//   j in A_t(lambda')   requires    lambda' <= hi_rule      (keep-out rule)
// A rule whose radicand is negative is inapplicable (nullopt).
struct membership_bounds {
  std::optional<double> lo_rule;
  std::optional<double> hi_rule;
};

membership_bounds lambda_bounds_for_membership(const primal_dual_state& state_t, int j,
                                               const problem& prob, double target_lambda);

// Next-lambda interval for hitting safe-active-set size p_t:
//   lambda_{t+1} >  keep_below  =>  |A_t(lambda_{t+1})| <  p_t
//   lambda_{t+1} <= reach_at    =>  |A_t(lambda_{t+1})| >= p_t
// nullopt means size control is infeasible at the current accuracy and the
// caller must tighten the inner solve first.
struct size_step {
  double keep_below = 0.0;
  double reach_at = 0.0;
};

std::optional<size_step> next_lambda_for_size(const primal_dual_state& state_t, int p_t,
                                              const problem& prob, double target_lambda);

working_set_t working_set(const problem& prob, const Eigen::VectorXd& beta, double gamma);

}  // namespace contpath

#endif  // CONTPATH_ACTIVE_CONTROL_HPP
