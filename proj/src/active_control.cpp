#include "contpath/active_control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contpath/screening.hpp"

namespace contpath {

namespace {

// Guard factor applied to the reach threshold: stays strictly inside the
// certified interval so that boundary features survive rounding of the gap.
constexpr double kReachGuard = 1.0 - 1e-12;

double threshold_for(double lambda_t, double theta_norm, double radicand) {
  const double denom = theta_norm + std::sqrt(radicand);
  if (denom <= 0.0) {
    return 0.0;
  }
  return lambda_t * theta_norm / denom;
}

}  // namespace

membership_bounds lambda_bounds_for_membership(const primal_dual_state& state_t, int j,
                                               const problem& prob, double target_lambda) {
  if (j < 0 || j >= prob.p()) {
    throw std::invalid_argument("lambda_bounds_for_membership: feature index out of range");
  }
  const Eigen::VectorXd d = feature_distances(prob, state_t.theta);
  const auto [e_lo, e_hi] = error_envelopes(state_t, target_lambda);
  const double dj_sq = d[j] * d[j];
  const double theta_norm = state_t.theta.norm();
  const double lt = state_t.lambda;

  membership_bounds out;
  const double reach_radicand = dj_sq - 2.0 * prob.nu * e_lo;
  if (reach_radicand >= 0.0) {
    out.lo_rule = threshold_for(lt, theta_norm, reach_radicand);
  }
  const double keep_radicand = (prob.mu / prob.nu) * (dj_sq - 2.0 * prob.nu * e_hi);
  if (keep_radicand >= 0.0) {
    out.hi_rule = threshold_for(lt, theta_norm, keep_radicand);
  }
  return out;
}

std::optional<size_step> next_lambda_for_size(const primal_dual_state& state_t, int p_t,
                                              const problem& prob, double target_lambda) {
  if (p_t < 1 || p_t > prob.p()) {
    throw std::invalid_argument("next_lambda_for_size: p_t out of range");
  }
  Eigen::VectorXd d = feature_distances(prob, state_t.theta);
  std::vector<std::pair<double, int>> order(static_cast<std::size_t>(prob.p()));
  for (Eigen::Index j = 0; j < prob.p(); ++j) {
    order[static_cast<std::size_t>(j)] = {d[j], static_cast<int>(j)};
  }
  std::sort(order.begin(), order.end());
  const double d_pt = order[static_cast<std::size_t>(p_t - 1)].first;
  const double lt = state_t.lambda;

  size_step step;
  if (d_pt <= 0.0) {
    // p_t features already sit on their dual constraints; any lambda keeps them.
    step.keep_below = lt;
    step.reach_at = lt;
    return step;
  }

  const auto [e_lo, e_hi] = error_envelopes(state_t, target_lambda);
  const double d_sq = d_pt * d_pt;
  const double keep_radicand = (prob.mu / prob.nu) * (d_sq - 2.0 * prob.nu * e_hi);
  if (keep_radicand < 0.0) {
    return std::nullopt;  // 2 nu E'' >= d^2: inner solve too loose for size control
  }
  const double reach_radicand = d_sq - 2.0 * prob.nu * e_lo;
  const double theta_norm = state_t.theta.norm();

  step.keep_below = threshold_for(lt, theta_norm, keep_radicand);
  step.reach_at = threshold_for(lt, theta_norm, reach_radicand) * kReachGuard;
  step.keep_below = std::clamp(step.keep_below, target_lambda, lt);
  step.reach_at = std::clamp(step.reach_at, target_lambda, lt);
  return step;
}

working_set_t working_set(const problem& prob, const Eigen::VectorXd& beta, double gamma) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("working_set: gamma must be positive");
  }
  if (beta.size() != prob.p()) {
    throw std::invalid_argument("working_set: beta has wrong length");
  }
  // |X_j^T grad f(X beta)| = |X_j^T (y - X beta)|
  const Eigen::VectorXd corr = prob.X.correlations(prob.y - prob.X.multiply(beta));
  working_set_t ws;
  ws.threshold = gamma;
  for (Eigen::Index j = 0; j < prob.p(); ++j) {
    if (std::abs(corr[j]) >= gamma) {
      ws.indices.push_back(static_cast<int>(j));
    }
  }
  return ws;
}

}  // namespace contpath
