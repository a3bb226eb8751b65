#include "contpath/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace contpath {

namespace {

// Relative tolerance for snapping a policy step onto the target exactly.
constexpr double kSnapRel = 1e-12;

// A prescribed grid point within this relative distance of the policy's next
// step counts as satisfying the one-step condition (no insertion).
constexpr double kGridSnapRel = 1e-3;

double clamp_step(double lambda_next, double target_lambda, double lambda_t) {
  if (lambda_next <= target_lambda * (1.0 + kSnapRel)) {
    return target_lambda;
  }
  return std::min(lambda_next, lambda_t);
}

}  // namespace

warm_start_bound_t warm_start_bound(const primal_dual_state& state, double lambda,
                                    const problem& prob) {
  if (!(lambda > 0.0) || lambda > state.lambda) {
    throw std::invalid_argument("warm_start_bound: need 0 < lambda <= lambda_t");
  }
  warm_start_bound_t b;
  const double ratio = lambda / state.lambda;
  const double zeta_sq = state.zeta_sq_norm();
  const double dev = (1.0 - ratio) * (1.0 - ratio) * zeta_sq;
  b.e_t = ratio * state.gap_local + (1.0 - ratio) * state.delta_t;
  b.v_mu = dev / (2.0 * prob.mu);
  b.v_nu = dev / (2.0 * prob.nu);
  b.gap_at_target = gap_at(prob, state, lambda);
  return b;
}

std::optional<double> next_lambda_fastpath(const primal_dual_state& state, double r,
                                           double eps_t, const problem& prob,
                                           double target_lambda) {
  const double lt = state.lambda;
  if (!(target_lambda > 0.0) || target_lambda >= lt) {
    throw std::invalid_argument("next_lambda_fastpath: need 0 < target < lambda_t");
  }
  if (r < 0.0 || !(r < prob.mu / prob.nu)) {
    throw std::invalid_argument("next_lambda_fastpath: need 0 <= r < mu/nu");
  }
  const double zeta_sq = state.zeta_sq_norm();
  if (zeta_sq == 0.0) {
    return target_lambda;  // interpolating solution, nothing constrains the step
  }
  const double scale = (lt * prob.mu) / (state.alpha * prob.nu);
  const double ratio = 1.0 - target_lambda / lt;
  const double d_val =
      scale * scale *
      ((1.0 - r * prob.nu / prob.mu) * ratio * ratio - 2.0 * prob.nu * eps_t / zeta_sq);
  if (d_val < 0.0) {
    return std::nullopt;
  }
  const double root = std::sqrt(d_val);
  if (root >= 1.0) {
    return target_lambda;  // cannot happen for r in range; guard division anyway
  }
  return clamp_step(target_lambda / (1.0 - root), target_lambda, lt);
}

double default_eps_fastpath(const primal_dual_state& state, double r, const problem& prob,
                            double target_lambda) {
  if (!(target_lambda > 0.0) || target_lambda > state.lambda) {
    throw std::invalid_argument("default_eps_fastpath: need 0 < target <= lambda_t");
  }
  const double ratio = 1.0 - target_lambda / state.lambda;
  return 0.42 * (state.zeta_sq_norm() / (2.0 * prob.nu)) * (1.0 - r * prob.nu / prob.mu) *
         ratio * ratio;
}

bool stopping_condition_fastpath(double e_prev, double e_next, double eps_t, double r) {
  return e_next <= (1.0 - r) * e_prev + eps_t;
}

double next_lambda_simplified(double lambda_t, double target_lambda, double r) {
  if (!(target_lambda > 0.0) || target_lambda >= lambda_t) {
    throw std::invalid_argument("next_lambda_simplified: need 0 < target < lambda_t");
  }
  if (!(r > 0.0) || !(r < 1.0)) {
    throw std::invalid_argument("next_lambda_simplified: need 0 < r < 1");
  }
  const double shrink = std::sqrt(1.0 - r) * (1.0 - target_lambda / lambda_t);
  return clamp_step(target_lambda / (1.0 - shrink), target_lambda, lambda_t);
}

double simplified_tolerance(double lambda_next, double target_lambda, double target_eps) {
  if (!(target_lambda > 0.0) || lambda_next < target_lambda) {
    throw std::invalid_argument("simplified_tolerance: need lambda_next >= target > 0");
  }
  return (lambda_next / target_lambda) * target_eps;
}

double adaptive_r(const problem& prob, double lambda_t, double target_lambda) {
  if (!(target_lambda > 0.0) || target_lambda > lambda_t) {
    throw std::invalid_argument("adaptive_r: need 0 < target <= lambda_t");
  }
  return (prob.mu / prob.nu) * (target_lambda / lambda_t);
}

std::pair<double, double> clip_targets(double lambda, double eps, double lambda0, double f0) {
  return {std::max(lambda, lambda0 / 1e3), std::max(eps, f0 / 1e8)};
}

int max_grid_size(double gap0, double target_eps, double r) {
  if (!(target_eps > 0.0) || !(gap0 > 0.0)) {
    throw std::invalid_argument("max_grid_size: need gap0 > 0 and eps > 0");
  }
  if (!(r > 0.0) || !(r < 1.0)) {
    throw std::invalid_argument("max_grid_size: need 0 < r < 1");
  }
  if (target_eps >= gap0) {
    return 0;
  }
  return static_cast<int>(std::ceil(std::log(target_eps / gap0) / std::log(1.0 - r)));
}

stepwise_certificate stepwise_progress_certificate(const primal_dual_state& state_t,
                                                   const primal_dual_state& state_t1,
                                                   const problem& prob, double target_lambda) {
  stepwise_certificate cert;
  if (state_t1.f_val > state_t.f_val) {
    return cert;  // monotonicity precondition failed; inequality not claimed
  }
  cert.applicable = true;
  const double lt = state_t.lambda;
  const double lt1 = state_t1.lambda;
  const double ratio_t = 1.0 - target_lambda / lt;
  const double ratio_t1 = 1.0 - target_lambda / lt1;
  const double amp = (state_t.alpha * prob.nu) / (lt * prob.mu);
  const double delta_step = ratio_t * ratio_t - amp * amp * ratio_t1 * ratio_t1;

  const auto bound_t = warm_start_bound(state_t, target_lambda, prob);
  const auto bound_t1 = warm_start_bound(state_t1, target_lambda, prob);
  const double lhs = bound_t1.gap_at_target - bound_t.gap_at_target;
  const double rhs = bound_t1.e_t - bound_t.e_t -
                     delta_step * state_t.zeta_sq_norm() / (2.0 * prob.nu);
  cert.slack = rhs - lhs;
  return cert;
}

std::string policy_name(policy_kind kind) {
  switch (kind) {
    case policy_kind::fast_path: return "fastpath";
    case policy_kind::simplified: return "simplified";
    case policy_kind::adaptive_r: return "adaptive";
    case policy_kind::geometric: return "geometric";
    case policy_kind::prescribed: return "prescribed";
    case policy_kind::active_set_control: return "sizecontrol";
  }
  return "unknown";
}

std::string termination_name(termination t) {
  switch (t) {
    case termination::reached_lambda: return "reached_lambda";
    case termination::target_gap_met: return "target_gap_met";
    case termination::budget_exceeded: return "budget_exceeded";
  }
  return "unknown";
}

path_policy path_policy::fast_path(double target_lambda, double target_eps, double r) {
  path_policy p;
  p.kind = policy_kind::fast_path;
  p.target_lambda = target_lambda;
  p.target_eps = target_eps;
  p.r = r;
  return p;
}

path_policy path_policy::simplified(double target_lambda, double target_eps, double r) {
  path_policy p = fast_path(target_lambda, target_eps, r);
  p.kind = policy_kind::simplified;
  return p;
}

path_policy path_policy::adaptive(double target_lambda, double target_eps, double c) {
  path_policy p = fast_path(target_lambda, target_eps);
  p.kind = policy_kind::adaptive_r;
  p.adaptive_c = c;
  return p;
}

path_policy path_policy::geometric(double target_lambda, double target_eps, int grid_size) {
  path_policy p = fast_path(target_lambda, target_eps);
  p.kind = policy_kind::geometric;
  p.grid_size = grid_size;
  return p;
}

path_policy path_policy::prescribed(std::vector<double> grid, double target_eps) {
  path_policy p;
  p.kind = policy_kind::prescribed;
  if (grid.empty()) {
    throw std::invalid_argument("path_policy::prescribed: empty grid");
  }
  p.target_lambda = grid.back();
  p.target_eps = target_eps;
  p.grid = std::move(grid);
  return p;
}

path_policy path_policy::size_control(double target_lambda, double target_eps,
                                      size_schedule s) {
  path_policy p = fast_path(target_lambda, target_eps);
  p.kind = policy_kind::active_set_control;
  p.schedule = std::move(s);
  return p;
}

std::vector<std::pair<double, double>> prescribed_grid_refine(const std::vector<double>& grid,
                                                              const path_policy& policy,
                                                              double mu_over_nu) {
  if (grid.empty()) {
    throw std::invalid_argument("prescribed_grid_refine: empty grid");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] < grid[i - 1]) || !(grid[i] > 0.0)) {
      throw std::invalid_argument("prescribed_grid_refine: grid must be strictly decreasing and positive");
    }
  }

  std::vector<std::pair<double, double>> out;
  out.emplace_back(grid[0], policy.target_eps);
  if (grid.size() == 1) {
    return out;
  }

  const bool contracts = policy.kind == policy_kind::fast_path ||
                         policy.kind == policy_kind::simplified ||
                         policy.kind == policy_kind::adaptive_r;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double segment_target = grid[i];
    if (contracts) {
      double current = grid[i - 1];
      while (true) {
        double r_step = policy.r > 0.0 ? policy.r : 0.42 * mu_over_nu;
        if (policy.kind == policy_kind::adaptive_r) {
          r_step = std::min(policy.adaptive_c * mu_over_nu * segment_target / current,
                            0.99 * mu_over_nu);
        }
        const double next = next_lambda_simplified(current, segment_target, r_step);
        if (next <= segment_target * (1.0 + kGridSnapRel)) {
          break;
        }
        out.emplace_back(next, simplified_tolerance(next, segment_target, policy.target_eps));
        current = next;
      }
    }
    out.emplace_back(segment_target, policy.target_eps);
  }
  return out;
}

}  // namespace contpath
