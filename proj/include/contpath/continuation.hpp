#ifndef CONTPATH_CONTINUATION_HPP
#define CONTPATH_CONTINUATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contpath/active_control.hpp"
#include "contpath/problem.hpp"

namespace contpath {

// Warm-start decomposition of the gap at a smaller lambda:
//   V_nu <= Gap_lambda(beta_t, theta_t) - E_t(lambda) <= V_mu,
//   V_tau = ||zeta_t||^2 (1 - lambda/lambda_t)^2 / (2 tau),
//   E_t(lambda) = (lambda/lambda_t) Gap_t + (1 - lambda/lambda_t) Delta_t.
// Both sides collapse to an equality when mu = nu.
struct warm_start_bound_t {
  double e_t = 0.0;
  double v_mu = 0.0;
  double v_nu = 0.0;
  double gap_at_target = 0.0;
};

warm_start_bound_t warm_start_bound(const primal_dual_state& state, double lambda,
                                    const problem& prob);

// One fast-path step: lambda_{t+1} = lambda / (1 - sqrt(D(eps_t))) with
//   D(eps) = (lambda_t mu / (alpha_t nu))^2
//            [ (1 - r nu/mu)(1 - lambda/lambda_t)^2 - 2 nu eps / ||zeta_t||^2 ].
// Returns nullopt when D(eps_t) < 0 (shrink eps_t and retry); returns the
// target directly when ||zeta_t|| = 0. Result is clamped into
// [target_lambda, lambda_t] and snaps to the target within 1e-12 relative.
std::optional<double> next_lambda_fastpath(const primal_dual_state& state, double r,
                                           double eps_t, const problem& prob,
                                           double target_lambda);

// Tolerance that keeps D nonnegative by construction:
//   eps_t = 0.42 (||zeta_t||^2 / 2 nu)(1 - r nu/mu)(1 - lambda/lambda_t)^2.
double default_eps_fastpath(const primal_dual_state& state, double r, const problem& prob,
                            double target_lambda);

// E_{t+1} <= (1 - r) E_t + eps_t
bool stopping_condition_fastpath(double e_prev, double e_next, double eps_t, double r);

// (1 - lambda/lambda_{t+1})^2 = (1 - r)(1 - lambda/lambda_t)^2, solved for
// lambda_{t+1} and clamped into [target_lambda, lambda_t].
double next_lambda_simplified(double lambda_t, double target_lambda, double r);

// eps_{t+1} = (lambda_{t+1} / lambda) eps
double simplified_tolerance(double lambda_next, double target_lambda, double target_eps);

// r_t = (mu/nu)(lambda/lambda_t), non-decreasing along a decreasing path.
double adaptive_r(const problem& prob, double lambda_t, double target_lambda);

// Numerical-stability floors: (max(lambda, lambda0/1e3), max(eps, f0/1e8)).
std::pair<double, double> clip_targets(double lambda, double eps, double lambda0, double f0);

// Grid size sufficient for an eps-solution: ceil(log(eps/gap0) / log(1-r)),
// 0 when eps >= gap0.
int max_grid_size(double gap0, double target_eps, double r);

// Slack of the stepwise descent inequality
//   Gap_lambda(t+1) - Gap_lambda(t) <= E_{t+1} - E_t - delta_t ||zeta_t||^2/(2 nu),
//   delta_t = (1 - lambda/lambda_t)^2 - (alpha_t nu/(lambda_t mu))^2 (1 - lambda/lambda_{t+1})^2.
// Only applicable under the monotonicity condition f(X beta_{t+1}) <= f(X beta_t);
// a nonnegative slack certifies the step.
struct stepwise_certificate {
  bool applicable = false;
  double slack = 0.0;
};

stepwise_certificate stepwise_progress_certificate(const primal_dual_state& state_t,
                                                   const primal_dual_state& state_t1,
                                                   const problem& prob, double target_lambda);

enum class policy_kind {
  fast_path,
  simplified,
  adaptive_r,
  geometric,
  prescribed,
  active_set_control,
};

std::string policy_name(policy_kind kind);

// Which grid/stopping rule generates the (lambda_t, eps_t) sequences.
// r < 0 means "use the default 0.42 mu/nu at run time"; negative clip floors
// mean "auto" (lambda0/1e3 and f(0)/1e8).
struct path_policy {
  policy_kind kind = policy_kind::fast_path;
  double r = -1.0;
  double adaptive_c = 1.0;
  int grid_size = 100;
  double grid_ratio = -1.0;          // geometric; < 0 derives it from grid_size
  std::vector<double> grid;          // prescribed, strictly decreasing
  bool refine_prescribed = false;    // insert policy-demanded intermediate points
  size_schedule schedule;            // active_set_control
  double target_lambda = 0.0;
  double target_eps = 1e-6;
  double clip_lambda_floor = -1.0;
  double clip_eps_floor = -1.0;

  static path_policy fast_path(double target_lambda, double target_eps, double r = -1.0);
  static path_policy simplified(double target_lambda, double target_eps, double r = -1.0);
  static path_policy adaptive(double target_lambda, double target_eps, double c = 1.0);
  static path_policy geometric(double target_lambda, double target_eps, int grid_size = 100);
  static path_policy prescribed(std::vector<double> grid, double target_eps);
  static path_policy size_control(double target_lambda, double target_eps, size_schedule s);
};

// Expands a prescribed grid with the intermediate points the active policy
// demands between consecutive elements; every input point is kept with the
// policy's target tolerance and inserted points carry the rescaled tolerance.
std::vector<std::pair<double, double>> prescribed_grid_refine(const std::vector<double>& grid,
                                                              const path_policy& policy,
                                                              double mu_over_nu = 1.0);

// Per-step record of one accepted path state.
struct step_record {
  int t = 0;
  double lambda_t = 0.0;
  double eps_t = 0.0;
  std::int64_t inner_iterations = 0;
  double gap_local = 0.0;
  double gap_at_target = 0.0;
  double e_t = 0.0;
  double delta_t = 0.0;
  std::int64_t active_set_size = 0;
  std::int64_t working_set_size = 0;
  double f_val = 0.0;
  std::int64_t wall_nanoseconds = 0;
};

enum class termination { reached_lambda, target_gap_met, budget_exceeded };

std::string termination_name(termination t);

struct path_trace {
  std::vector<step_record> steps;
  termination terminated_by = termination::budget_exceeded;
};

}  // namespace contpath

#endif  // CONTPATH_CONTINUATION_HPP
