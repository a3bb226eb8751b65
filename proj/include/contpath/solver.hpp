#ifndef CONTPATH_SOLVER_HPP
#define CONTPATH_SOLVER_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "contpath/continuation.hpp"
#include "contpath/problem.hpp"
#include "contpath/screening.hpp"

namespace contpath {

enum class inner_method { cyclic_coordinate_descent, proximal_gradient };

struct inner_solver_config {
  inner_method method = inner_method::cyclic_coordinate_descent;
  int gap_check_every = 10;
  std::int64_t max_epochs = 100000;
  bool dynamic_screening = true;
  bool enforce_monotone_f = true;
  bool use_working_set = true;
  std::int64_t max_path_steps = 10000;
  double saturation_c = 1.0;        // proportionality constant of the saturation flag
  bool record_screen_masks = false; // keep per-step safe-screening masks in the result
};

struct solve_stats {
  std::int64_t epochs = 0;
  std::int64_t coordinate_updates = 0;
  std::int64_t gap_evaluations = 0;

  solve_stats& operator+=(const solve_stats& o) {
    epochs += o.epochs;
    coordinate_updates += o.coordinate_updates;
    gap_evaluations += o.gap_evaluations;
    return *this;
  }
};

enum class solve_status { converged, budget_exhausted };

struct subproblem_result {
  primal_dual_state state;
  solve_status status = solve_status::converged;
  solve_stats stats;
  // True when the gap certificate covers the full problem; restricted solves
  // certify the subproblem only.
  bool global_certificate = false;
};

using accept_fn = std::function<bool(const primal_dual_state&)>;

// One cyclic pass of coordinate descent over `active`, updating beta and the
// residual y - X beta in place. The primal objective never increases.
void cd_epoch(const problem& prob, Eigen::VectorXd& beta, Eigen::VectorXd& residual,
              double lambda, const std::vector<int>& active);

// beta <- ST(beta - step * X^T grad f(X beta), step * lambda). Requires
// step <= 1 / (nu * sigma_max(X)^2).
Eigen::VectorXd prox_grad_step(const problem& prob, const Eigen::VectorXd& beta,
                               double lambda, double step);

// Iterates the configured inner method from init_beta until the duality gap
// is <= eps and extra_accept (when given) passes, or the epoch budget runs
// out. `restrict_set` limits the solve to a feature subset (coordinates
// outside it are zeroed); `initial_screened` seeds the safe screened mask.
subproblem_result solve_subproblem(const problem& prob, Eigen::VectorXd init_beta,
                                   double lambda, double eps, const inner_solver_config& cfg,
                                   const std::vector<int>* restrict_set = nullptr,
                                   const accept_fn& extra_accept = {},
                                   const std::vector<char>* initial_screened = nullptr);

// Per-step certification records: stepwise-descent slack, realized contraction
// factor of the target gap, and the residual-decrease inequality.
struct certificate_record {
  int t = 0;
  bool descent_applicable = false;
  double descent_slack = 0.0;
  double contraction = 0.0;
  bool residual_decrease_ok = false;
  // sequential screening for this step's lambda could not improve further
  bool screening_saturated = false;
};

struct run_result {
  primal_dual_state final_state;
  path_trace trace;
  std::vector<certificate_record> certificates;
  std::vector<std::vector<char>> screen_masks;  // per step, when recorded
  solve_stats totals;
  double target_lambda = 0.0;  // effective targets after clipping
  double target_eps = 0.0;
  double requested_lambda = 0.0;
  double requested_eps = 0.0;
  bool lambda_clipped = false;
  bool eps_clipped = false;

  bool target_met() const {
    return trace.terminated_by != termination::budget_exceeded;
  }
};

using step_callback = std::function<void(const step_record&)>;

// Full continuation loop: start at beta = 0, lambda_0 = ||X^T grad f(0)||_inf,
// then alternate policy step, working-set solve and safe-screened correction
// until the target lambda is reached or the target gap is met early.
run_result run_path(const problem& prob, const path_policy& policy,
                    const inner_solver_config& cfg, const step_callback& on_step = {});

}  // namespace contpath

#endif  // CONTPATH_SOLVER_HPP
