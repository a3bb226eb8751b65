#include "contpath/validate.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "contpath/active_control.hpp"
#include "contpath/continuation.hpp"
#include "contpath/data_io.hpp"
#include "contpath/problem.hpp"
#include "contpath/rng.hpp"
#include "contpath/screening.hpp"
#include "contpath/solver.hpp"

namespace contpath {

namespace {

problem small_problem(rng& gen, int n_max, int p_max) {
  const int n = 4 + static_cast<int>(gen.below(static_cast<std::uint64_t>(n_max - 3)));
  const int p = 4 + static_cast<int>(gen.below(static_cast<std::uint64_t>(p_max - 3)));
  const double zero_frac = 0.3 + 0.5 * gen.uniform01();
  return generate_synthetic(n, p, zero_frac, 1.0, gen.next_u64());
}

primal_dual_state rough_iterate(const problem& prob, double lambda, int epochs) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(prob.p());
  Eigen::VectorXd residual = prob.y - prob.X.multiply(beta);
  std::vector<int> active;
  for (Eigen::Index j = 0; j < prob.p(); ++j) {
    if (prob.X.col_norm(j) > 0.0) {
      active.push_back(static_cast<int>(j));
    }
  }
  for (int e = 0; e < epochs; ++e) {
    cd_epoch(prob, beta, residual, lambda, active);
  }
  return dual_point(prob, beta, lambda);
}

subproblem_result precise_solve(const problem& prob, const Eigen::VectorXd& init,
                                double lambda, double eps) {
  inner_solver_config cfg;
  cfg.gap_check_every = 1;
  cfg.max_epochs = 200000;
  return solve_subproblem(prob, init, lambda, eps, cfg);
}

void check_warm_start_bound(validation_suite& suite, std::uint64_t seed) {
  rng gen(seed);
  const problem prob = small_problem(gen, 30, 50);
  if (prob.lambda_max <= 0.0) {
    return;
  }
  const double lambda_t = prob.lambda_max * (0.2 + 0.7 * gen.uniform01());
  const primal_dual_state state =
      rough_iterate(prob, lambda_t, static_cast<int>(gen.below(8)));
  const double target = lambda_t * (0.1 + 0.85 * gen.uniform01());
  const warm_start_bound_t b = warm_start_bound(state, target, prob);
  const double mid = b.gap_at_target - b.e_t;
  const double slack = 1e-9 * (1.0 + std::abs(b.gap_at_target));
  ++suite.trials;
  bool ok = b.v_nu <= mid + slack && mid <= b.v_mu + slack;
  if (prob.mu == prob.nu) {
    ok = ok && std::abs(mid - b.v_mu) <= slack;
  }
  if (!ok) {
    ++suite.violations;
    std::ostringstream os;
    os << "warm-start sandwich violated (seed " << seed << ")";
    suite.messages.push_back(os.str());
  }
}

void check_stepwise_descent(validation_suite& suite, std::uint64_t seed) {
  rng gen(seed);
  const problem prob = small_problem(gen, 30, 50);
  if (prob.lambda_max <= 0.0) {
    return;
  }
  const double target = prob.lambda_max / 50.0;
  const double lambda_t = prob.lambda_max * 0.5;
  const double lambda_t1 = lambda_t * (0.3 + 0.6 * gen.uniform01());
  const primal_dual_state s_t = precise_solve(prob, Eigen::VectorXd::Zero(prob.p()),
                                              lambda_t, 1e-8)
                                    .state;
  subproblem_result next = precise_solve(prob, s_t.beta, std::max(lambda_t1, target), 1e-8);
  const stepwise_certificate cert =
      stepwise_progress_certificate(s_t, next.state, prob, target);
  ++suite.trials;
  if (cert.applicable && cert.slack < -1e-9 * (1.0 + std::abs(cert.slack))) {
    ++suite.violations;
    std::ostringstream os;
    os << "stepwise descent slack " << cert.slack << " (seed " << seed << ")";
    suite.messages.push_back(os.str());
  }
}

void check_fastpath_contraction(validation_suite& suite, std::uint64_t seed) {
  rng gen(seed);
  const problem prob = small_problem(gen, 30, 50);
  if (prob.lambda_max <= 0.0) {
    return;
  }
  const double r = 0.42;
  path_policy policy =
      path_policy::fast_path(prob.lambda_max / 40.0, std::max(1e-8, 1e-10), r);
  inner_solver_config cfg;
  cfg.gap_check_every = 1;
  const run_result res = run_path(prob, policy, cfg);
  ++suite.trials;
  if (!res.target_met()) {
    ++suite.violations;
    suite.messages.push_back("fastpath run did not converge (seed " + std::to_string(seed) +
                             ")");
    return;
  }
  const double gap0 = res.trace.steps.front().gap_at_target;
  for (std::size_t i = 1; i < res.trace.steps.size(); ++i) {
    const double prev = res.trace.steps[i - 1].gap_at_target;
    const double next = res.trace.steps[i].gap_at_target;
    if (next > (1.0 - r) * prev + 1e-9 * gap0) {
      ++suite.violations;
      std::ostringstream os;
      os << "contraction failed at step " << i << " (seed " << seed << ")";
      suite.messages.push_back(os.str());
      return;
    }
  }
}

void check_screening(validation_suite& suite, std::uint64_t seed) {
  rng gen(seed);
  const problem prob = small_problem(gen, 20, 30);
  if (prob.lambda_max <= 0.0) {
    return;
  }
  const double lambda = prob.lambda_max * (0.05 + 0.4 * gen.uniform01());
  const primal_dual_state oracle =
      precise_solve(prob, Eigen::VectorXd::Zero(prob.p()), lambda, 1e-14).state;
  ++suite.trials;
  for (double gap_level : {1e-2, 1e-6}) {
    const primal_dual_state iterate =
        precise_solve(prob, Eigen::VectorXd::Zero(prob.p()), lambda, gap_level).state;
    const screening_report report = gap_safe_screen(prob, iterate, lambda);
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      if (report.screened[static_cast<std::size_t>(j)] && std::abs(oracle.beta[j]) > 1e-8) {
        ++suite.violations;
        std::ostringstream os;
        os << "false exclusion of feature " << j << " at gap " << gap_level << " (seed "
           << seed << ")";
        suite.messages.push_back(os.str());
        return;
      }
    }
  }
}

void check_membership(validation_suite& suite, std::uint64_t seed) {
  rng gen(seed);
  const problem prob = small_problem(gen, 20, 30);
  if (prob.lambda_max <= 0.0) {
    return;
  }
  const double lambda_t = prob.lambda_max * 0.5;
  const double target = prob.lambda_max / 200.0;
  const primal_dual_state state =
      precise_solve(prob, Eigen::VectorXd::Zero(prob.p()), lambda_t, 1e-13).state;
  const screening_report report = gap_safe_screen(prob, state, lambda_t);
  const int p_t = static_cast<int>(report.active.size()) + 1;
  if (p_t > prob.p()) {
    return;
  }
  const auto step = next_lambda_for_size(state, p_t, prob, target);
  if (!step) {
    return;
  }
  ++suite.trials;
  auto active_count = [&](double lam) {
    const double radius = sequential_radius(state, lam, prob);
    const Eigen::VectorXd d = feature_distances(prob, state.theta);
    int count = 0;
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      if (d[j] <= radius) {
        ++count;
      }
    }
    return count;
  };
  if (step->reach_at < state.lambda && active_count(step->reach_at) < p_t) {
    ++suite.violations;
    suite.messages.push_back("reach_at undershot p_t (seed " + std::to_string(seed) + ")");
  }
  const double above = step->keep_below * (1.0 + 1e-6);
  if (above < state.lambda && active_count(above) >= p_t) {
    ++suite.violations;
    suite.messages.push_back("keep_below overshot p_t (seed " + std::to_string(seed) + ")");
  }
}

}  // namespace

long validation_report::total_violations() const {
  long total = 0;
  for (const auto& s : suites) {
    total += s.violations;
  }
  return total;
}

validation_report run_validation(int trials, std::uint64_t seed, std::ostream* log) {
  validation_report report;
  report.suites = {
      {"warm_start_sandwich", 0, 0, {}},   {"descent_slack", 0, 0, {}},
      {"fastpath_contraction", 0, 0, {}}, {"screening_safety", 0, 0, {}},
      {"active_set_membership", 0, 0, {}},
  };
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    check_warm_start_bound(report.suites[0], s);
    check_stepwise_descent(report.suites[1], s);
    if (i < std::max(1, trials / 5)) {
      check_fastpath_contraction(report.suites[2], s);  // path runs are the expensive suite
    }
    check_screening(report.suites[3], s);
    check_membership(report.suites[4], s);
  }
  if (log != nullptr) {
    for (const auto& s : report.suites) {
      (*log) << s.name << ": " << (s.trials - s.violations) << "/" << s.trials << " passed";
      if (s.violations > 0) {
        (*log) << ", " << s.violations << " VIOLATIONS";
      }
      (*log) << '\n';
      for (const auto& m : s.messages) {
        (*log) << "  " << m << '\n';
      }
    }
  }
  return report;
}

}  // namespace contpath
