// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances and instance sizes are pinned here and nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "contpath/active_control.hpp"
#include "contpath/continuation.hpp"
#include "contpath/data_io.hpp"
#include "contpath/problem.hpp"
#include "contpath/rng.hpp"
#include "contpath/screening.hpp"
#include "contpath/solver.hpp"
#include "oracles.hpp"

using namespace contpath;

namespace {

int g_failures = 0;

class criterion {
 public:
  criterion(int number, std::string name)
      : number_(number), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

  void fail(const std::string& why) {
    ok_ = false;
    if (detail_.empty()) {
      detail_ = why;
    }
  }

  void require(bool condition, const std::string& why) {
    if (!condition) {
      fail(why);
    }
  }

  void finish(double runtime_budget_s) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (elapsed >= runtime_budget_s) {
      fail("runtime " + std::to_string(elapsed) + "s exceeds budget " +
           std::to_string(runtime_budget_s) + "s");
    }
    std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", ok_ ? "PASS" : "FAIL", number_,
                name_.c_str(), elapsed, detail_.empty() ? "" : " -- ", detail_.c_str());
    std::fflush(stdout);
    if (!ok_) {
      ++g_failures;
    }
  }

 private:
  int number_;
  std::string name_;
  std::string detail_;
  bool ok_ = true;
  std::chrono::steady_clock::time_point start_;
};

run_result certified_fastpath_run(const problem& prob) {
  path_policy policy = path_policy::fast_path(prob.lambda_max / 100.0, 1e-6, 0.42);
  policy.clip_lambda_floor = 0.0;  // the stated epsilon is the contract here
  policy.clip_eps_floor = 0.0;
  inner_solver_config cfg;
  return run_path(prob, policy, cfg);
}

run_result grid_run(const problem& prob, int grid_points, bool screening, bool working_set) {
  std::vector<double> grid;
  const double target = prob.lambda_max / 100.0;
  for (int t = 0; t < grid_points; ++t) {
    grid.push_back(prob.lambda_max *
                   std::pow(target / prob.lambda_max,
                            static_cast<double>(t) / (grid_points - 1)));
  }
  path_policy policy = path_policy::prescribed(grid, 1e-6);
  policy.clip_lambda_floor = 0.0;
  policy.clip_eps_floor = 0.0;
  inner_solver_config cfg;
  cfg.dynamic_screening = screening;
  cfg.use_working_set = working_set;
  return run_path(prob, policy, cfg);
}

std::string trace_bytes(const run_result& res) {
  trace_meta meta;
  meta.policy = "acceptance";
  meta.eps = res.target_eps;
  meta.lambda = res.target_lambda;
  meta.dataset = "synthetic(500,1000,0.8,1.0,seed=0)";
  meta.lambda_requested = res.requested_lambda;
  meta.eps_requested = res.requested_eps;
  meta.terminated_by = termination_name(res.trace.terminated_by);
  return trace_to_json(res, meta, /*include_timings=*/false);
}

// 1. Linear-rate certification on the reference synthetic regime.
run_result criterion_1(const problem& prob) {
  criterion c(1, "linear-rate certification (fast path, r = 0.42)");
  const run_result run = certified_fastpath_run(prob);
  const double r = 0.42;
  c.require(run.target_met(), "run did not meet its target");
  c.require(run.trace.steps.size() >= 2, "path too short to certify");
  const double gap0 = run.trace.steps.front().gap_at_target;
  for (std::size_t i = 1; i < run.trace.steps.size(); ++i) {
    const double prev = run.trace.steps[i - 1].gap_at_target;
    const double next = run.trace.steps[i].gap_at_target;
    if (next > (1.0 - r) * prev + 1e-9 * gap0) {
      c.fail("contraction violated at step " + std::to_string(i));
      break;
    }
  }
  const double final_gap = run.trace.steps.back().gap_at_target;
  c.require(final_gap <= 1e-6, "final gap " + std::to_string(final_gap) + " > 1e-6");
  const int bound = max_grid_size(gap0, 1e-6, r);
  c.require(static_cast<int>(run.trace.steps.size()) - 1 <= bound,
            "step count exceeds the max grid size bound " + std::to_string(bound));
  c.finish(60.0);
  return run;
}

// 2. Warm-start sandwich on 500 random triples.
void criterion_2() {
  criterion c(2, "warm-start sandwich on 500 random triples");
  rng gen(2024);
  int done = 0;
  while (done < 500) {
    const int n = 5 + static_cast<int>(gen.below(26));  // n <= 30
    const int p = 5 + static_cast<int>(gen.below(46));  // p <= 50
    const problem prob = oracles::random_problem(gen, n, p);
    if (prob.lambda_max <= 0.0) {
      continue;
    }
    const double lambda_t = prob.lambda_max * (0.15 + 0.8 * gen.uniform01());
    const primal_dual_state state =
        oracles::cd_oracle(prob, lambda_t, 1e-6, static_cast<long>(gen.below(9)));
    const double lambda = lambda_t * (0.05 + 0.9 * gen.uniform01());
    const warm_start_bound_t b = warm_start_bound(state, lambda, prob);
    const double mid = b.gap_at_target - b.e_t;
    const double slack = 1e-9 * (1.0 + std::abs(b.gap_at_target));
    if (!(b.v_nu <= mid + slack) || !(mid <= b.v_mu + slack)) {
      c.fail("sandwich violated on triple " + std::to_string(done));
      break;
    }
    if (std::abs(mid - b.v_mu) > slack) {  // mu = nu: equality form
      c.fail("equality form violated on triple " + std::to_string(done));
      break;
    }
    ++done;
  }
  c.finish(10.0);
}

// 3. Screening safety: dynamic rule and sequential support-path thresholds.
void criterion_3() {
  criterion c(3, "gap-safe and support-path screening safety (200 instances)");
  rng gen(3030);
  int done = 0;
  long checked = 0;
  while (done < 200) {
    const int n = 5 + static_cast<int>(gen.below(16));  // n <= 20
    const int p = 5 + static_cast<int>(gen.below(26));  // p <= 30
    const problem prob = oracles::random_problem(gen, n, p);
    if (prob.lambda_max <= 0.0) {
      continue;
    }
    const double lambda = prob.lambda_max * (0.1 + 0.5 * gen.uniform01());
    const primal_dual_state oracle = oracles::cd_oracle(prob, lambda, 1e-14);
    for (const double gap_level : {1e-2, 1e-6, 1e-12}) {
      const primal_dual_state iterate = oracles::cd_oracle(prob, lambda, gap_level);
      const screening_report report = gap_safe_screen(prob, iterate, lambda);
      for (Eigen::Index j = 0; j < prob.p(); ++j) {
        ++checked;
        if (report.screened[static_cast<std::size_t>(j)] &&
            std::abs(oracle.beta[j]) > 1e-8) {
          c.fail("dynamic rule excluded an active feature");
        }
      }
    }
    // sequential step: state at lambda_t screens for lambda_next
    const double lambda_t = prob.lambda_max * 0.6;
    const double lambda_next = lambda;
    if (lambda_next < lambda_t) {
      const primal_dual_state state_t = oracles::cd_oracle(prob, lambda_t, 1e-6);
      const double threshold = support_path_threshold(state_t, lambda_next, prob);
      const double radius = sequential_radius(state_t, lambda_next, prob);
      const Eigen::VectorXd d = feature_distances(prob, state_t.theta);
      for (Eigen::Index j = 0; j < prob.p(); ++j) {
        ++checked;
        if ((d[j] > threshold || d[j] > radius) && std::abs(oracle.beta[j]) > 1e-8) {
          c.fail("sequential rule excluded an active feature");
        }
      }
    }
    ++done;
  }
  c.require(checked > 10000, "too few screening decisions checked");
  c.finish(30.0);
}

// 4. Active-set size control at exact solutions.
void criterion_4() {
  criterion c(4, "active-set size control (reach and keep-out thresholds)");
  rng gen(4040);
  int tested = 0;
  int attempts = 0;
  while (tested < 50 && attempts < 3000) {
    ++attempts;
    const int n = 6 + static_cast<int>(gen.below(15));
    const int p = 6 + static_cast<int>(gen.below(25));
    const problem prob = oracles::random_problem(gen, n, p);
    if (prob.lambda_max <= 0.0) {
      continue;
    }
    const double lambda_t = prob.lambda_max * (0.35 + 0.3 * gen.uniform01());
    const primal_dual_state state = oracles::cd_oracle(prob, lambda_t, 1e-13);
    if (state.gap_local > 1e-13) {
      continue;
    }
    const screening_report report = gap_safe_screen(prob, state, lambda_t);
    const int p_t = static_cast<int>(report.active.size()) + 1;
    if (p_t > prob.p()) {
      continue;
    }
    // ties around the p_t-th ordered distance are excluded by construction
    std::vector<double> sorted(report.distances.data(),
                               report.distances.data() + prob.p());
    std::sort(sorted.begin(), sorted.end());
    if (!std::isfinite(sorted[static_cast<std::size_t>(p_t - 1)])) {
      continue;
    }
    if (p_t >= 2 && sorted[p_t - 1] - sorted[p_t - 2] < 1e-6) {
      continue;
    }
    if (p_t < prob.p() && sorted[p_t] - sorted[p_t - 1] < 1e-6) {
      continue;
    }
    const double target = lambda_t / 100.0;
    const auto step = next_lambda_for_size(state, p_t, prob, target);
    if (!step || !(step->reach_at < lambda_t) || !(step->reach_at > target)) {
      continue;
    }
    const Eigen::VectorXd d = feature_distances(prob, state.theta);
    auto active_count = [&](double lam) {
      const double radius = sequential_radius(state, lam, prob);
      int count = 0;
      for (Eigen::Index j = 0; j < prob.p(); ++j) {
        if (d[j] <= radius) {
          ++count;
        }
      }
      return count;
    };
    if (active_count(step->reach_at) < p_t) {
      c.fail("reach_at missed the requested size at instance " + std::to_string(tested));
    }
    const double above = step->keep_below * (1.0 + 1e-6);
    if (above < lambda_t && active_count(above) >= p_t) {
      c.fail("keep_below failed to exclude at instance " + std::to_string(tested));
    }
    ++tested;
  }
  c.require(tested == 50, "only " + std::to_string(tested) + "/50 instances constructed");
  c.finish(30.0);
}

// 5. Closed-form cross-check on the identity design.
void criterion_5() {
  criterion c(5, "exact-step cross-check on the identity design");
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd y(2);
  y << 2.0, 0.5;
  const problem prob = problem::quadratic(design_matrix::dense(x), y);
  const primal_dual_state state = oracles::cd_oracle(prob, 1.0, 1e-14);
  const double theta_norm = std::sqrt(1.25);
  const double expected_lambda = theta_norm / (theta_norm + 0.5);

  const auto step = next_lambda_for_size(state, 2, prob, 0.05);
  c.require(step.has_value(), "size step reported infeasible");
  if (step) {
    c.require(std::abs(step->reach_at - expected_lambda) <= 1e-10,
              "lambda_{t+1} missed sqrt(1.25)/(sqrt(1.25)+0.5)");
    const double radius = sequential_radius(state, step->reach_at, prob);
    c.require(std::abs(radius - 0.5) <= 1e-10, "sequential radius missed d_2 = 0.5");
  }
  c.finish(5.0);
}

// 6. Zero-gap certificate at and above lambda_max.
void criterion_6() {
  criterion c(6, "lambda_max zero-gap certificate (100 instances)");
  rng gen(6060);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + static_cast<int>(gen.below(26));
    const int p = 5 + static_cast<int>(gen.below(26));
    const problem prob = oracles::random_problem(gen, n, p);
    const double y_sq = prob.y.squaredNorm();
    for (const double factor : {1.0, 1.5}) {
      const double lambda = std::max(factor * prob.lambda_max, 1e-12);
      const primal_dual_state s =
          dual_point(prob, Eigen::VectorXd::Zero(prob.p()), lambda);
      if (s.gap_local > 1e-12 * (1.0 + y_sq)) {
        c.fail("certificate failed on trial " + std::to_string(trial));
      }
    }
  }
  c.finish(5.0);
}

// 7. Quadratic loss equality f = ||grad f||^2 / 2.
void criterion_7() {
  criterion c(7, "gradient-objective equality for the quadratic loss");
  rng gen(7070);
  const problem prob = oracles::random_problem(gen, 20, 30);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd beta = oracles::random_vector(gen, 30, 2.0);
    const Eigen::VectorXd z = prob.X.multiply(beta);
    const double f = 0.5 * (prob.y - z).squaredNorm();
    const Eigen::VectorXd grad = z - prob.y;
    if (std::abs(f - 0.5 * grad.squaredNorm()) > 1e-10 * (1.0 + f)) {
      c.fail("equality violated on trial " + std::to_string(trial));
    }
  }
  c.finish(5.0);
}

// 8. Stepwise-descent certificates along the criterion-1 run.
void criterion_8(const run_result& run) {
  criterion c(8, "stepwise descent slack along the certified run");
  c.require(!run.certificates.empty(), "no certificates recorded");
  for (const certificate_record& cert : run.certificates) {
    if (!cert.descent_applicable) {
      // enforce_monotone_f makes the precondition hold at every accepted step
      c.fail("monotonicity precondition failed at step " + std::to_string(cert.t));
      break;
    }
    if (cert.descent_slack < -1e-9) {
      c.fail("negative slack at step " + std::to_string(cert.t));
      break;
    }
  }
  c.finish(10.0);
}

// 9. Solver equivalence across methods, screening and working sets.
void criterion_9() {
  criterion c(9, "solver equivalence across 8 configurations (50 instances)");
  rng gen(9090);
  int done = 0;
  while (done < 50) {
    const int n = 10 + static_cast<int>(gen.below(31));  // n <= 40
    const int p = 10 + static_cast<int>(gen.below(51));  // p <= 60
    const problem prob = oracles::random_problem(gen, n, p);
    if (prob.lambda_max <= 0.0) {
      continue;
    }
    path_policy policy = path_policy::fast_path(prob.lambda_max / 10.0, 1e-10);
    policy.clip_lambda_floor = 0.0;
    policy.clip_eps_floor = 0.0;
    Eigen::VectorXd reference;
    for (const inner_method method :
         {inner_method::cyclic_coordinate_descent, inner_method::proximal_gradient}) {
      for (const bool screening : {true, false}) {
        for (const bool ws : {true, false}) {
          inner_solver_config cfg;
          cfg.method = method;
          cfg.dynamic_screening = screening;
          cfg.use_working_set = ws;
          cfg.max_epochs = 500000;
          const run_result res = run_path(prob, policy, cfg);
          if (!res.target_met()) {
            c.fail("a configuration failed to converge on instance " +
                   std::to_string(done));
            continue;
          }
          if (reference.size() == 0) {
            reference = res.final_state.beta;
          } else if ((res.final_state.beta - reference).lpNorm<Eigen::Infinity>() > 1e-4) {
            c.fail("coefficient mismatch above 1e-4 on instance " + std::to_string(done));
          }
        }
      }
    }
    ++done;
  }
  c.finish(60.0);
}

// 10. Coarse-grid efficiency with certified per-point gaps.
void criterion_10(const problem& prob, std::vector<run_result>& grid_runs_out) {
  criterion c(10, "screening + working sets cut coordinate updates on both grids");
  for (const int grid_points : {10, 100}) {
    std::int64_t updates_pruned = -1;
    std::int64_t updates_plain = -1;
    for (const bool screening : {true, false}) {
      for (const bool ws : {true, false}) {
        const run_result res = grid_run(prob, grid_points, screening, ws);
        if (!res.target_met()) {
          c.fail("grid run did not converge (T=" + std::to_string(grid_points) + ")");
          continue;
        }
        if (static_cast<int>(res.trace.steps.size()) != grid_points) {
          c.fail("grid point count mismatch (T=" + std::to_string(grid_points) + ")");
        }
        for (std::size_t i = 1; i < res.trace.steps.size(); ++i) {
          if (res.trace.steps[i].gap_local > res.trace.steps[i].eps_t) {
            c.fail("uncertified grid point at step " + std::to_string(i));
            break;
          }
        }
        if (screening && ws) {
          updates_pruned = res.totals.coordinate_updates;
          grid_runs_out.push_back(res);
        }
        if (!screening && !ws) {
          updates_plain = res.totals.coordinate_updates;
        }
      }
    }
    if (!(updates_pruned >= 0 && updates_plain >= 0 && updates_pruned < updates_plain)) {
      c.fail("pruned configuration did not use strictly fewer updates (T=" +
             std::to_string(grid_points) + ")");
    }
  }
  c.finish(300.0);
}

// 11. Bit-identical reruns of criteria 1 and 10.
void criterion_11(const problem& prob, const run_result& fastpath_run,
                  const std::vector<run_result>& grid_runs) {
  criterion c(11, "bit-identical traces on rerun (timings zeroed)");
  const run_result rerun = certified_fastpath_run(prob);
  c.require(trace_bytes(rerun) == trace_bytes(fastpath_run),
            "fast-path rerun produced a different trace");
  if (grid_runs.size() == 2) {
    const run_result g10 = grid_run(prob, 10, true, true);
    const run_result g100 = grid_run(prob, 100, true, true);
    c.require(trace_bytes(g10) == trace_bytes(grid_runs[0]), "T=10 rerun differs");
    c.require(trace_bytes(g100) == trace_bytes(grid_runs[1]), "T=100 rerun differs");
  } else {
    c.fail("grid runs unavailable for comparison");
  }
  c.finish(300.0);
}

}  // namespace

int main() {
  std::printf("acceptance suite: synthetic desk-scale checks\n");
  const problem reference = generate_synthetic(500, 1000, 0.8, 1.0, 0);
  const run_result fastpath_run = criterion_1(reference);
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8(fastpath_run);
  criterion_9();
  std::vector<run_result> grid_runs;
  criterion_10(reference, grid_runs);
  criterion_11(reference, fastpath_run, grid_runs);

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
