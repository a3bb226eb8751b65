#include "contpath/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace contpath {

namespace {

constexpr double kSnapRel = 1e-12;

primal_dual_state state_from_residual(const problem& prob, const Eigen::VectorXd& beta,
                                      const Eigen::VectorXd& residual, double lambda,
                                      double corr_inf) {
  primal_dual_state s;
  s.lambda = lambda;
  s.beta = beta;
  s.alpha = std::max(lambda, corr_inf);
  s.f_val = 0.5 * residual.squaredNorm();
  if (s.alpha > 0.0) {
    s.theta = residual / s.alpha;
  } else {
    s.theta = Eigen::VectorXd::Zero(prob.n());
  }
  s.zeta = -lambda * s.theta;
  const double primal = s.f_val + lambda * beta.lpNorm<1>();
  const double dual =
      0.5 * prob.y.squaredNorm() - 0.5 * (prob.y - lambda * s.theta).squaredNorm();
  s.gap_local = detail::clamp_gap(primal - dual);
  s.delta_t = s.f_val - 0.5 * s.zeta.squaredNorm();
  return s;
}

// E_t(target) of a state, the optimization error term of the warm-start bound.
double error_term(const primal_dual_state& s, double target_lambda) {
  const double ratio = target_lambda / s.lambda;
  return ratio * s.gap_local + (1.0 - ratio) * s.delta_t;
}

struct inner_solver {
  const problem& prob;
  const inner_solver_config& cfg;
  double lambda;
  Eigen::VectorXd beta;
  Eigen::VectorXd residual;
  std::vector<char> screened;
  std::vector<int> active;
  const std::vector<int>* restrict_set;
  solve_stats stats;
  double prox_step = 0.0;

  inner_solver(const problem& p, Eigen::VectorXd init, double lam,
               const inner_solver_config& c, const std::vector<int>* restrict,
               const std::vector<char>* initial_screened)
      : prob(p), cfg(c), lambda(lam), beta(std::move(init)), restrict_set(restrict) {
    if (beta.size() != prob.p()) {
      throw std::invalid_argument("solve_subproblem: init beta has wrong length");
    }
    screened.assign(static_cast<std::size_t>(prob.p()), 0);
    if (initial_screened != nullptr) {
      if (initial_screened->size() != screened.size()) {
        throw std::invalid_argument("solve_subproblem: screened mask has wrong length");
      }
      screened = *initial_screened;
    }
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      if (prob.X.col_norm(j) == 0.0) {
        screened[static_cast<std::size_t>(j)] = 1;  // zero column: permanently out
      }
    }
    if (restrict_set != nullptr) {
      std::vector<char> keep(static_cast<std::size_t>(prob.p()), 0);
      for (int j : *restrict_set) {
        if (j < 0 || j >= prob.p()) {
          throw std::invalid_argument("solve_subproblem: restrict index out of range");
        }
        keep[static_cast<std::size_t>(j)] = 1;
      }
      for (Eigen::Index j = 0; j < prob.p(); ++j) {
        if (!keep[static_cast<std::size_t>(j)]) {
          beta[j] = 0.0;  // subproblem variables outside the set are fixed at zero
        }
      }
    }
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      if (screened[static_cast<std::size_t>(j)]) {
        beta[j] = 0.0;
      }
    }
    rebuild_active();
    refresh_residual();
    if (cfg.method == inner_method::proximal_gradient) {
      const double sigma = prob.X.spectral_norm();
      prox_step = sigma > 0.0 ? 1.0 / (prob.nu * sigma * sigma) : 1.0;
    }
  }

  void rebuild_active() {
    active.clear();
    if (restrict_set != nullptr) {
      for (int j : *restrict_set) {
        if (!screened[static_cast<std::size_t>(j)]) {
          active.push_back(j);
        }
      }
      std::sort(active.begin(), active.end());
      active.erase(std::unique(active.begin(), active.end()), active.end());
    } else {
      for (Eigen::Index j = 0; j < prob.p(); ++j) {
        if (!screened[static_cast<std::size_t>(j)]) {
          active.push_back(static_cast<int>(j));
        }
      }
    }
  }

  void refresh_residual() { residual = prob.y - prob.X.multiply(beta); }

  // Dual-scaling correlations: full pass for global solves (reused by the
  // screening rule), restricted max for working-set solves.
  primal_dual_state evaluate(Eigen::VectorXd* corr_out) {
    refresh_residual();
    ++stats.gap_evaluations;
    if (restrict_set == nullptr) {
      Eigen::VectorXd corr = prob.X.correlations(residual);
      const double corr_inf = corr.size() > 0 ? corr.cwiseAbs().maxCoeff() : 0.0;
      if (corr_out != nullptr) {
        *corr_out = std::move(corr);
      }
      return state_from_residual(prob, beta, residual, lambda, corr_inf);
    }
    double corr_inf = 0.0;
    for (int j : *restrict_set) {
      corr_inf = std::max(corr_inf, std::abs(prob.X.col_dot(j, residual)));
    }
    return state_from_residual(prob, beta, residual, lambda, corr_inf);
  }

  // Gap-safe dynamic screening off the evaluation just performed. Newly
  // screened coordinates are frozen at zero.
  void dynamic_screen(const primal_dual_state& s, const Eigen::VectorXd& corr) {
    const double radius = std::sqrt(2.0 * prob.nu * std::max(s.gap_local, 0.0)) / lambda;
    bool changed = false;
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      const std::size_t uj = static_cast<std::size_t>(j);
      if (screened[uj]) {
        continue;
      }
      const double norm = prob.X.col_norm(j);
      const double dist = (1.0 - std::abs(corr[j]) / s.alpha) / norm;
      if (dist > radius) {
        screened[uj] = 1;
        changed = true;
        if (beta[j] != 0.0) {
          prob.X.add_col(j, beta[j], residual);
          beta[j] = 0.0;
        }
      }
    }
    if (changed) {
      rebuild_active();
    }
  }

  void epoch() {
    if (cfg.method == inner_method::cyclic_coordinate_descent) {
      cd_epoch(prob, beta, residual, lambda, active);
    } else {
      Eigen::VectorXd corr = prob.X.correlations(residual);
      for (int j : active) {
        beta[j] = soft_threshold(beta[j] + prox_step * corr[j], prox_step * lambda);
      }
      refresh_residual();
    }
    ++stats.epochs;
    stats.coordinate_updates += static_cast<std::int64_t>(active.size());
  }
};

}  // namespace

void cd_epoch(const problem& prob, Eigen::VectorXd& beta, Eigen::VectorXd& residual,
              double lambda, const std::vector<int>& active) {
  for (int j : active) {
    const double norm = prob.X.col_norm(j);
    if (norm == 0.0) {
      beta[j] = 0.0;
      continue;
    }
    const double nj2 = norm * norm;
    const double g = prob.X.col_dot(j, residual);
    const double old = beta[j];
    const double candidate = soft_threshold(old + g / nj2, lambda / nj2);
    if (candidate != old) {
      prob.X.add_col(j, old - candidate, residual);
      beta[j] = candidate;
    }
  }
}

Eigen::VectorXd prox_grad_step(const problem& prob, const Eigen::VectorXd& beta,
                               double lambda, double step) {
  if (beta.size() != prob.p()) {
    throw std::invalid_argument("prox_grad_step: beta has wrong length");
  }
  const double sigma = prob.X.spectral_norm();
  if (sigma > 0.0 && step > (1.0 + 1e-9) / (prob.nu * sigma * sigma)) {
    throw std::invalid_argument("prox_grad_step: step exceeds 1 / (nu sigma_max^2)");
  }
  const Eigen::VectorXd corr = prob.X.correlations(prob.y - prob.X.multiply(beta));
  Eigen::VectorXd out(prob.p());
  for (Eigen::Index j = 0; j < prob.p(); ++j) {
    out[j] = soft_threshold(beta[j] + step * corr[j], step * lambda);
  }
  return out;
}

subproblem_result solve_subproblem(const problem& prob, Eigen::VectorXd init_beta,
                                   double lambda, double eps, const inner_solver_config& cfg,
                                   const std::vector<int>* restrict_set,
                                   const accept_fn& extra_accept,
                                   const std::vector<char>* initial_screened) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("solve_subproblem: lambda must be positive");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("solve_subproblem: eps must be positive");
  }
  if (cfg.gap_check_every < 1 || cfg.max_epochs < 1) {
    throw std::invalid_argument("solve_subproblem: need gap_check_every >= 1 and max_epochs >= 1");
  }
  inner_solver solver(prob, std::move(init_beta), lambda, cfg, restrict_set,
                      initial_screened);
  const bool screening = cfg.dynamic_screening && restrict_set == nullptr;

  subproblem_result out;
  out.global_certificate = restrict_set == nullptr;

  Eigen::VectorXd corr;
  while (true) {
    primal_dual_state s = solver.evaluate(screening ? &corr : nullptr);
    const bool accepted = s.gap_local <= eps && (!extra_accept || extra_accept(s));
    if (accepted) {
      out.state = std::move(s);
      out.status = solve_status::converged;
      out.stats = solver.stats;
      return out;
    }
    if (solver.stats.epochs >= cfg.max_epochs) {
      out.state = std::move(s);
      out.status = solve_status::budget_exhausted;
      out.stats = solver.stats;
      return out;
    }
    if (screening) {
      solver.dynamic_screen(s, corr);
    }
    const std::int64_t chunk =
        std::min<std::int64_t>(cfg.gap_check_every, cfg.max_epochs - solver.stats.epochs);
    for (std::int64_t i = 0; i < chunk; ++i) {
      solver.epoch();
    }
  }
}

namespace {

struct policy_step {
  double lambda_next = 0.0;
  double eps_step = 0.0;
  double eps_budget = 0.0;  // fast-path epsilon_t entering D(.)
  double e_prev = 0.0;      // fast-path E_t before the step
  bool fastpath_rule = false;
};

class path_runner {
 public:
  path_runner(const problem& prob, const path_policy& policy, const inner_solver_config& cfg,
              const step_callback& on_step)
      : prob_(prob), policy_(policy), cfg_(cfg), on_step_(on_step) {}

  run_result run();

 private:
  const problem& prob_;
  path_policy policy_;
  const inner_solver_config& cfg_;
  const step_callback& on_step_;

  run_result result_;
  double lambda_eff_ = 0.0;
  double eps_eff_ = 0.0;
  double r_eff_ = 0.0;
  std::vector<std::pair<double, double>> agenda_;  // grid policies
  std::size_t agenda_pos_ = 0;
  int tighten_retries_ = 0;
  double tightened_eps_ = -1.0;

  void record_step(const primal_dual_state& s, double eps_step, std::int64_t inner_iterations,
                   std::int64_t ws_size, std::int64_t wall_ns);
  bool compute_policy_step(const primal_dual_state& s, policy_step& step);
  bool resolve_current_lambda(primal_dual_state& s, double eps);  // size-control tightening
};

void path_runner::record_step(const primal_dual_state& s, double eps_step,
                              std::int64_t inner_iterations, std::int64_t ws_size,
                              std::int64_t wall_ns) {
  step_record rec;
  rec.t = static_cast<int>(result_.trace.steps.size());
  rec.lambda_t = s.lambda;
  rec.eps_t = eps_step;
  rec.inner_iterations = inner_iterations;
  rec.gap_local = s.gap_local;
  rec.gap_at_target = gap_at(prob_, s, lambda_eff_);
  rec.e_t = error_term(s, lambda_eff_);
  rec.delta_t = s.delta_t;
  const screening_report report = gap_safe_screen(prob_, s, s.lambda);
  rec.active_set_size = static_cast<std::int64_t>(report.active.size());
  rec.working_set_size = ws_size;
  rec.f_val = s.f_val;
  rec.wall_nanoseconds = wall_ns;
  result_.trace.steps.push_back(rec);
  if (cfg_.record_screen_masks) {
    result_.screen_masks.push_back(report.screened);
  }
  if (on_step_) {
    on_step_(rec);
  }
}

// Re-solve at the current lambda with a tighter tolerance; used when size
// control reports 2 nu E'' >= d^2 (inner solve too loose).
bool path_runner::resolve_current_lambda(primal_dual_state& s, double eps) {
  const double f_prev = s.f_val;
  accept_fn keep_monotone;
  if (cfg_.enforce_monotone_f) {
    keep_monotone = [f_prev](const primal_dual_state& cand) { return cand.f_val <= f_prev; };
  }
  subproblem_result res = solve_subproblem(prob_, s.beta, s.lambda, eps, cfg_, nullptr,
                                           keep_monotone);
  result_.totals += res.stats;
  if (res.status != solve_status::converged) {
    return false;
  }
  s = std::move(res.state);
  return true;
}

bool path_runner::compute_policy_step(const primal_dual_state& s, policy_step& step) {
  const double lt = s.lambda;
  switch (policy_.kind) {
    case policy_kind::fast_path: {
      step.fastpath_rule = true;
      step.e_prev = error_term(s, lambda_eff_);
      double eps_t = default_eps_fastpath(s, r_eff_, prob_, lambda_eff_);
      std::optional<double> next = next_lambda_fastpath(s, r_eff_, eps_t, prob_, lambda_eff_);
      // D < 0 recovery: halve eps up to 40 times, then fall back to the
      // constructive default (feasible by construction).
      for (int k = 0; k < 40 && !next; ++k) {
        eps_t *= 0.5;
        next = next_lambda_fastpath(s, r_eff_, eps_t, prob_, lambda_eff_);
      }
      if (!next) {
        eps_t = default_eps_fastpath(s, r_eff_, prob_, lambda_eff_);
        next = next_lambda_fastpath(s, r_eff_, eps_t, prob_, lambda_eff_);
      }
      if (!next) {
        return false;
      }
      step.lambda_next = *next;
      step.eps_budget = eps_t;
      step.eps_step = eps_t > 0.0 ? eps_t : eps_eff_;
      break;
    }
    case policy_kind::simplified: {
      step.lambda_next = next_lambda_simplified(lt, lambda_eff_, r_eff_);
      step.eps_step = simplified_tolerance(step.lambda_next, lambda_eff_, eps_eff_);
      break;
    }
    case policy_kind::adaptive_r: {
      const double r_t = std::min(policy_.adaptive_c * adaptive_r(prob_, lt, lambda_eff_),
                                  (1.0 - 1e-9) * prob_.mu / prob_.nu);
      step.lambda_next = next_lambda_simplified(lt, lambda_eff_, r_t);
      step.eps_step = simplified_tolerance(step.lambda_next, lambda_eff_, eps_eff_);
      break;
    }
    case policy_kind::geometric:
    case policy_kind::prescribed: {
      while (agenda_pos_ < agenda_.size() &&
             agenda_[agenda_pos_].first >= lt * (1.0 - kSnapRel)) {
        ++agenda_pos_;
      }
      if (agenda_pos_ >= agenda_.size()) {
        step.lambda_next = lambda_eff_;
        step.eps_step = eps_eff_;
      } else {
        step.lambda_next = agenda_[agenda_pos_].first;
        step.eps_step = agenda_[agenda_pos_].second;
        ++agenda_pos_;
      }
      break;
    }
    case policy_kind::active_set_control: {
      const screening_report report = gap_safe_screen(prob_, s, lt);
      const int current_size = static_cast<int>(report.active.size());
      std::int64_t finite = 0;
      for (Eigen::Index j = 0; j < prob_.p(); ++j) {
        if (std::isfinite(report.distances[j])) {
          ++finite;
        }
      }
      int p_t;
      switch (policy_.schedule.mode) {
        case size_schedule::mode_kind::fixed_increment:
          p_t = current_size + std::max(policy_.schedule.increment, 1);
          break;
        case size_schedule::mode_kind::targets: {
          p_t = current_size + 1;
          for (int target : policy_.schedule.targets) {
            if (target > current_size) {
              p_t = target;
              break;
            }
          }
          break;
        }
        case size_schedule::mode_kind::lars_like:
        default:
          p_t = current_size + 1;
          break;
      }
      if (policy_.schedule.cap > 0) {
        p_t = std::min(p_t, policy_.schedule.cap);
      }
      p_t = std::min<int>(p_t, static_cast<int>(finite));
      if (p_t <= current_size) {
        step.lambda_next = lambda_eff_;  // active set cannot grow further
        step.eps_step = eps_eff_;
        break;
      }
      std::optional<size_step> bounds = next_lambda_for_size(s, p_t, prob_, lambda_eff_);
      if (!bounds) {
        return false;  // caller tightens the inner solve and retries
      }
      step.lambda_next = bounds->reach_at;
      if (!(step.lambda_next < lt)) {
        step.lambda_next = lambda_eff_;
      }
      step.eps_step = simplified_tolerance(step.lambda_next, lambda_eff_, eps_eff_);
      break;
    }
  }
  if (step.lambda_next <= lambda_eff_ * (1.0 + kSnapRel)) {
    step.lambda_next = lambda_eff_;
  }
  if (step.lambda_next == lambda_eff_) {
    step.eps_step = std::min(step.eps_step, eps_eff_);  // final state owes the target eps
  }
  return true;
}

run_result path_runner::run() {
  const double lambda0 = prob_.lambda_max;
  const double f0 = 0.5 * prob_.y.squaredNorm();
  const double lambda_floor =
      policy_.clip_lambda_floor >= 0.0 ? policy_.clip_lambda_floor : lambda0 / 1e3;
  const double eps_floor = policy_.clip_eps_floor >= 0.0 ? policy_.clip_eps_floor : f0 / 1e8;

  result_.requested_lambda = policy_.target_lambda;
  result_.requested_eps = policy_.target_eps;
  lambda_eff_ = std::max(policy_.target_lambda, lambda_floor);
  eps_eff_ = std::max(policy_.target_eps, eps_floor);
  result_.lambda_clipped = lambda_eff_ != policy_.target_lambda;
  result_.eps_clipped = eps_eff_ != policy_.target_eps;
  result_.target_lambda = lambda_eff_;
  result_.target_eps = eps_eff_;
  if (!(lambda_eff_ > 0.0)) {
    throw std::invalid_argument("run_path: target lambda must be positive");
  }
  if (!(eps_eff_ > 0.0)) {
    throw std::invalid_argument("run_path: target eps must be positive");
  }
  if (!(prob_.mu > 0.0) || prob_.mu > prob_.nu) {
    throw std::invalid_argument("run_path: need 0 < mu <= nu");
  }

  r_eff_ = policy_.r > 0.0 ? policy_.r : 0.42 * prob_.mu / prob_.nu;
  if (policy_.kind == policy_kind::fast_path || policy_.kind == policy_kind::simplified) {
    if (!(r_eff_ > 0.0) || !(r_eff_ < prob_.mu / prob_.nu)) {
      throw std::invalid_argument("run_path: need 0 < r < mu/nu");
    }
  }

  if (policy_.kind == policy_kind::geometric) {
    const int t_count = std::max(policy_.grid_size, 2);
    double ratio = policy_.grid_ratio;
    if (!(ratio > 0.0) || !(ratio < 1.0)) {
      ratio = std::pow(lambda_eff_ / std::max(lambda0, lambda_eff_),
                       1.0 / static_cast<double>(t_count - 1));
    }
    agenda_.clear();
    double lam = std::max(lambda0, lambda_eff_);
    for (int t = 0; t < t_count && lam > lambda_eff_; ++t) {
      agenda_.emplace_back(lam, eps_eff_);
      lam *= ratio;
    }
    agenda_.emplace_back(lambda_eff_, eps_eff_);
  } else if (policy_.kind == policy_kind::prescribed) {
    if (policy_.grid.empty()) {
      throw std::invalid_argument("run_path: prescribed policy needs a grid");
    }
    for (std::size_t i = 1; i < policy_.grid.size(); ++i) {
      if (!(policy_.grid[i] < policy_.grid[i - 1])) {
        throw std::invalid_argument("run_path: prescribed grid must be strictly decreasing");
      }
    }
    if (policy_.refine_prescribed) {
      // refinement steps between grid points follow the simplified recurrence
      path_policy refine_policy = policy_;
      refine_policy.kind = policy_kind::simplified;
      if (!(refine_policy.r > 0.0)) {
        refine_policy.r = r_eff_;
      }
      agenda_ = prescribed_grid_refine(policy_.grid, refine_policy, prob_.mu / prob_.nu);
    } else {
      agenda_.clear();
      for (double lam : policy_.grid) {
        agenda_.emplace_back(lam, eps_eff_);
      }
    }
    lambda_eff_ = std::max(agenda_.back().first, lambda_floor);
    result_.target_lambda = lambda_eff_;
  }

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed_ns = [&t_start] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now() - t_start)
        .count();
  };

  // beta_0 = 0 at lambda_0; if the target is at or above lambda_max the run
  // is a single exact step.
  const double lambda_start = std::max(lambda0, lambda_eff_);
  primal_dual_state state = dual_point(prob_, Eigen::VectorXd::Zero(prob_.p()), lambda_start);
  record_step(state, 0.0, 0, 0, elapsed_ns());

  while (true) {
    const double gap_target = gap_at(prob_, state, lambda_eff_);
    if (gap_target <= eps_eff_) {
      result_.trace.terminated_by = state.lambda == lambda_eff_
                                        ? termination::reached_lambda
                                        : termination::target_gap_met;
      break;
    }
    if (static_cast<std::int64_t>(result_.trace.steps.size()) > cfg_.max_path_steps) {
      result_.trace.terminated_by = termination::budget_exceeded;
      break;
    }

    policy_step step;
    if (!compute_policy_step(state, step)) {
      // Size control infeasible at this accuracy: tighten by 10x, at most 6 times.
      if (policy_.kind == policy_kind::active_set_control && tighten_retries_ < 6) {
        ++tighten_retries_;
        tightened_eps_ = (tightened_eps_ > 0.0 ? tightened_eps_
                                               : std::max(state.gap_local, eps_eff_)) /
                         10.0;
        if (!resolve_current_lambda(state, std::max(tightened_eps_, 1e-300))) {
          result_.trace.terminated_by = termination::budget_exceeded;
          break;
        }
        continue;
      }
      result_.trace.terminated_by = termination::budget_exceeded;
      break;
    }
    tighten_retries_ = 0;
    tightened_eps_ = -1.0;

    const primal_dual_state prev = state;
    const double f_prev = prev.f_val;
    const double e_prev = step.e_prev;
    const double eps_budget = step.eps_budget;
    const bool fastpath_rule = step.fastpath_rule;
    accept_fn acceptance = [this, f_prev, e_prev, eps_budget,
                            fastpath_rule](const primal_dual_state& cand) {
      if (cfg_.enforce_monotone_f && cand.f_val > f_prev) {
        return false;
      }
      if (fastpath_rule) {
        const double e_next = error_term(cand, lambda_eff_);
        if (!stopping_condition_fastpath(e_prev, e_next, eps_budget, r_eff_)) {
          return false;
        }
      }
      return true;
    };

    // Sequential gap-safe screening for the new lambda, from the old pair.
    const screening_report seq = gap_safe_screen(prob_, prev, step.lambda_next);

    std::int64_t step_epochs = 0;
    std::int64_t ws_size = prob_.p();
    Eigen::VectorXd warm = prev.beta;
    std::vector<int> ws_indices;
    bool restricted_stage = false;
    if (cfg_.use_working_set) {
      const working_set_t ws = working_set(prob_, prev.beta, step.lambda_next);
      ws_indices = ws.indices;
      if (!ws_indices.empty() && static_cast<Eigen::Index>(ws_indices.size()) < prob_.p()) {
        restricted_stage = true;
        ws_size = static_cast<std::int64_t>(ws_indices.size());
      }
    }

    subproblem_result corrected;
    int grow_attempts = 0;
    while (true) {
      if (restricted_stage) {
        subproblem_result sub = solve_subproblem(prob_, warm, step.lambda_next, step.eps_step,
                                                 cfg_, &ws_indices);
        result_.totals += sub.stats;
        step_epochs += sub.stats.epochs;
        warm = sub.state.beta;  // even on budget, best effort warm start
      }
      corrected = solve_subproblem(prob_, warm, step.lambda_next, step.eps_step, cfg_,
                                   nullptr, acceptance, &seq.screened);
      result_.totals += corrected.stats;
      step_epochs += corrected.stats.epochs;
      if (corrected.status != solve_status::converged) {
        break;
      }
      if (!restricted_stage) {
        break;
      }
      // If the safe correction moved mass outside the working set, grow it to
      // the 2|W| smallest-distance features and retry from the corrected point.
      std::vector<char> in_ws(static_cast<std::size_t>(prob_.p()), 0);
      for (int j : ws_indices) {
        in_ws[static_cast<std::size_t>(j)] = 1;
      }
      bool moved_outside = false;
      for (Eigen::Index j = 0; j < prob_.p(); ++j) {
        if (!in_ws[static_cast<std::size_t>(j)] && corrected.state.beta[j] != 0.0) {
          moved_outside = true;
          break;
        }
      }
      if (!moved_outside || grow_attempts >= 32 ||
          static_cast<Eigen::Index>(ws_indices.size()) >= prob_.p()) {
        break;
      }
      ++grow_attempts;
      const Eigen::VectorXd dist = feature_distances(prob_, corrected.state.theta);
      std::vector<int> order(static_cast<std::size_t>(prob_.p()));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&dist](int a, int b) { return dist[a] < dist[b]; });
      const std::size_t grow_to =
          std::min<std::size_t>(2 * ws_indices.size(), static_cast<std::size_t>(prob_.p()));
      std::vector<char> keep = in_ws;
      for (std::size_t k = 0; k < grow_to; ++k) {
        keep[static_cast<std::size_t>(order[k])] = 1;
      }
      for (Eigen::Index j = 0; j < prob_.p(); ++j) {
        if (corrected.state.beta[j] != 0.0) {
          keep[static_cast<std::size_t>(j)] = 1;
        }
      }
      ws_indices.clear();
      for (Eigen::Index j = 0; j < prob_.p(); ++j) {
        if (keep[static_cast<std::size_t>(j)]) {
          ws_indices.push_back(static_cast<int>(j));
        }
      }
      ws_size = static_cast<std::int64_t>(ws_indices.size());
      warm = corrected.state.beta;
    }

    if (corrected.status != solve_status::converged) {
      state = corrected.state;
      record_step(state, step.eps_step, step_epochs, ws_size, elapsed_ns());
      result_.trace.terminated_by = termination::budget_exceeded;
      break;
    }

    // Accepted: certify the step.
    const primal_dual_state& next = corrected.state;
    certificate_record cert;
    cert.t = static_cast<int>(result_.trace.steps.size());
    const stepwise_certificate sw =
        stepwise_progress_certificate(prev, next, prob_, lambda_eff_);
    cert.descent_applicable = sw.applicable;
    cert.descent_slack = sw.slack;
    const double gap_prev_target = gap_at(prob_, prev, lambda_eff_);
    const double gap_next_target = gap_at(prob_, next, lambda_eff_);
    cert.contraction = gap_prev_target > 0.0 ? gap_next_target / gap_prev_target : 0.0;
    const double amp = prev.alpha / prev.lambda;
    cert.residual_decrease_ok =
        next.zeta_sq_norm() <=
        (prob_.nu / prob_.mu) * amp * amp * prev.zeta_sq_norm() * (1.0 + 1e-9) + 1e-15;
    cert.screening_saturated =
        screening_stop_criteria(seq, prev, step.lambda_next, prob_, cfg_.saturation_c)
            .screening_saturated;
    result_.certificates.push_back(cert);

    state = next;
    record_step(state, step.eps_step, step_epochs, ws_size, elapsed_ns());
  }

  result_.final_state = state;
  return result_;
}

}  // namespace

run_result run_path(const problem& prob, const path_policy& policy,
                    const inner_solver_config& cfg, const step_callback& on_step) {
  path_runner runner(prob, policy, cfg, on_step);
  return runner.run();
}

}  // namespace contpath
