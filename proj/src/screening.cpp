#include "contpath/screening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace contpath {

namespace {

// A duality gap is a difference of same-scale primal and dual values, so it
// cannot be trusted below the rounding noise of that scale. Screening radii
// floor the gap here; otherwise an exactly-solved instance can round a
// boundary feature to distance +1e-17 against a radius of exactly 0.
double gap_noise_floor(const problem& prob, const primal_dual_state& state, double lambda) {
  const double scale = 1.0 + state.f_val + lambda * state.beta.lpNorm<1>() +
                       prob.y.squaredNorm();
  return 4.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace

Eigen::VectorXd feature_distances(const problem& prob, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd corr = prob.X.correlations(theta);
  const Eigen::VectorXd& norms = prob.X.col_norms();
  Eigen::VectorXd d(prob.p());
  for (Eigen::Index j = 0; j < prob.p(); ++j) {
    d[j] = norms[j] > 0.0 ? (1.0 - std::abs(corr[j])) / norms[j]
                          : std::numeric_limits<double>::infinity();
  }
  return d;
}

screening_report gap_safe_screen(const problem& prob, const primal_dual_state& state,
                                 double lambda) {
  screening_report report;
  report.distances = feature_distances(prob, state.theta);
  const double gap =
      std::max(gap_at(prob, state, lambda), gap_noise_floor(prob, state, lambda));
  report.gap = gap;
  report.radius = std::sqrt(2.0 * prob.nu * gap) / lambda;
  std::tie(report.e_lo, report.e_hi) = error_envelopes(state, lambda);
  report.screened.assign(static_cast<std::size_t>(prob.p()), 0);
  report.active.clear();
  for (Eigen::Index j = 0; j < prob.p(); ++j) {
    if (report.distances[j] > report.radius) {
      report.screened[static_cast<std::size_t>(j)] = 1;
    } else {
      report.active.push_back(static_cast<int>(j));
    }
  }
  return report;
}

double sequential_radius(const primal_dual_state& state_t, double lambda_next,
                         const problem& prob) {
  if (!(lambda_next > 0.0) || lambda_next > state_t.lambda) {
    throw std::invalid_argument("sequential_radius: need 0 < lambda_next <= lambda_t");
  }
  const double gap = std::max(gap_at(prob, state_t, lambda_next),
                              gap_noise_floor(prob, state_t, lambda_next));
  return std::sqrt(2.0 * prob.nu * gap) / lambda_next;
}

double support_path_threshold(const primal_dual_state& state_t, double lambda_next,
                              const problem& prob) {
  if (!(lambda_next > 0.0) || lambda_next > state_t.lambda) {
    throw std::invalid_argument("support_path_threshold: need 0 < lambda_next <= lambda_t");
  }
  const double lt = state_t.lambda;
  const double e_t = (lambda_next / lt) * state_t.gap_local +
                     (1.0 - lambda_next / lt) * state_t.delta_t;
  const double e_floor = gap_noise_floor(prob, state_t, lambda_next);
  const double inv_diff = 1.0 / lambda_next - 1.0 / lt;
  const double rad_sq = 2.0 * prob.nu * std::max(e_t, e_floor) / (lambda_next * lambda_next) +
                        (prob.nu / prob.mu) * state_t.zeta_sq_norm() * inv_diff * inv_diff;
  return std::sqrt(rad_sq);
}

std::pair<double, double> error_envelopes(const primal_dual_state& state_t,
                                          double target_lambda) {
  if (!(target_lambda > 0.0) || target_lambda > state_t.lambda) {
    throw std::invalid_argument("error_envelopes: need 0 < target_lambda <= lambda_t");
  }
  const double lt = state_t.lambda;
  const double gap = state_t.gap_local;
  const double delta = state_t.delta_t;
  const double spread = 1.0 / (target_lambda * target_lambda) - 1.0 / (lt * lt);
  const double e_lo = gap / (lt * lt) + spread * std::min(0.0, delta);
  const double e_hi = gap / (target_lambda * lt) + spread * std::max(0.0, delta);
  return {e_lo, e_hi};
}

screening_stop screening_stop_criteria(const screening_report& report,
                                       const primal_dual_state& state_t,
                                       double lambda_next, const problem& prob, double c) {
  screening_stop out;

  // min over screened features of d_j^2 / (2 nu); empty set -> +inf.
  double min_term = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < report.screened.size(); ++j) {
    if (report.screened[j]) {
      const double d = report.distances[static_cast<Eigen::Index>(j)];
      min_term = std::min(min_term, d * d / (2.0 * prob.nu));
    }
  }
  out.keep_optimizing = !(report.e_hi < min_term);

  const double lt = state_t.lambda;
  const double e_next = (lambda_next / lt) * state_t.gap_local +
                        (1.0 - lambda_next / lt) * state_t.delta_t;
  const double ratio = 1.0 - lambda_next / lt;
  const double floor_term = state_t.zeta_sq_norm() * ratio * ratio / (2.0 * prob.mu);
  out.screening_saturated =
      e_next <= c * floor_term + gap_noise_floor(prob, state_t, lambda_next);
  return out;
}

std::vector<int> strong_rule_screen(const problem& prob, const Eigen::VectorXd& theta_t,
                                    double lambda_t, double lambda_next) {
  std::vector<int> discard;
  const double threshold = (2.0 * lambda_next - lambda_t) / lambda_t;
  if (threshold <= 0.0) {
    return discard;
  }
  const Eigen::VectorXd corr = prob.X.correlations(theta_t);
  for (Eigen::Index j = 0; j < prob.p(); ++j) {
    if (std::abs(corr[j]) < threshold) {
      discard.push_back(static_cast<int>(j));
    }
  }
  return discard;
}

}  // namespace contpath
