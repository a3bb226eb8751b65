#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "contpath/problem.hpp"
#include "contpath/rng.hpp"
#include "contpath/screening.hpp"
#include "oracles.hpp"

using namespace contpath;

namespace {

problem unit_problem() {
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd y(2);
  y << 2.0, 0.5;
  return problem::quadratic(design_matrix::dense(x), y);
}

}  // namespace

TEST_CASE("feature distances on the identity design") {
  const problem prob = unit_problem();
  Eigen::VectorXd theta(2);
  theta << 1.0, 0.5;
  const Eigen::VectorXd d = feature_distances(prob, theta);
  CHECK(d[0] == doctest::Approx(0.0));
  CHECK(d[1] == doctest::Approx(0.5));
}

TEST_CASE("feature distances match the naive per-feature loop") {
  rng gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    const problem prob = oracles::random_problem(gen, 7, 11);
    const primal_dual_state s =
        dual_point(prob, oracles::random_vector(gen, 11, 0.2), 0.5 * prob.lambda_max);
    const Eigen::VectorXd d = feature_distances(prob, s.theta);
    const Eigen::VectorXd expected = oracles::naive_distances(*prob.X.dense_data(), s.theta);
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      CHECK(std::abs(d[j] - expected[j]) <= 1e-12 * (1.0 + std::abs(expected[j])));
      CHECK(d[j] >= -1e-10);
    }
  }
}

TEST_CASE("zero columns sit at infinite distance and are always screened") {
  Eigen::MatrixXd x(3, 3);
  x << 1.0, 0.0, 0.2, 0.0, 0.0, 1.0, 0.5, 0.0, -0.3;
  Eigen::VectorXd y(3);
  y << 1.0, -2.0, 0.5;
  const problem prob = problem::quadratic(design_matrix::dense(x), y);
  const primal_dual_state s = dual_point(prob, Eigen::VectorXd::Zero(3), prob.lambda_max);
  const Eigen::VectorXd d = feature_distances(prob, s.theta);
  CHECK(std::isinf(d[1]));
  const screening_report report = gap_safe_screen(prob, s, prob.lambda_max * 0.9);
  CHECK(report.screened[1] == 1);
}

TEST_CASE("zero-radius screening keeps exactly the equicorrelation set") {
  rng gen(33);
  for (int trial = 0; trial < 10; ++trial) {
    const problem prob = oracles::random_problem(gen, 9, 7);
    const double lambda = 0.4 * prob.lambda_max;
    const primal_dual_state s = oracles::cd_oracle(prob, lambda, 1e-14);
    const screening_report report = gap_safe_screen(prob, s, lambda);
    CHECK(report.radius <= 1e-6);
    const Eigen::VectorXd d = feature_distances(prob, s.theta);
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      CHECK(report.screened[static_cast<std::size_t>(j)] == (d[j] > report.radius ? 1 : 0));
      if (std::abs(s.beta[j]) > 1e-10) {
        CHECK_FALSE(report.screened[static_cast<std::size_t>(j)]);
      }
    }
  }
}

TEST_CASE("screening at lambda_max against a high-precision solve") {
  rng gen(35);
  const problem prob = oracles::random_problem(gen, 10, 14);
  const primal_dual_state s0 = dual_point(prob, Eigen::VectorXd::Zero(14), prob.lambda_max);
  const double lambda = 0.8 * prob.lambda_max;
  const screening_report report = gap_safe_screen(prob, s0, lambda);
  const primal_dual_state oracle = oracles::cd_oracle(prob, lambda, 1e-14);
  for (Eigen::Index j = 0; j < prob.p(); ++j) {
    if (report.screened[static_cast<std::size_t>(j)]) {
      CHECK(std::abs(oracle.beta[j]) <= 1e-8);
    }
  }
}

TEST_CASE("gap-safe screening never excludes oracle-active features") {
  rng gen(37);
  for (int trial = 0; trial < 40; ++trial) {
    const problem prob = oracles::random_problem(gen, 8, 12);
    if (prob.lambda_max <= 0.0) {
      continue;
    }
    const double lambda = prob.lambda_max * (0.1 + 0.5 * gen.uniform01());
    const primal_dual_state oracle = oracles::cd_oracle(prob, lambda, 1e-14);
    for (double gap_level : {1e-2, 1e-6, 1e-12}) {
      const primal_dual_state iterate = oracles::cd_oracle(prob, lambda, gap_level);
      const screening_report report = gap_safe_screen(prob, iterate, lambda);
      for (Eigen::Index j = 0; j < prob.p(); ++j) {
        if (report.screened[static_cast<std::size_t>(j)]) {
          CHECK(std::abs(oracle.beta[j]) <= 1e-8);
        }
      }
    }
  }
}

TEST_CASE("screened set grows as the inner gap shrinks") {
  rng gen(39);
  const problem prob = oracles::random_problem(gen, 12, 16);
  const double lambda = 0.3 * prob.lambda_max;
  std::size_t prev_count = 0;
  for (double gap_level : {1e-1, 1e-3, 1e-6, 1e-12}) {
    const primal_dual_state iterate = oracles::cd_oracle(prob, lambda, gap_level);
    const screening_report report = gap_safe_screen(prob, iterate, lambda);
    std::size_t count = 0;
    for (char c : report.screened) {
      count += static_cast<std::size_t>(c);
    }
    CHECK(count >= prev_count);
    prev_count = count;
  }
}

TEST_CASE("sequential radius closed form at exact solutions") {
  rng gen(41);
  const problem prob = oracles::random_problem(gen, 9, 6);
  const double lambda_t = 0.5 * prob.lambda_max;
  const primal_dual_state s = oracles::cd_oracle(prob, lambda_t, 1e-14);
  REQUIRE(s.gap_local <= 1e-14);

  CHECK(sequential_radius(s, lambda_t, prob) <= 1e-6);

  const double theta_norm = s.theta.norm();
  double prev_radius = -1.0;
  for (double frac : {0.95, 0.7, 0.5, 0.3, 0.15}) {
    const double lambda_next = frac * lambda_t;
    const double radius = sequential_radius(s, lambda_next, prob);
    const double predicted = lambda_t * theta_norm * (1.0 / lambda_next - 1.0 / lambda_t);
    CHECK(std::abs(radius - predicted) <= 1e-7 * (1.0 + predicted));
    CHECK(radius >= prev_radius);
    prev_radius = radius;
  }
}

TEST_CASE("support path threshold matches the sequential radius at exact solutions") {
  rng gen(43);
  const problem prob = oracles::random_problem(gen, 8, 6);
  const double lambda_t = 0.6 * prob.lambda_max;
  const primal_dual_state s = oracles::cd_oracle(prob, lambda_t, 1e-14);

  CHECK(support_path_threshold(s, lambda_t, prob) <= 1e-6);

  double prev = -1.0;
  for (double frac : {0.9, 0.6, 0.4, 0.2}) {
    const double lambda_next = frac * lambda_t;
    const double threshold = support_path_threshold(s, lambda_next, prob);
    const double radius = sequential_radius(s, lambda_next, prob);
    CHECK(std::abs(threshold - radius) <= 1e-7 * (1.0 + radius));
    CHECK(threshold >= prev);
    prev = threshold;
  }
}

TEST_CASE("support path threshold is safe against the oracle support") {
  rng gen(45);
  for (int trial = 0; trial < 25; ++trial) {
    const problem prob = oracles::random_problem(gen, 8, 10);
    if (prob.lambda_max <= 0.0) {
      continue;
    }
    const double lambda_t = prob.lambda_max * 0.6;
    const double lambda_next = lambda_t * (0.4 + 0.5 * gen.uniform01());
    const primal_dual_state s = oracles::cd_oracle(prob, lambda_t, 1e-8);
    const double threshold = support_path_threshold(s, lambda_next, prob);
    const Eigen::VectorXd d = feature_distances(prob, s.theta);
    const primal_dual_state oracle = oracles::cd_oracle(prob, lambda_next, 1e-14);
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      if (d[j] > threshold) {
        CHECK(std::abs(oracle.beta[j]) <= 1e-8);
      }
    }
  }
}

TEST_CASE("error envelopes") {
  SUBCASE("collapse at lambda = lambda_t") {
    rng gen(47);
    const problem prob = oracles::random_problem(gen, 6, 8);
    const primal_dual_state s = oracles::cd_oracle(prob, 0.5 * prob.lambda_max, 1e-4, 30);
    const auto [lo, hi] = error_envelopes(s, s.lambda);
    CHECK(lo == doctest::Approx(s.gap_local / (s.lambda * s.lambda)));
    CHECK(hi == doctest::Approx(s.gap_local / (s.lambda * s.lambda)));
  }
  SUBCASE("delta = 0 gives the two gap scalings") {
    primal_dual_state s;
    s.lambda = 2.0;
    s.gap_local = 0.8;
    s.delta_t = 0.0;
    s.zeta = Eigen::VectorXd::Zero(1);
    const auto [lo, hi] = error_envelopes(s, 1.0);
    CHECK(lo == doctest::Approx(0.2));
    CHECK(hi == doctest::Approx(0.4));
  }
  SUBCASE("bracket E_t(l)/l^2 at 11 interior points") {
    rng gen(49);
    for (int trial = 0; trial < 30; ++trial) {
      const problem prob = oracles::random_problem(gen, 7, 9);
      if (prob.lambda_max <= 0.0) {
        continue;
      }
      const double lambda_t = 0.7 * prob.lambda_max;
      const primal_dual_state s =
          oracles::cd_oracle(prob, lambda_t, 1e-3, 2 + static_cast<int>(gen.below(6)));
      const double target = 0.2 * lambda_t;
      const auto [lo, hi] = error_envelopes(s, target);
      CHECK(lo <= hi + 1e-15);
      for (int k = 0; k <= 10; ++k) {
        const double lam = target + (lambda_t - target) * k / 10.0;
        const double ratio = lam / lambda_t;
        const double e_t = ratio * s.gap_local + (1.0 - ratio) * s.delta_t;
        const double scaled = e_t / (lam * lam);
        CHECK(lo <= scaled + 1e-12 * (1.0 + std::abs(scaled)));
        CHECK(scaled <= hi + 1e-12 * (1.0 + std::abs(scaled)));
      }
    }
  }
}

TEST_CASE("screening stop criteria") {
  rng gen(51);
  const problem prob = oracles::random_problem(gen, 8, 10);
  const double lambda_t = 0.5 * prob.lambda_max;

  SUBCASE("saturated at an exact solution with lambda_next = lambda_t") {
    const primal_dual_state s = oracles::cd_oracle(prob, lambda_t, 1e-15);
    const screening_report report = gap_safe_screen(prob, s, lambda_t);
    const screening_stop stop = screening_stop_criteria(report, s, lambda_t, prob, 1.0);
    CHECK(stop.screening_saturated);
  }
  SUBCASE("huge upper envelope keeps optimizing") {
    const primal_dual_state s = oracles::cd_oracle(prob, lambda_t, 1e-1, 1);
    screening_report report = gap_safe_screen(prob, s, lambda_t);
    report.e_hi = 1e12;
    // with anything screened, a huge envelope fails the stopping inequality
    bool any_screened = false;
    for (char c : report.screened) {
      any_screened = any_screened || c != 0;
    }
    const screening_stop stop =
        screening_stop_criteria(report, s, 0.9 * lambda_t, prob, 1.0);
    if (any_screened) {
      CHECK(stop.keep_optimizing);
    } else {
      CHECK_FALSE(stop.keep_optimizing);  // empty complement: vacuously satisfied
    }
  }
}

TEST_CASE("strong rule thresholds") {
  rng gen(53);
  const problem prob = oracles::random_problem(gen, 8, 10);
  const double lambda_t = 0.5 * prob.lambda_max;
  const primal_dual_state s = oracles::cd_oracle(prob, lambda_t, 1e-12);

  SUBCASE("lambda_next = lambda_t discards strictly interior features") {
    const auto discard = strong_rule_screen(prob, s.theta, lambda_t, lambda_t);
    const Eigen::VectorXd corr = prob.X.correlations(s.theta);
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      const bool discarded =
          std::find(discard.begin(), discard.end(), static_cast<int>(j)) != discard.end();
      CHECK(discarded == (std::abs(corr[j]) < 1.0));
    }
  }
  SUBCASE("step ratio of two or more discards nothing") {
    CHECK(strong_rule_screen(prob, s.theta, lambda_t, 0.5 * lambda_t).empty());
    CHECK(strong_rule_screen(prob, s.theta, lambda_t, 0.3 * lambda_t).empty());
  }
}

TEST_CASE("strong rule can mis-exclude where the gap-safe rule stays safe") {
  // Randomized search for a violation witness: a feature discarded by the
  // strong rule whose oracle coefficient at lambda_next is nonzero.
  rng gen(55);
  bool found = false;
  for (int trial = 0; trial < 400 && !found; ++trial) {
    const problem prob = oracles::random_problem(gen, 5, 8, 2.0);
    if (prob.lambda_max <= 0.0) {
      continue;
    }
    const double lambda_t = prob.lambda_max * (0.3 + 0.3 * gen.uniform01());
    const double lambda_next = lambda_t * (0.55 + 0.35 * gen.uniform01());
    const primal_dual_state s = oracles::cd_oracle(prob, lambda_t, 1e-14);
    const auto discard = strong_rule_screen(prob, s.theta, lambda_t, lambda_next);
    if (discard.empty()) {
      continue;
    }
    const primal_dual_state oracle = oracles::cd_oracle(prob, lambda_next, 1e-14);
    const screening_report safe = gap_safe_screen(prob, s, lambda_next);
    for (int j : discard) {
      if (std::abs(oracle.beta[j]) > 1e-6) {
        found = true;
        CHECK_FALSE(safe.screened[static_cast<std::size_t>(j)]);
        break;
      }
    }
  }
  CHECK(found);
}

TEST_CASE("dual distance stability across a sequential step") {
  rng gen(57);
  for (int trial = 0; trial < 20; ++trial) {
    const problem prob = oracles::random_problem(gen, 8, 10);
    if (prob.lambda_max <= 0.0) {
      continue;
    }
    const double lambda_t = 0.6 * prob.lambda_max;
    const double lambda_next = 0.4 * prob.lambda_max;
    const primal_dual_state s = oracles::cd_oracle(prob, lambda_t, 1e-10);
    const primal_dual_state oracle = oracles::cd_oracle(prob, lambda_next, 1e-14);
    const double radius = sequential_radius(s, lambda_next, prob);
    const Eigen::VectorXd corr_t = prob.X.correlations(s.theta);
    const Eigen::VectorXd corr_next = prob.X.correlations(oracle.theta);
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      const double drift = std::abs(std::abs(corr_next[j]) - std::abs(corr_t[j]));
      CHECK(drift <= prob.X.col_norm(j) * radius + 1e-7);
    }
  }
}
