// contpath: continuation-path solver for l1-regularized least squares.
//
// Subcommands:
//   solve     run one continuation path to a target (lambda, eps)
//   path      solve along a lambda grid (geometric or prescribed)
//   bench     policy/screening cross-product timing report (CSV)
//   synth     generate a synthetic dataset and write it to disk
//   validate  randomized self-checks of the certified inequalities

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "contpath/data_io.hpp"
#include "contpath/errors.hpp"
#include "contpath/validate.hpp"

namespace {

using namespace contpath;

struct cli_options {
  // dataset
  std::string synthetic_shape;
  double zero_frac = 0.8;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  std::string svmlight_path;
  std::string csv_path;
  std::string target_col = "0";
  bool csv_header = false;
  bool normalize = false;

  // target
  double lambda_abs = -1.0;
  double lambda_ratio = 0.01;
  double eps = 1e-6;

  // policy
  std::string policy = "fastpath";
  double r = -1.0;
  double adaptive_c = 1.0;
  int grid_size = 100;
  double grid_ratio = -1.0;
  std::string grid_csv;
  std::string grid_file;
  bool refine = false;
  std::string schedule = "lars";

  // solver
  std::string method = "cd";
  int gap_check_every = 10;
  long long max_epochs = 100000;
  long long max_steps = 10000;
  bool no_screening = false;
  bool no_working_set = false;
  bool no_monotone_f = false;
  double saturation_c = 1.0;
  bool emit_masks = false;
  bool no_clip = false;

  // output
  std::string out_path;
  int verbosity = 0;
};

void add_dataset_flags(CLI::App* cmd, cli_options& opt) {
  cmd->add_option("--synthetic", opt.synthetic_shape,
                  "synthetic dataset shape NxP, e.g. 500x1000");
  cmd->add_option("--zero-frac", opt.zero_frac,
                  "fraction of zeroed signal coordinates (synthetic)");
  cmd->add_option("--noise-sd", opt.noise_sd, "noise standard deviation (synthetic)");
  cmd->add_option("--seed", opt.seed, "random seed (synthetic)");
  cmd->add_option("--svmlight", opt.svmlight_path, "load an svmlight-format dataset");
  cmd->add_option("--csv", opt.csv_path, "load a dense CSV dataset");
  cmd->add_option("--target-col", opt.target_col,
                  "CSV target column (header name or 0-based index)");
  cmd->add_flag("--csv-header", opt.csv_header, "CSV file has a header row");
  cmd->add_flag("--normalize", opt.normalize, "rescale columns to unit Euclidean norm");
}

void add_target_flags(CLI::App* cmd, cli_options& opt) {
  cmd->add_option("--lambda", opt.lambda_abs, "absolute target lambda");
  cmd->add_option("--lambda-ratio", opt.lambda_ratio,
                  "target lambda as a fraction of lambda_max (default 0.01)");
  cmd->add_option("--eps", opt.eps, "target duality gap (default 1e-6)");
}

void add_policy_flags(CLI::App* cmd, cli_options& opt) {
  cmd->add_option("--policy", opt.policy,
                  "fastpath|simplified|adaptive|geometric|prescribed|sizecontrol");
  cmd->add_option("--r", opt.r, "contraction rate r in (0, mu/nu); default 0.42 mu/nu");
  cmd->add_option("--adaptive-c", opt.adaptive_c, "scale of the adaptive rate r_t");
  cmd->add_option("--T", opt.grid_size, "geometric grid size (default 100)");
  cmd->add_option("--grid-ratio", opt.grid_ratio, "geometric grid ratio in (0,1)");
  cmd->add_option("--grid", opt.grid_csv, "prescribed grid as comma-separated lambdas");
  cmd->add_option("--grid-file", opt.grid_file,
                  "prescribed grid file (whitespace-separated lambdas)");
  cmd->add_flag("--refine", opt.refine,
                "insert policy-demanded points between prescribed grid elements");
  cmd->add_option("--schedule", opt.schedule,
                  "active-set size schedule: fixed:k | targets:p1,p2,... | lars");
}

void add_solver_flags(CLI::App* cmd, cli_options& opt) {
  cmd->add_option("--method", opt.method, "inner solver: cd | pg");
  cmd->add_option("--gap-check-every", opt.gap_check_every,
                  "epochs between duality-gap checks");
  cmd->add_option("--max-epochs", opt.max_epochs, "inner epoch budget per subproblem");
  cmd->add_option("--max-steps", opt.max_steps, "path step budget");
  cmd->add_flag("--no-screening", opt.no_screening, "disable gap-safe screening");
  cmd->add_flag("--no-working-set", opt.no_working_set, "disable working-set solves");
  cmd->add_flag("--no-monotone-f", opt.no_monotone_f,
                "do not enforce monotone loss across accepted steps");
  cmd->add_option("--saturation-c", opt.saturation_c,
                  "proportionality constant of the screening saturation flag");
  cmd->add_flag("--emit-masks", opt.emit_masks,
                "include per-step screening masks in the trace");
  cmd->add_flag("--no-clip", opt.no_clip,
                "disable the lambda0/1e3 and f(0)/1e8 stability floors");
}

dataset_spec make_dataset_spec(const cli_options& opt) {
  dataset_spec spec;
  spec.normalize_columns = opt.normalize;
  if (!opt.svmlight_path.empty()) {
    spec.source = dataset_spec::source_kind::svmlight;
    spec.path = opt.svmlight_path;
    return spec;
  }
  if (!opt.csv_path.empty()) {
    spec.source = dataset_spec::source_kind::csv_dense;
    spec.path = opt.csv_path;
    spec.target_column = opt.target_col;
    spec.csv_has_header = opt.csv_header;
    return spec;
  }
  spec.source = dataset_spec::source_kind::synthetic;
  const std::string shape = opt.synthetic_shape.empty() ? "500x1000" : opt.synthetic_shape;
  const auto x_pos = shape.find('x');
  if (x_pos == std::string::npos) {
    throw CLI::ValidationError("--synthetic", "expected NxP, e.g. 500x1000");
  }
  spec.n = std::stoi(shape.substr(0, x_pos));
  spec.p = std::stoi(shape.substr(x_pos + 1));
  spec.zero_frac = opt.zero_frac;
  spec.noise_sd = opt.noise_sd;
  spec.seed = opt.seed;
  return spec;
}

std::vector<double> parse_grid(const cli_options& opt) {
  std::vector<double> grid;
  if (!opt.grid_file.empty()) {
    std::ifstream in(opt.grid_file);
    if (!in) {
      throw data_error("cannot open grid file " + opt.grid_file);
    }
    double v;
    while (in >> v) {
      grid.push_back(v);
    }
  } else if (!opt.grid_csv.empty()) {
    std::istringstream ls(opt.grid_csv);
    std::string tok;
    while (std::getline(ls, tok, ',')) {
      grid.push_back(std::stod(tok));
    }
  }
  return grid;
}

size_schedule parse_schedule(const std::string& text) {
  size_schedule schedule;
  if (text == "lars") {
    schedule.mode = size_schedule::mode_kind::lars_like;
  } else if (text.rfind("fixed:", 0) == 0) {
    schedule.mode = size_schedule::mode_kind::fixed_increment;
    schedule.increment = std::stoi(text.substr(6));
  } else if (text.rfind("targets:", 0) == 0) {
    schedule.mode = size_schedule::mode_kind::targets;
    std::istringstream ls(text.substr(8));
    std::string tok;
    while (std::getline(ls, tok, ',')) {
      schedule.targets.push_back(std::stoi(tok));
    }
  } else {
    throw CLI::ValidationError("--schedule", "expected fixed:k, targets:..., or lars");
  }
  return schedule;
}

path_policy make_policy(const cli_options& opt, const problem& prob) {
  const double target_lambda =
      opt.lambda_abs > 0.0 ? opt.lambda_abs : opt.lambda_ratio * prob.lambda_max;
  path_policy policy;
  if (opt.policy == "fastpath") {
    policy = path_policy::fast_path(target_lambda, opt.eps, opt.r);
  } else if (opt.policy == "simplified") {
    policy = path_policy::simplified(target_lambda, opt.eps, opt.r);
  } else if (opt.policy == "adaptive") {
    policy = path_policy::adaptive(target_lambda, opt.eps, opt.adaptive_c);
  } else if (opt.policy == "geometric") {
    policy = path_policy::geometric(target_lambda, opt.eps, opt.grid_size);
    policy.grid_ratio = opt.grid_ratio;
  } else if (opt.policy == "prescribed") {
    std::vector<double> grid = parse_grid(opt);
    if (grid.empty()) {
      throw CLI::ValidationError("--grid", "prescribed policy needs --grid or --grid-file");
    }
    policy = path_policy::prescribed(std::move(grid), opt.eps);
    policy.refine_prescribed = opt.refine;
    if (opt.r > 0.0) {
      policy.r = opt.r;
    }
  } else if (opt.policy == "sizecontrol") {
    policy = path_policy::size_control(target_lambda, opt.eps, parse_schedule(opt.schedule));
  } else {
    throw CLI::ValidationError("--policy", "unknown policy '" + opt.policy + "'");
  }
  if (opt.no_clip) {
    policy.clip_lambda_floor = 0.0;
    policy.clip_eps_floor = 0.0;
  }
  return policy;
}

inner_solver_config make_solver_config(const cli_options& opt) {
  inner_solver_config cfg;
  if (opt.method == "cd") {
    cfg.method = inner_method::cyclic_coordinate_descent;
  } else if (opt.method == "pg") {
    cfg.method = inner_method::proximal_gradient;
  } else {
    throw CLI::ValidationError("--method", "expected cd or pg");
  }
  cfg.gap_check_every = opt.gap_check_every;
  cfg.max_epochs = opt.max_epochs;
  cfg.max_path_steps = opt.max_steps;
  cfg.dynamic_screening = !opt.no_screening;
  cfg.use_working_set = !opt.no_working_set;
  cfg.enforce_monotone_f = !opt.no_monotone_f;
  cfg.saturation_c = opt.saturation_c;
  cfg.record_screen_masks = opt.emit_masks;
  return cfg;
}

trace_meta make_meta(const dataset_spec& spec, const path_policy& policy,
                     const run_result& res) {
  trace_meta meta;
  meta.policy = policy_name(policy.kind);
  meta.r = policy.r;
  meta.eps = res.target_eps;
  meta.lambda = res.target_lambda;
  meta.dataset = spec.describe();
  meta.seed = spec.seed;
  meta.lambda_requested = res.requested_lambda;
  meta.eps_requested = res.requested_eps;
  meta.terminated_by = termination_name(res.trace.terminated_by);
  return meta;
}

int run_one(const cli_options& opt) {
  const dataset_spec spec = make_dataset_spec(opt);
  const problem prob = load_dataset(spec);
  const path_policy policy = make_policy(opt, prob);
  const inner_solver_config cfg = make_solver_config(opt);

  step_callback on_step;
  if (opt.verbosity > 0) {
    on_step = [](const step_record& rec) {
      std::fprintf(stderr,
                   "step %d: lambda=%.6g eps=%.3g gap=%.3g gap@target=%.3g active=%lld "
                   "ws=%lld epochs=%lld\n",
                   rec.t, rec.lambda_t, rec.eps_t, rec.gap_local, rec.gap_at_target,
                   static_cast<long long>(rec.active_set_size),
                   static_cast<long long>(rec.working_set_size),
                   static_cast<long long>(rec.inner_iterations));
    };
  }

  const auto start = std::chrono::steady_clock::now();
  const run_result res = run_path(prob, policy, cfg, on_step);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();

  if (!opt.out_path.empty()) {
    write_trace(res, make_meta(spec, policy, res), opt.out_path);
  }
  const double final_gap = gap_at(prob, res.final_state, res.target_lambda);
  std::printf("lambda=%.17g gap=%.17g steps=%zu epochs=%lld time_ms=%.3f\n",
              res.target_lambda, final_gap, res.trace.steps.size(),
              static_cast<long long>(res.totals.epochs), ms);
  if (res.lambda_clipped || res.eps_clipped) {
    std::fprintf(stderr, "note: targets clipped to lambda=%.6g eps=%.6g for stability\n",
                 res.target_lambda, res.target_eps);
  }
  return res.target_met() ? 0 : 2;
}

int run_bench(const cli_options& opt, const std::string& bench_out,
              const std::vector<std::string>& policies, const std::vector<int>& t_list,
              const std::vector<double>& eps_list) {
  const dataset_spec spec = make_dataset_spec(opt);
  const problem prob = load_dataset(spec);

  struct bench_row {
    std::string policy;
    bool screening = true;
    int grid_size = 0;
    double eps = 0.0;
    long long total_epochs = 0;
    double wall_ms = 0.0;
    double final_gap = 0.0;
    bool completed = false;
  };
  std::vector<bench_row> rows;
  for (const std::string& policy : policies) {
    for (const bool screening : {true, false}) {
      for (const double eps : eps_list) {
        if (policy == "geometric" || policy == "prescribed") {
          for (const int t : t_list) {
            rows.push_back({policy, screening, t, eps, 0, 0.0, 0.0, false});
          }
        } else {
          rows.push_back({policy, screening, 0, eps, 0, 0.0, 0.0, false});
        }
      }
    }
  }

  int threads = 1;
  if (const char* env = std::getenv("CONTPATH_THREADS")) {
    threads = std::max(1, std::atoi(env));
  }

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> hard_failure{false};
  auto worker = [&] {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= rows.size()) {
        return;
      }
      bench_row& row = rows[i];
      try {
        cli_options row_opt = opt;
        row_opt.policy = row.policy;
        row_opt.eps = row.eps;
        row_opt.grid_size = row.grid_size > 0 ? row.grid_size : opt.grid_size;
        row_opt.no_screening = !row.screening;
        row_opt.no_working_set = !row.screening;  // one column toggles both pruning layers
        row_opt.no_clip = true;  // benchmark the accuracies actually requested
        const path_policy policy = make_policy(row_opt, prob);
        const inner_solver_config cfg = make_solver_config(row_opt);
        const auto start = std::chrono::steady_clock::now();
        const run_result res = run_path(prob, policy, cfg);
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        row.total_epochs = res.totals.epochs;
        row.final_gap = gap_at(prob, res.final_state, res.target_lambda);
        row.completed = true;
      } catch (const std::exception& e) {
        std::fprintf(stderr, "bench row %zu failed: %s\n", i, e.what());
        hard_failure = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) {
    t.join();
  }

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!bench_out.empty()) {
    file.open(bench_out);
    if (!file) {
      throw data_error("cannot open " + bench_out + " for writing");
    }
    out = &file;
  }
  (*out) << "policy,screening,T,eps,total_epochs,wall_ms,final_gap\n";
  char buf[256];
  for (const bench_row& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.17g,%lld,%.3f,%.17g\n", row.policy.c_str(),
                  row.screening ? 1 : 0, row.grid_size, row.eps, row.total_epochs,
                  row.wall_ms, row.completed ? row.final_gap : std::nan(""));
    (*out) << buf;
  }
  return hard_failure ? 1 : 0;
}

int run_synth(const cli_options& opt, const std::string& out_path,
              const std::string& format) {
  const dataset_spec spec = make_dataset_spec(opt);
  if (spec.source != dataset_spec::source_kind::synthetic) {
    throw CLI::ValidationError("--synthetic", "synth only generates synthetic data");
  }
  const problem prob = load_dataset(spec);
  if (format == "svmlight") {
    write_svmlight(out_path, prob.X, prob.y);
  } else if (format == "csv") {
    std::ofstream out(out_path);
    if (!out) {
      throw data_error("cannot open " + out_path + " for writing");
    }
    const auto* x = prob.X.dense_data();
    out << "target";
    for (Eigen::Index j = 0; j < prob.p(); ++j) {
      out << ",x" << j;
    }
    out << '\n';
    char buf[64];
    for (Eigen::Index i = 0; i < prob.n(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", prob.y[i]);
      out << buf;
      for (Eigen::Index j = 0; j < prob.p(); ++j) {
        std::snprintf(buf, sizeof(buf), ",%.17g", (*x)(i, j));
        out << buf;
      }
      out << '\n';
    }
  } else {
    throw CLI::ValidationError("--format", "expected svmlight or csv");
  }
  std::printf("wrote %s (n=%d, p=%d, lambda_max=%.17g)\n", out_path.c_str(), spec.n, spec.p,
              prob.lambda_max);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuation-path solver for l1-regularized least squares"};
  app.require_subcommand(1);

  cli_options opt;

  CLI::App* solve = app.add_subcommand("solve", "solve to a target (lambda, eps)");
  add_dataset_flags(solve, opt);
  add_target_flags(solve, opt);
  add_policy_flags(solve, opt);
  add_solver_flags(solve, opt);
  solve->add_option("--out", opt.out_path, "write the run trace to this JSON file");
  solve->add_flag(
      "-v,--verbose",
      [&opt](std::int64_t n) { opt.verbosity = static_cast<int>(n); },
      "per-step progress on stderr");

  CLI::App* path_cmd = app.add_subcommand("path", "solve along a lambda grid");
  add_dataset_flags(path_cmd, opt);
  add_target_flags(path_cmd, opt);
  add_policy_flags(path_cmd, opt);
  add_solver_flags(path_cmd, opt);
  path_cmd->add_option("--out", opt.out_path, "write the run trace to this JSON file");
  path_cmd->add_flag(
      "-v,--verbose",
      [&opt](std::int64_t n) { opt.verbosity = static_cast<int>(n); },
      "per-step progress on stderr");

  CLI::App* bench = app.add_subcommand("bench", "policy/screening benchmark CSV");
  add_dataset_flags(bench, opt);
  add_target_flags(bench, opt);
  add_policy_flags(bench, opt);
  add_solver_flags(bench, opt);
  std::string bench_out;
  std::vector<std::string> bench_policies = {"fastpath", "geometric"};
  std::vector<int> bench_t = {10, 100};
  std::vector<double> bench_eps = {1e-2, 1e-4, 1e-6, 1e-8};
  bench->add_option("--bench-out", bench_out, "CSV output file (default: stdout)");
  bench->add_option("--policies", bench_policies, "policies to benchmark")->delimiter(',');
  bench->add_option("--T-list", bench_t, "geometric grid sizes to benchmark")
      ->delimiter(',');
  bench->add_option("--eps-list", bench_eps, "target accuracies to benchmark")
      ->delimiter(',');

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  add_dataset_flags(synth, opt);
  std::string synth_out;
  std::string synth_format = "svmlight";
  synth->add_option("--out", synth_out, "output file")->required();
  synth->add_option("--format", synth_format, "svmlight | csv");

  CLI::App* validate = app.add_subcommand("validate", "randomized invariant self-checks");
  int trials = 50;
  std::uint64_t validate_seed = 0;
  validate->add_option("--trials", trials, "trials per suite");
  validate->add_option("--seed", validate_seed, "base seed (reproduces reported failures)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) {
      return run_one(opt);
    }
    if (path_cmd->parsed()) {
      if (opt.policy == "fastpath") {
        opt.policy = "geometric";  // grid default for the path command
      }
      return run_one(opt);
    }
    if (bench->parsed()) {
      return run_bench(opt, bench_out, bench_policies, bench_t, bench_eps);
    }
    if (synth->parsed()) {
      return run_synth(opt, synth_out, synth_format);
    }
    if (validate->parsed()) {
      const validation_report report = run_validation(trials, validate_seed, &std::cout);
      return report.total_violations() == 0 ? 0 : 1;
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const data_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 1;
}
