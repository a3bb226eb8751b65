#ifndef CONTPATH_DATA_IO_HPP
#define CONTPATH_DATA_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "contpath/problem.hpp"
#include "contpath/solver.hpp"

namespace contpath {

// Where a problem comes from. Synthetic datasets are reproducible bit-for-bit
// from (n, p, zero_frac, noise_sd, seed); see rng.hpp for the pinned
// generator contract.
struct dataset_spec {
  enum class source_kind { csv_dense, svmlight, synthetic };
  source_kind source = source_kind::synthetic;
  std::string path;
  std::string target_column = "0";  // name or 0-based index
  bool csv_has_header = false;
  int n = 0;
  int p = 0;
  double zero_frac = 0.8;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  bool normalize_columns = false;

  std::string describe() const;
};

// X with i.i.d. standard Gaussian entries (filled column by column), beta*
// Laplace(1) with floor(zero_frac * p) coordinates zeroed uniformly at
// random, y = X beta* + noise_sd * Gaussian noise. One rng stream drawn in
// that order.
problem generate_synthetic(int n, int p, double zero_frac, double noise_sd,
                           std::uint64_t seed, bool normalize_columns = false);

// svmlight lines "label idx:val idx:val ..." with 1-based ascending indices;
// '#' starts a comment. Builds a sparse problem.
problem load_svmlight(const std::string& path, bool normalize_columns = false);

// Dense CSV; the target column (by header name, or 0-based index when the
// name is numeric or there is no header) becomes y, all others become X.
problem load_csv(const std::string& path, const std::string& target_column,
                 bool has_header, bool normalize_columns = false);

problem load_dataset(const dataset_spec& spec);

void write_svmlight(const std::string& path, const design_matrix& x,
                    const Eigen::VectorXd& y);

struct trace_meta {
  std::string policy;
  double r = 0.0;
  double eps = 0.0;
  double lambda = 0.0;
  std::string dataset;
  std::uint64_t seed = 0;
  std::string version = "0.1.0";
  double lambda_requested = 0.0;
  double eps_requested = 0.0;
  std::string terminated_by;
};

// JSON document {meta, steps, certificates} with keys in fixed order and
// floating point written with 17 significant digits. include_timings = false
// zeroes wall_nanoseconds, for byte-for-byte reproducibility comparisons.
std::string trace_to_json(const run_result& result, const trace_meta& meta,
                          bool include_timings = true);
void write_trace(const run_result& result, const trace_meta& meta, const std::string& path,
                 bool include_timings = true);

struct parsed_trace {
  trace_meta meta;
  path_trace trace;
  std::vector<certificate_record> certificates;
};

parsed_trace read_trace_json(const std::string& json_text);
parsed_trace read_trace(const std::string& path);

}  // namespace contpath

#endif  // CONTPATH_DATA_IO_HPP
