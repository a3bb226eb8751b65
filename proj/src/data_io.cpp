#include "contpath/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "contpath/errors.hpp"
#include "contpath/rng.hpp"

namespace contpath {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void normalize_in_place(Eigen::MatrixXd& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    if (norm > 0.0) {
      x.col(j) /= norm;
    }
  }
}

void normalize_in_place(Eigen::SparseMatrix<double>& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double sq = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(x, j); it; ++it) {
      sq += it.value() * it.value();
    }
    if (sq > 0.0) {
      const double inv = 1.0 / std::sqrt(sq);
      for (Eigen::SparseMatrix<double>::InnerIterator it(x, j); it; ++it) {
        it.valueRef() *= inv;
      }
    }
  }
}

}  // namespace

std::string dataset_spec::describe() const {
  std::ostringstream os;
  switch (source) {
    case source_kind::synthetic:
      os << "synthetic(n=" << n << ",p=" << p << ",zero_frac=" << zero_frac
         << ",noise_sd=" << noise_sd << ",seed=" << seed << ")";
      break;
    case source_kind::svmlight:
      os << "svmlight(" << path << ")";
      break;
    case source_kind::csv_dense:
      os << "csv(" << path << ",target=" << target_column << ")";
      break;
  }
  if (normalize_columns) {
    os << "+normalized";
  }
  return os.str();
}

problem generate_synthetic(int n, int p, double zero_frac, double noise_sd,
                           std::uint64_t seed, bool normalize_columns) {
  if (n < 1 || p < 1) {
    throw std::invalid_argument("generate_synthetic: need n >= 1 and p >= 1");
  }
  if (zero_frac < 0.0 || zero_frac > 1.0) {
    throw std::invalid_argument("generate_synthetic: zero_frac must be in [0, 1]");
  }
  rng gen(seed);

  Eigen::MatrixXd x(n, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) {
      x(i, j) = gen.normal();
    }
  }

  Eigen::VectorXd beta_star(p);
  for (int j = 0; j < p; ++j) {
    beta_star[j] = gen.laplace(1.0);
  }

  // Partial Fisher-Yates picks which coordinates are zeroed.
  const int zeros = static_cast<int>(std::floor(zero_frac * p));
  std::vector<int> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < zeros; ++i) {
    const std::uint64_t k =
        static_cast<std::uint64_t>(i) + gen.below(static_cast<std::uint64_t>(p - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(k)]);
    beta_star[idx[static_cast<std::size_t>(i)]] = 0.0;
  }

  Eigen::VectorXd y = x * beta_star;
  for (int i = 0; i < n; ++i) {
    y[i] += noise_sd * gen.normal();
  }

  if (normalize_columns) {
    normalize_in_place(x);
  }
  return problem::quadratic(design_matrix::dense(std::move(x)), std::move(y));
}

problem load_svmlight(const std::string& path, bool normalize_columns) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("load_svmlight: cannot open " + path);
  }
  std::vector<double> labels;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::Index max_col = -1;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ls(line);
    double label;
    if (!(ls >> label)) {
      continue;  // blank or comment-only line
    }
    if (!std::isfinite(label)) {
      throw data_error("load_svmlight: non-finite label", line_no);
    }
    const Eigen::Index row = static_cast<Eigen::Index>(labels.size());
    labels.push_back(label);
    std::string tok;
    long prev_idx = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) {
        throw data_error("load_svmlight: expected idx:val, got '" + tok + "'", line_no);
      }
      long idx1 = 0;
      double val = 0.0;
      try {
        std::size_t used = 0;
        idx1 = std::stol(tok.substr(0, colon), &used);
        if (used != colon) {
          throw std::invalid_argument("trailing characters");
        }
        val = std::stod(tok.substr(colon + 1));
      } catch (const std::exception&) {
        throw data_error("load_svmlight: malformed entry '" + tok + "'", line_no);
      }
      if (idx1 <= prev_idx) {
        throw data_error("load_svmlight: indices must be ascending and 1-based", line_no);
      }
      if (!std::isfinite(val)) {
        throw data_error("load_svmlight: non-finite value", line_no);
      }
      prev_idx = idx1;
      const Eigen::Index col = static_cast<Eigen::Index>(idx1 - 1);
      max_col = std::max(max_col, col);
      triplets.emplace_back(row, col, val);
    }
  }
  if (labels.empty()) {
    throw data_error("load_svmlight: no data rows in " + path);
  }
  const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
  const Eigen::Index p = max_col + 1;
  if (p < 1) {
    throw data_error("load_svmlight: no features in " + path);
  }
  Eigen::SparseMatrix<double> x(n, p);
  x.setFromTriplets(triplets.begin(), triplets.end());
  if (normalize_columns) {
    normalize_in_place(x);
  }
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(labels.data(), n);
  return problem::quadratic(design_matrix::sparse(std::move(x)), std::move(y));
}

problem load_csv(const std::string& path, const std::string& target_column, bool has_header,
                 bool normalize_columns) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("load_csv: cannot open " + path);
  }
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      cells.push_back(cell);
    }
    return cells;
  };

  std::string line;
  long line_no = 0;
  std::vector<std::string> header;
  if (has_header) {
    if (!std::getline(in, line)) {
      throw data_error("load_csv: empty file " + path);
    }
    ++line_no;
    header = split(line);
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto cells = split(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw data_error("load_csv: cannot parse '" + c + "'", line_no);
      }
      if (!std::isfinite(row.back())) {
        throw data_error("load_csv: non-finite value", line_no);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw data_error("load_csv: inconsistent column count", line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw data_error("load_csv: no data rows in " + path);
  }
  const Eigen::Index cols = static_cast<Eigen::Index>(rows.front().size());

  Eigen::Index target = -1;
  if (!header.empty()) {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == target_column) {
        target = static_cast<Eigen::Index>(k);
        break;
      }
    }
  }
  if (target < 0) {
    try {
      target = static_cast<Eigen::Index>(std::stol(target_column));
    } catch (const std::exception&) {
      throw data_error("load_csv: unknown target column '" + target_column + "'");
    }
  }
  if (target < 0 || target >= cols) {
    throw data_error("load_csv: target column out of range");
  }
  if (cols < 2) {
    throw data_error("load_csv: need at least one feature column besides the target");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, cols - 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index jj = 0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (j == target) {
        y[i] = v;
      } else {
        x(i, jj++) = v;
      }
    }
  }
  if (normalize_columns) {
    normalize_in_place(x);
  }
  return problem::quadratic(design_matrix::dense(std::move(x)), std::move(y));
}

problem load_dataset(const dataset_spec& spec) {
  switch (spec.source) {
    case dataset_spec::source_kind::synthetic:
      return generate_synthetic(spec.n, spec.p, spec.zero_frac, spec.noise_sd, spec.seed,
                                spec.normalize_columns);
    case dataset_spec::source_kind::svmlight:
      return load_svmlight(spec.path, spec.normalize_columns);
    case dataset_spec::source_kind::csv_dense:
      return load_csv(spec.path, spec.target_column, spec.csv_has_header,
                      spec.normalize_columns);
  }
  throw std::invalid_argument("load_dataset: unknown source");
}

void write_svmlight(const std::string& path, const design_matrix& x,
                    const Eigen::VectorXd& y) {
  std::ofstream out(path);
  if (!out) {
    throw data_error("write_svmlight: cannot open " + path + " for writing");
  }
  if (const auto* dense = x.dense_data()) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out << fmt_double(y[i]);
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double v = (*dense)(i, j);
        if (v != 0.0) {
          out << ' ' << (j + 1) << ':' << fmt_double(v);
        }
      }
      out << '\n';
    }
  } else {
    const Eigen::SparseMatrix<double, Eigen::RowMajor> by_row(*x.sparse_data());
    for (Eigen::Index i = 0; i < by_row.rows(); ++i) {
      out << fmt_double(y[i]);
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(by_row, i); it;
           ++it) {
        if (it.value() != 0.0) {
          out << ' ' << (it.index() + 1) << ':' << fmt_double(it.value());
        }
      }
      out << '\n';
    }
  }
  if (!out) {
    throw data_error("write_svmlight: write failed for " + path);
  }
}

namespace {

void append_kv(std::string& s, const char* key, const std::string& value, bool quote,
               bool last = false) {
  s += '"';
  s += key;
  s += "\": ";
  if (quote) {
    s += '"';
    s += value;
    s += '"';
  } else {
    s += value;
  }
  if (!last) {
    s += ", ";
  }
}

}  // namespace

std::string trace_to_json(const run_result& result, const trace_meta& meta,
                          bool include_timings) {
  std::string s = "{\n  \"meta\": {";
  append_kv(s, "policy", meta.policy, true);
  append_kv(s, "r", fmt_double(meta.r), false);
  append_kv(s, "eps", fmt_double(meta.eps), false);
  append_kv(s, "lambda", fmt_double(meta.lambda), false);
  append_kv(s, "dataset", meta.dataset, true);
  append_kv(s, "seed", std::to_string(meta.seed), false);
  append_kv(s, "version", meta.version, true);
  append_kv(s, "lambda_requested", fmt_double(meta.lambda_requested), false);
  append_kv(s, "eps_requested", fmt_double(meta.eps_requested), false);
  append_kv(s, "terminated_by", meta.terminated_by, true, true);
  s += "},\n  \"steps\": [";
  for (std::size_t i = 0; i < result.trace.steps.size(); ++i) {
    const step_record& r = result.trace.steps[i];
    s += i == 0 ? "\n    {" : ",\n    {";
    append_kv(s, "t", std::to_string(r.t), false);
    append_kv(s, "lambda_t", fmt_double(r.lambda_t), false);
    append_kv(s, "eps_t", fmt_double(r.eps_t), false);
    append_kv(s, "inner_iterations", std::to_string(r.inner_iterations), false);
    append_kv(s, "gap_local", fmt_double(r.gap_local), false);
    append_kv(s, "gap_at_target", fmt_double(r.gap_at_target), false);
    append_kv(s, "e_t", fmt_double(r.e_t), false);
    append_kv(s, "delta_t", fmt_double(r.delta_t), false);
    append_kv(s, "active_set_size", std::to_string(r.active_set_size), false);
    append_kv(s, "working_set_size", std::to_string(r.working_set_size), false);
    append_kv(s, "f_val", fmt_double(r.f_val), false);
    append_kv(s, "wall_nanoseconds",
              std::to_string(include_timings ? r.wall_nanoseconds : 0), false, true);
    s += '}';
  }
  s += "\n  ],\n  \"certificates\": [";
  for (std::size_t i = 0; i < result.certificates.size(); ++i) {
    const certificate_record& c = result.certificates[i];
    s += i == 0 ? "\n    {" : ",\n    {";
    append_kv(s, "t", std::to_string(c.t), false);
    append_kv(s, "descent_applicable", c.descent_applicable ? "true" : "false", false);
    append_kv(s, "descent_slack", fmt_double(c.descent_slack), false);
    append_kv(s, "contraction", fmt_double(c.contraction), false);
    append_kv(s, "residual_decrease_ok", c.residual_decrease_ok ? "true" : "false", false);
    append_kv(s, "screening_saturated", c.screening_saturated ? "true" : "false", false,
              true);
    s += '}';
  }
  s += "\n  ]";
  if (!result.screen_masks.empty()) {
    s += ",\n  \"screening_masks\": [";
    for (std::size_t i = 0; i < result.screen_masks.size(); ++i) {
      s += i == 0 ? "\n    \"" : ",\n    \"";
      for (char c : result.screen_masks[i]) {
        s += c ? '1' : '0';
      }
      s += '"';
    }
    s += "\n  ]";
  }
  s += "\n}\n";
  return s;
}

void write_trace(const run_result& result, const trace_meta& meta, const std::string& path,
                 bool include_timings) {
  std::ofstream out(path);
  if (!out) {
    throw data_error("write_trace: cannot open " + path + " for writing");
  }
  out << trace_to_json(result, meta, include_timings);
  if (!out) {
    throw data_error("write_trace: write failed for " + path);
  }
}

parsed_trace read_trace_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("read_trace: ") + e.what());
  }
  parsed_trace out;
  try {
    const auto& meta = doc.at("meta");
    out.meta.policy = meta.at("policy").get<std::string>();
    out.meta.r = meta.at("r").get<double>();
    out.meta.eps = meta.at("eps").get<double>();
    out.meta.lambda = meta.at("lambda").get<double>();
    out.meta.dataset = meta.at("dataset").get<std::string>();
    out.meta.seed = meta.at("seed").get<std::uint64_t>();
    out.meta.version = meta.at("version").get<std::string>();
    out.meta.lambda_requested = meta.at("lambda_requested").get<double>();
    out.meta.eps_requested = meta.at("eps_requested").get<double>();
    out.meta.terminated_by = meta.at("terminated_by").get<std::string>();
    if (out.meta.terminated_by == "reached_lambda") {
      out.trace.terminated_by = termination::reached_lambda;
    } else if (out.meta.terminated_by == "target_gap_met") {
      out.trace.terminated_by = termination::target_gap_met;
    } else {
      out.trace.terminated_by = termination::budget_exceeded;
    }
    for (const auto& js : doc.at("steps")) {
      step_record r;
      r.t = js.at("t").get<int>();
      r.lambda_t = js.at("lambda_t").get<double>();
      r.eps_t = js.at("eps_t").get<double>();
      r.inner_iterations = js.at("inner_iterations").get<std::int64_t>();
      r.gap_local = js.at("gap_local").get<double>();
      r.gap_at_target = js.at("gap_at_target").get<double>();
      r.e_t = js.at("e_t").get<double>();
      r.delta_t = js.at("delta_t").get<double>();
      r.active_set_size = js.at("active_set_size").get<std::int64_t>();
      r.working_set_size = js.at("working_set_size").get<std::int64_t>();
      r.f_val = js.at("f_val").get<double>();
      r.wall_nanoseconds = js.at("wall_nanoseconds").get<std::int64_t>();
      out.trace.steps.push_back(r);
    }
    for (const auto& jc : doc.at("certificates")) {
      certificate_record c;
      c.t = jc.at("t").get<int>();
      c.descent_applicable = jc.at("descent_applicable").get<bool>();
      c.descent_slack = jc.at("descent_slack").get<double>();
      c.contraction = jc.at("contraction").get<double>();
      c.residual_decrease_ok = jc.at("residual_decrease_ok").get<bool>();
      c.screening_saturated = jc.value("screening_saturated", false);
      out.certificates.push_back(c);
    }
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("read_trace: bad schema: ") + e.what());
  }
  return out;
}

parsed_trace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("read_trace: cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_trace_json(buf.str());
}

}  // namespace contpath
