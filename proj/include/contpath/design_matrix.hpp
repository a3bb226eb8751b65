#ifndef CONTPATH_DESIGN_MATRIX_HPP
#define CONTPATH_DESIGN_MATRIX_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <memory>
#include <mutex>
#include <variant>

namespace contpath {

// Design matrix with dense column-major or sparse compressed-column storage.
// Per-column Euclidean norms are cached at construction. Immutable afterwards
// and safe to share across threads.
class design_matrix {
 public:
  using dense_storage = Eigen::MatrixXd;
  using sparse_storage = Eigen::SparseMatrix<double>;  // column-major

  static design_matrix dense(Eigen::MatrixXd x);
  static design_matrix sparse(Eigen::SparseMatrix<double> x);

  Eigen::Index rows() const noexcept { return n_; }
  Eigen::Index cols() const noexcept { return p_; }
  bool is_sparse() const noexcept { return std::holds_alternative<sparse_storage>(storage_); }

  const Eigen::VectorXd& col_norms() const noexcept { return col_norms_; }
  double col_norm(Eigen::Index j) const { return col_norms_[j]; }

  // X_j^T v
  double col_dot(Eigen::Index j, const Eigen::VectorXd& v) const;
  // v += a * X_j
  void add_col(Eigen::Index j, double a, Eigen::VectorXd& v) const;
  // X * beta
  Eigen::VectorXd multiply(const Eigen::VectorXd& beta) const;
  // X^T v
  Eigen::VectorXd correlations(const Eigen::VectorXd& v) const;
  // ||X^T v||_inf
  double max_abs_correlation(const Eigen::VectorXd& v) const;

  // Largest singular value, estimated by power iteration on X^T X
  // (deterministically seeded, cached after the first call).
  double spectral_norm() const;

  const dense_storage* dense_data() const noexcept { return std::get_if<dense_storage>(&storage_); }
  const sparse_storage* sparse_data() const noexcept { return std::get_if<sparse_storage>(&storage_); }

  design_matrix(const design_matrix& other);
  design_matrix& operator=(const design_matrix& other);
  design_matrix(design_matrix&&) noexcept = default;
  design_matrix& operator=(design_matrix&&) noexcept = default;

 private:
  explicit design_matrix(std::variant<dense_storage, sparse_storage> storage);

  struct spectral_cache {
    std::once_flag flag;
    double value = 0.0;
  };

  std::variant<dense_storage, sparse_storage> storage_;
  Eigen::Index n_ = 0;
  Eigen::Index p_ = 0;
  Eigen::VectorXd col_norms_;
  mutable std::unique_ptr<spectral_cache> spectral_ = std::make_unique<spectral_cache>();
};

}  // namespace contpath

#endif  // CONTPATH_DESIGN_MATRIX_HPP
