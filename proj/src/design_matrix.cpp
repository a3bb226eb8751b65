#include "contpath/design_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace contpath {

namespace {

void check_shape(Eigen::Index n, Eigen::Index p) {
  if (n < 1 || p < 1) {
    throw std::invalid_argument("design matrix must have n >= 1 rows and p >= 1 columns");
  }
}

}  // namespace

design_matrix::design_matrix(std::variant<dense_storage, sparse_storage> storage)
    : storage_(std::move(storage)) {
  if (const auto* d = std::get_if<dense_storage>(&storage_)) {
    n_ = d->rows();
    p_ = d->cols();
    check_shape(n_, p_);
    col_norms_ = d->colwise().norm();
  } else {
    const auto& s = std::get<sparse_storage>(storage_);
    n_ = s.rows();
    p_ = s.cols();
    check_shape(n_, p_);
    col_norms_.resize(p_);
    for (Eigen::Index j = 0; j < p_; ++j) {
      double sq = 0.0;
      Eigen::Index prev = -1;
      for (sparse_storage::InnerIterator it(s, j); it; ++it) {
        if (it.index() <= prev || it.index() >= n_) {
          throw std::invalid_argument("sparse column indices must be strictly increasing in [0, n)");
        }
        prev = it.index();
        sq += it.value() * it.value();
      }
      col_norms_[j] = std::sqrt(sq);
    }
  }
}

design_matrix design_matrix::dense(Eigen::MatrixXd x) {
  return design_matrix(std::variant<dense_storage, sparse_storage>(std::move(x)));
}

design_matrix design_matrix::sparse(Eigen::SparseMatrix<double> x) {
  x.makeCompressed();
  return design_matrix(std::variant<dense_storage, sparse_storage>(std::move(x)));
}

double design_matrix::col_dot(Eigen::Index j, const Eigen::VectorXd& v) const {
  if (const auto* d = std::get_if<dense_storage>(&storage_)) {
    return d->col(j).dot(v);
  }
  const auto& s = std::get<sparse_storage>(storage_);
  double acc = 0.0;
  for (sparse_storage::InnerIterator it(s, j); it; ++it) {
    acc += it.value() * v[it.index()];
  }
  return acc;
}

void design_matrix::add_col(Eigen::Index j, double a, Eigen::VectorXd& v) const {
  if (const auto* d = std::get_if<dense_storage>(&storage_)) {
    v += a * d->col(j);
    return;
  }
  const auto& s = std::get<sparse_storage>(storage_);
  for (sparse_storage::InnerIterator it(s, j); it; ++it) {
    v[it.index()] += a * it.value();
  }
}

Eigen::VectorXd design_matrix::multiply(const Eigen::VectorXd& beta) const {
  if (beta.size() != p_) {
    throw std::invalid_argument("multiply: beta has wrong length");
  }
  if (const auto* d = std::get_if<dense_storage>(&storage_)) {
    return (*d) * beta;
  }
  return std::get<sparse_storage>(storage_) * beta;
}

Eigen::VectorXd design_matrix::correlations(const Eigen::VectorXd& v) const {
  if (v.size() != n_) {
    throw std::invalid_argument("correlations: vector has wrong length");
  }
  if (const auto* d = std::get_if<dense_storage>(&storage_)) {
    return d->transpose() * v;
  }
  return std::get<sparse_storage>(storage_).transpose() * v;
}

double design_matrix::max_abs_correlation(const Eigen::VectorXd& v) const {
  return correlations(v).cwiseAbs().maxCoeff();
}

design_matrix::design_matrix(const design_matrix& other)
    : storage_(other.storage_), n_(other.n_), p_(other.p_), col_norms_(other.col_norms_) {}

design_matrix& design_matrix::operator=(const design_matrix& other) {
  if (this != &other) {
    storage_ = other.storage_;
    n_ = other.n_;
    p_ = other.p_;
    col_norms_ = other.col_norms_;
    spectral_ = std::make_unique<spectral_cache>();
  }
  return *this;
}

double design_matrix::spectral_norm() const {
  std::call_once(spectral_->flag, [this] {
    // Deterministic start vector; 100 power iterations or relative tol 1e-6.
    Eigen::VectorXd v(p_);
    std::uint64_t s = 0x9e3779b97f4a7c15ULL;
    for (Eigen::Index j = 0; j < p_; ++j) {
      s ^= s << 13;
      s ^= s >> 7;
      s ^= s << 17;
      v[j] = static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
    }
    double vn = v.norm();
    if (vn == 0.0) {
      v.setOnes();
      vn = v.norm();
    }
    v /= vn;
    double sigma_sq = 0.0;
    for (int it = 0; it < 100; ++it) {
      Eigen::VectorXd w = correlations(multiply(v));
      const double wn = w.norm();
      if (wn == 0.0) {
        sigma_sq = 0.0;
        break;
      }
      const double next = v.dot(w);
      v = w / wn;
      if (it > 0 && std::abs(next - sigma_sq) <= 1e-6 * std::abs(next)) {
        sigma_sq = next;
        break;
      }
      sigma_sq = next;
    }
    spectral_->value = std::sqrt(std::max(sigma_sq, 0.0));
  });
  return spectral_->value;
}

}  // namespace contpath
