#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace shapeak {

using Vec = Eigen::VectorXd;
using DenseMat = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<double>;

// Dense-or-sparse matrix wrapper; the solver and oracles only need products,
// transposed products, and a handful of norms.
class Mat {
 public:
  Mat() = default;
  explicit Mat(DenseMat m) : dense_(std::move(m)), is_sparse_(false) {}
  explicit Mat(SparseMat m) : sparse_(std::move(m)), is_sparse_(true) {
    sparse_.makeCompressed();
  }

  bool is_sparse() const { return is_sparse_; }
  Eigen::Index rows() const { return is_sparse_ ? sparse_.rows() : dense_.rows(); }
  Eigen::Index cols() const { return is_sparse_ ? sparse_.cols() : dense_.cols(); }

  const DenseMat& dense() const { return dense_; }
  const SparseMat& sparse() const { return sparse_; }

  Vec apply(const Vec& v) const {
    return is_sparse_ ? Vec(sparse_ * v) : Vec(dense_ * v);
  }
  Vec apply_transpose(const Vec& v) const {
    return is_sparse_ ? Vec(sparse_.transpose() * v) : Vec(dense_.transpose() * v);
  }

  double frobenius_norm() const {
    return is_sparse_ ? sparse_.norm() : dense_.norm();
  }

  // (M + M^T)/2, preserving storage kind.
  Mat symmetrized() const;

  // Gram matrix M^T M, preserving storage kind.
  Mat gram() const;

  // Largest singular value estimated by power iteration on M^T M.
  double operator_norm(int iters = 200, double tol = 1e-10) const;

 private:
  DenseMat dense_;
  SparseMat sparse_;
  bool is_sparse_ = false;
};

}  // namespace shapeak
