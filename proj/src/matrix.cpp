#include "shapeak/matrix.hpp"

#include <cmath>

namespace shapeak {

Mat Mat::symmetrized() const {
  if (is_sparse_) {
    SparseMat t = sparse_.transpose();
    return Mat(SparseMat(0.5 * (sparse_ + t)));
  }
  return Mat(DenseMat(0.5 * (dense_ + dense_.transpose())));
}

Mat Mat::gram() const {
  if (is_sparse_) {
    SparseMat t = sparse_.transpose();
    return Mat(SparseMat(t * sparse_));
  }
  return Mat(DenseMat(dense_.transpose() * dense_));
}

double Mat::operator_norm(int iters, double tol) const {
  const Eigen::Index n = cols();
  if (n == 0 || rows() == 0) return 0.0;
  // Deterministic start vector with a touch of asymmetry so it is never
  // orthogonal to the top singular subspace in structured cases.
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(double(i + 1));
  v.normalize();
  double prev = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec u = apply_transpose(apply(v));
    const double nrm = u.norm();
    if (nrm == 0.0) return 0.0;
    v = u / nrm;
    const double est = std::sqrt(nrm);
    if (std::abs(est - prev) <= tol * std::max(1.0, est)) return est;
    prev = est;
  }
  return prev;
}

}  // namespace shapeak
