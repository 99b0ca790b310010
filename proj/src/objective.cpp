#include "shapeak/objective.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>

namespace shapeak {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274;
constexpr Eigen::Index kDirectSolveLimit = 50000;
}  // namespace

double log_norm_cdf(double t) {
  if (t >= -8.0) return std::log(0.5 * std::erfc(-t / std::sqrt(2.0)));
  // Phi(t) = phi(t)/(-t) * (1 - 1/t^2 + 3/t^4 - 15/t^6 + 105/t^8 - ...)
  const double s = 1.0 / (t * t);
  const double series = 1.0 - s * (1.0 - s * (3.0 - s * (15.0 - s * 105.0)));
  return -0.5 * t * t - kHalfLog2Pi - std::log(-t) + std::log(series);
}

double norm_pdf_over_cdf(double t) {
  if (t >= -8.0) {
    const double pdf = std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
    return pdf / (0.5 * std::erfc(-t / std::sqrt(2.0)));
  }
  const double s = 1.0 / (t * t);
  const double series = 1.0 - s * (1.0 - s * (3.0 - s * (15.0 - s * 105.0)));
  return -t / series;
}

Preconditioner Preconditioner::zero() { return Preconditioner(); }

Preconditioner Preconditioner::fixed(Mat m) {
  Preconditioner p;
  p.kind_ = Kind::FixedMatrix;
  p.lambda_ = m.operator_norm();
  p.m_ = std::move(m);
  p.use_cg_ = p.m_.rows() > kDirectSolveLimit;
  return p;
}

Preconditioner Preconditioner::diagonal(Vec d) {
  Preconditioner p;
  p.kind_ = Kind::DiagonalScaled;
  p.lambda_ = d.size() ? d.maxCoeff() : 0.0;
  p.diag_ = std::move(d);
  return p;
}

Eigen::Index Preconditioner::dim() const {
  switch (kind_) {
    case Kind::Zero: return -1;  // acts on any dimension
    case Kind::FixedMatrix: return m_.rows();
    case Kind::DiagonalScaled: return diag_.size();
  }
  return -1;
}

Vec Preconditioner::apply(const Vec& v) const {
  switch (kind_) {
    case Kind::Zero: return Vec::Zero(v.size());
    case Kind::FixedMatrix: return m_.apply(v);
    case Kind::DiagonalScaled: return diag_.cwiseProduct(v);
  }
  return Vec::Zero(v.size());
}

Vec Preconditioner::apply_inverse(double sigma, const Vec& v) {
  if (!(sigma > 0.0)) throw std::invalid_argument("apply_inverse: sigma must be > 0");
  switch (kind_) {
    case Kind::Zero:
      return v / sigma;
    case Kind::DiagonalScaled:
      return v.cwiseQuotient(Vec(diag_.array() + sigma));
    case Kind::FixedMatrix:
      break;
  }
  if (use_cg_) {
    if (sigma != cached_sigma_) {
      SparseMat id(m_.rows(), m_.cols());
      id.setIdentity();
      cg_matrix_ = m_.is_sparse() ? SparseMat(m_.sparse() + sigma * id)
                                  : SparseMat(m_.dense().sparseView() + sigma * id);
      cached_sigma_ = sigma;
    }
    Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-12);
    cg.compute(cg_matrix_);
    return cg.solve(v);
  }
  if (sigma != cached_sigma_) {
    if (m_.is_sparse()) {
      SparseMat id(m_.rows(), m_.cols());
      id.setIdentity();
      sparse_fact_ = std::make_unique<Eigen::SimplicialLDLT<SparseMat>>();
      sparse_fact_->compute(SparseMat(m_.sparse() + sigma * id));
      if (sparse_fact_->info() != Eigen::Success)
        throw std::runtime_error("apply_inverse: factorization of sigma*I + M failed");
    } else {
      dense_fact_ = std::make_unique<Eigen::LDLT<DenseMat>>();
      dense_fact_->compute(m_.dense() +
                           sigma * DenseMat::Identity(m_.rows(), m_.cols()));
      if (dense_fact_->info() != Eigen::Success)
        throw std::runtime_error("apply_inverse: factorization of sigma*I + M failed");
    }
    cached_sigma_ = sigma;
  }
  return m_.is_sparse() ? Vec(sparse_fact_->solve(v)) : Vec(dense_fact_->solve(v));
}

Vec apply_inverse(Preconditioner& p, double sigma, const Vec& v) {
  return p.apply_inverse(sigma, v);
}

ObjectiveOracle quadratic_oracle(const Mat& Q, const Vec& q, Preconditioner pre) {
  if (Q.rows() != Q.cols()) throw std::invalid_argument("quadratic_oracle: Q not square");
  if (Q.rows() != q.size())
    throw std::invalid_argument("quadratic_oracle: dimension mismatch");
  ObjectiveOracle o;
  o.n = q.size();
  auto Qp = std::make_shared<Mat>(Q);
  auto Sp = std::make_shared<Mat>(Q.symmetrized());
  auto qp = std::make_shared<Vec>(q);
  o.value = [Qp, qp](const Vec& x) {
    return 0.5 * x.dot(Qp->apply(x)) + qp->dot(x);
  };
  o.gradient = [Sp, qp](const Vec& x) { return Vec(Sp->apply(x) + *qp); };
  o.precond = std::make_shared<Preconditioner>(std::move(pre));
  o.lambda_bound = o.precond->lambda_bound();
  o.lipschitz_hint = Sp->operator_norm();
  o.is_quadratic = true;
  o.quad_sym = *Sp;
  o.quad_lin = q;
  return o;
}

ObjectiveOracle recovery_oracle(const Mat& A, const Vec& b, double exponent,
                                std::optional<double> lambda_cap) {
  if (!(exponent > 1.0))
    throw std::invalid_argument("recovery_oracle: exponent must be > 1");
  if (A.rows() != b.size())
    throw std::invalid_argument("recovery_oracle: dimension mismatch");
  ObjectiveOracle o;
  o.n = A.cols();
  auto Ap = std::make_shared<Mat>(A);
  auto bp = std::make_shared<Vec>(b);
  const double qe = exponent;
  o.value = [Ap, bp, qe](const Vec& x) {
    const Vec r = Ap->apply(x) - *bp;
    return 0.5 * r.array().abs().pow(qe).sum();
  };
  o.gradient = [Ap, bp, qe](const Vec& x) {
    const Vec r = Ap->apply(x) - *bp;
    const Vec s = (r.array().abs().pow(qe - 1.0) * r.array().sign()).matrix();
    return Vec(0.5 * qe * Ap->apply_transpose(s));
  };
  Mat gram = A.gram();
  if (exponent == 2.0) {
    o.precond = std::make_shared<Preconditioner>(Preconditioner::fixed(gram));
    o.lipschitz_hint = o.precond->lambda_bound();
  } else {
    // Diagonal Hessian surrogate at x0 = 0: diag(A^T A) scaled by the
    // q-dependent curvature of |r|^q at the largest residual.
    Vec d = gram.is_sparse() ? Vec(gram.sparse().diagonal()) : Vec(gram.dense().diagonal());
    const double rmax = b.size() ? b.array().abs().maxCoeff() : 0.0;
    const double scale = rmax > 0.0 ? qe * (qe - 1.0) * std::pow(rmax, qe - 2.0) : 0.0;
    d *= 0.5 * scale;
    if (lambda_cap && d.size() && d.maxCoeff() > *lambda_cap)
      d *= *lambda_cap / d.maxCoeff();
    o.precond = std::make_shared<Preconditioner>(Preconditioner::diagonal(std::move(d)));
  }
  o.lambda_bound = o.precond->lambda_bound();
  return o;
}

ObjectiveOracle onebit_oracle(const Mat& H, const Vec& y, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("onebit_oracle: rho must be > 0");
  if (H.rows() != y.size())
    throw std::invalid_argument("onebit_oracle: dimension mismatch");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 1.0 && y[i] != -1.0)
      throw std::invalid_argument("onebit_oracle: y entries must be +-1");
  ObjectiveOracle o;
  o.n = H.cols();
  auto Hp = std::make_shared<Mat>(H);
  auto yp = std::make_shared<Vec>(y);
  o.value = [Hp, yp, rho](const Vec& x) {
    const Vec t = (yp->array() * Hp->apply(2.0 * x - Vec::Ones(x.size())).array() / rho)
                      .matrix();
    double f = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) f -= log_norm_cdf(t[i]);
    return f;
  };
  o.gradient = [Hp, yp, rho](const Vec& x) {
    const Vec t = (yp->array() * Hp->apply(2.0 * x - Vec::Ones(x.size())).array() / rho)
                      .matrix();
    Vec r(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) r[i] = norm_pdf_over_cdf(t[i]);
    return Vec(-(2.0 / rho) * Hp->apply_transpose(yp->cwiseProduct(r)));
  };
  // y o y = 1, so the stated H^T diag(y o y) H is just the Gram matrix; the
  // factor 4/rho^2 carries the binary-to-sign substitution and noise scale.
  Mat gram = H.gram();
  Mat scaled = gram.is_sparse() ? Mat(SparseMat((4.0 / (rho * rho)) * gram.sparse()))
                                : Mat(DenseMat((4.0 / (rho * rho)) * gram.dense()));
  o.precond = std::make_shared<Preconditioner>(Preconditioner::fixed(std::move(scaled)));
  o.lambda_bound = o.precond->lambda_bound();
  // -log Phi has second derivative in (0,1), so the preconditioner also
  // bounds the Hessian on the whole box.
  o.lipschitz_hint = o.lambda_bound;
  return o;
}

ObjectiveOracle zero_oracle(Eigen::Index n) {
  ObjectiveOracle o;
  o.n = n;
  o.value = [](const Vec&) { return 0.0; };
  o.gradient = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  o.precond = std::make_shared<Preconditioner>(Preconditioner::zero());
  o.lambda_bound = 0.0;
  o.lipschitz_hint = 0.0;
  o.is_quadratic = true;
  o.quad_sym = Mat(DenseMat(DenseMat::Zero(n, n)));
  o.quad_lin = Vec::Zero(n);
  return o;
}

}  // namespace shapeak
