#pragma once

#include <functional>
#include <memory>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include "shapeak/matrix.hpp"

namespace shapeak {

// Preconditioning matrix Q^k for the linearized x-update. The solve
// (sigma*I + M)^-1 v caches one factorization per sigma; M is constant
// across iterations so the cost amortizes.
class Preconditioner {
 public:
  enum class Kind { Zero, FixedMatrix, DiagonalScaled };

  Preconditioner() = default;
  static Preconditioner zero();
  static Preconditioner fixed(Mat m);
  static Preconditioner diagonal(Vec d);

  Kind kind() const { return kind_; }
  double lambda_bound() const { return lambda_; }
  Eigen::Index dim() const;

  // M*v (Zero acts on any dimension).
  Vec apply(const Vec& v) const;

  // (sigma*I + M)^-1 v to relative residual <= 1e-10.
  Vec apply_inverse(double sigma, const Vec& v);

 private:
  Kind kind_ = Kind::Zero;
  Mat m_;
  Vec diag_;
  double lambda_ = 0.0;

  // factorization cache, keyed by sigma (pointers keep the class movable;
  // Eigen decompositions are not)
  double cached_sigma_ = -1.0;
  std::unique_ptr<Eigen::LDLT<DenseMat>> dense_fact_;
  std::unique_ptr<Eigen::SimplicialLDLT<SparseMat>> sparse_fact_;
  bool use_cg_ = false;
  SparseMat cg_matrix_;
};

Vec apply_inverse(Preconditioner& p, double sigma, const Vec& v);

// Capability bundle: f, grad f, the preconditioner policy, and curvature
// hints used to pick sigma.
struct ObjectiveOracle {
  Eigen::Index n = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::shared_ptr<Preconditioner> precond;
  double lambda_bound = 0.0;                 // >= ||Q^k||
  std::optional<double> lipschitz_hint;      // beta, gradient Lipschitz bound on the box

  // Populated for quadratic objectives; enables the exact penalty-threshold
  // interval computation and the Gray-code enumerator.
  bool is_quadratic = false;
  Mat quad_sym;  // (Q + Q^T)/2
  Vec quad_lin;  // q
};

// f(x) = 0.5 <x,Qx> + <q,x>. A non-symmetric Q is accepted: f uses the
// original bilinear form, the gradient uses (Q+Q^T)/2 (identical f values).
// The preconditioner defaults to Zero (the right choice for indefinite Q).
ObjectiveOracle quadratic_oracle(const Mat& Q, const Vec& q,
                                 Preconditioner pre = Preconditioner::zero());

// f(x) = 0.5 * sum |(Ax-b)_i|^exponent, exponent > 1. exponent == 2 fixes the
// preconditioner to A^T A; otherwise a scaled diagonal of A^T A is used,
// capped at lambda_cap when given.
ObjectiveOracle recovery_oracle(const Mat& A, const Vec& b, double exponent,
                                std::optional<double> lambda_cap = std::nullopt);

// Negative log-likelihood of one-bit measurements y = sgn(H(2x-1) + noise):
// f(x) = -sum log Phi((y_i/rho) <h_i, 2x-1>), preconditioner (4/rho^2) H^T H.
ObjectiveOracle onebit_oracle(const Mat& H, const Vec& y, double rho);

// f identically zero (fixed-point and certificate edge cases).
ObjectiveOracle zero_oracle(Eigen::Index n);

// Numerically stable standard-normal helpers (asymptotic series for t < -8).
double log_norm_cdf(double t);
double norm_pdf_over_cdf(double t);

}  // namespace shapeak
