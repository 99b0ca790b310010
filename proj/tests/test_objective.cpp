#include <doctest.h>

#include <cmath>

#include "shapeak/objective.hpp"
#include "shapeak/oracle.hpp"
#include "shapeak/rng.hpp"

using namespace shapeak;

namespace {

// The 2-d indefinite quadratic used as a worked case throughout the tests:
// Q = [[1,-1],[-2,0]], q = (-2, 1/2); global binary minimizer (1,1), f = -2.5.
ObjectiveOracle worked_quadratic() {
  DenseMat Q(2, 2);
  Q << 1, -1, -2, 0;
  Vec q(2);
  q << -2, 0.5;
  return quadratic_oracle(Mat(Q), q);
}

Mat random_dense(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Rng rng(seed, 0);
  DenseMat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return Mat(m);
}

}  // namespace

TEST_CASE("quadratic oracle with non-symmetric input") {
  const auto o = worked_quadratic();
  Vec x(2);
  x << 1, 1;
  CHECK(o.value(x) == doctest::Approx(-2.5).epsilon(1e-15));
  const Vec g = o.gradient(x);
  CHECK(g[0] == doctest::Approx(-2.5).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(-1.0).epsilon(1e-15));
  x << 0, 0;
  CHECK(o.value(x) == 0.0);
  CHECK(o.is_quadratic);
  CHECK(finite_diff_check(o, 100, 1e-5).passed);
}

TEST_CASE("recovery oracle basics") {
  const Mat A = random_dense(12, 8, 11);
  Rng rng(12, 1);
  Vec x(8);
  for (Eigen::Index i = 0; i < 8; ++i) x[i] = rng.uniform_index(2);

  SUBCASE("zero residual gives zero value and gradient") {
    const Vec b = A.apply(x);
    const auto o = recovery_oracle(A, b, 2.0);
    CHECK(o.value(x) == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(o.gradient(x).norm() == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("exponent 2 reduces to least squares") {
    Vec b(12);
    for (Eigen::Index i = 0; i < 12; ++i) b[i] = rng.normal();
    const auto o = recovery_oracle(A, b, 2.0);
    const Vec r = A.apply(x) - b;
    CHECK(o.value(x) == doctest::Approx(0.5 * r.squaredNorm()).epsilon(1e-12));
    CHECK((o.gradient(x) - A.apply_transpose(r)).norm() < 1e-10);
    CHECK(finite_diff_check(o, 100, 1e-5).passed);
  }
  SUBCASE("exponent 1.5 gradient matches finite differences") {
    Vec b(12);
    for (Eigen::Index i = 0; i < 12; ++i) b[i] = rng.normal();
    const auto o = recovery_oracle(A, b, 1.5);
    CHECK(finite_diff_check(o, 100, 1e-5).passed);
  }
  SUBCASE("exponent <= 1 rejected") {
    CHECK_THROWS(recovery_oracle(A, Vec::Zero(12), 1.0));
  }
}

TEST_CASE("stable normal log-cdf helpers") {
  CHECK(-log_norm_cdf(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(-log_norm_cdf(-10.0) == doctest::Approx(53.231285).epsilon(1e-6));
  // finite and monotone deep into the tail
  double prev = log_norm_cdf(-5.0);
  for (double t = -6.0; t >= -60.0; t -= 1.0) {
    const double v = log_norm_cdf(t);
    CHECK(std::isfinite(v));
    CHECK(v < prev);
    prev = v;
  }
  // ratio phi/Phi approaches -t in the far tail
  CHECK(norm_pdf_over_cdf(-40.0) == doctest::Approx(40.0).epsilon(1e-3));
}

TEST_CASE("one-bit oracle") {
  const Mat H = random_dense(20, 6, 31);
  Rng rng(32, 2);
  Vec y(20);
  for (Eigen::Index i = 0; i < 20; ++i) y[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const auto o = onebit_oracle(H, y, 0.7);
  CHECK(finite_diff_check(o, 50, 1e-5).passed);

  Vec x = Vec::Constant(6, 0.5);  // z = 0: every term is log 2
  CHECK(o.value(x) == doctest::Approx(20.0 * std::log(2.0)).epsilon(1e-12));

  Vec bad = y;
  bad[0] = 0.5;
  CHECK_THROWS(onebit_oracle(H, bad, 0.7));
  CHECK_THROWS(onebit_oracle(H, y, 0.0));
}

TEST_CASE("preconditioner solves and bounds") {
  SUBCASE("zero kind divides by sigma") {
    auto p = Preconditioner::zero();
    Vec v(2);
    v << 0.4, -0.2;
    const Vec u = p.apply_inverse(2.0, v);
    CHECK(u[0] == 0.2);
    CHECK(u[1] == -0.1);
  }
  SUBCASE("identity matrix, sigma 1") {
    auto p = Preconditioner::fixed(Mat(DenseMat(DenseMat::Identity(2, 2))));
    Vec v(2);
    v << 2, 4;
    const Vec u = p.apply_inverse(1.0, v);
    CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(u[1] == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("random SPD: residual, linearity, norm bound") {
    const Mat B = random_dense(10, 10, 5);
    const Mat M = B.gram();  // SPD
    auto p = Preconditioner::fixed(M);
    Rng rng(6, 0);
    Vec v(10), w(10);
    for (Eigen::Index i = 0; i < 10; ++i) {
      v[i] = rng.normal();
      w[i] = rng.normal();
    }
    const double sigma = 0.8;
    const Vec u = p.apply_inverse(sigma, v);
    CHECK((sigma * u + M.apply(u) - v).norm() / v.norm() <= 1e-10);
    const Vec lin = p.apply_inverse(sigma, 2.0 * v + 3.0 * w);
    const Vec sep = 2.0 * p.apply_inverse(sigma, v) + 3.0 * p.apply_inverse(sigma, w);
    CHECK((lin - sep).norm() <= 1e-9 * lin.norm() + 1e-12);
    // lambda_bound within 1% of the true spectral norm
    Eigen::SelfAdjointEigenSolver<DenseMat> es(M.dense());
    const double true_norm = es.eigenvalues().maxCoeff();
    CHECK(p.lambda_bound() == doctest::Approx(true_norm).epsilon(0.01));
  }
  SUBCASE("sparse matrices use the sparse factorization path") {
    SparseMat m(4, 4);
    std::vector<Eigen::Triplet<double>> tr = {{0, 0, 2.0}, {1, 1, 3.0}, {2, 2, 1.0},
                                              {3, 3, 5.0}, {0, 1, 0.5}, {1, 0, 0.5}};
    m.setFromTriplets(tr.begin(), tr.end());
    auto p = Preconditioner::fixed(Mat(m));
    Vec v = Vec::Ones(4);
    const Vec u = p.apply_inverse(1.0, v);
    Vec res = v;
    res -= u;
    res -= m * u;
    CHECK(res.norm() / v.norm() <= 1e-10);
  }
}
