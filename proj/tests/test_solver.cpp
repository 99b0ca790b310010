#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "shapeak/instances.hpp"
#include "shapeak/oracle.hpp"
#include "shapeak/rng.hpp"
#include "shapeak/solver.hpp"

using namespace shapeak;

namespace {

ObjectiveOracle worked_quadratic() {
  DenseMat Q(2, 2);
  Q << 1, -1, -2, 0;
  Vec q(2);
  q << -2, 0.5;
  return quadratic_oracle(Mat(Q), q);
}

SpfSpec g_unit() {
  SpfSpec s;
  s.family = SpfFamily::GFamily;
  s.omega = 0.5;
  s.a = 1;
  s.b = 1;
  s.p = 1;
  s.q = 1;
  return s;
}

SpfSpec g_recovery() {
  SpfSpec s = g_unit();
  s.a = s.b = 2.5;
  s.p = s.q = 2;
  return s;
}

}  // namespace

TEST_CASE("parameter validation") {
  SolverParams p;
  CHECK_NOTHROW(p.validate());
  auto bad = p;
  bad.mu0 = 0.0;
  CHECK_THROWS(bad.validate());
  bad = p;
  bad.eta = 1.0;
  CHECK_THROWS(bad.validate());
  bad = p;
  bad.rho = 0.2;  // above 1/6
  CHECK_THROWS(bad.validate());
  bad = p;
  bad.eps_stop = 1.0;
  CHECK_THROWS(bad.validate());
  bad = p;
  bad.k0 = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("penalty growth rule") {
  SolverParams p;
  p.k0 = 10;
  p.eta = 2.0;
  p.rho = 1.0 / 6.0;
  p.sigma = 1.0;
  p.eps_mu = 1e-8;
  SolverState st;
  st.mu = 1.0;
  st.x = Vec::Zero(2);
  st.w = Vec::Zero(2);
  st.x[0] = std::sqrt(0.3);  // ||x - w||^2 = 0.3

  SUBCASE("off-cycle iterations leave mu unchanged") {
    st.k = 7;
    CHECK(update_mu(st, p, 0.5) == 1.0);
  }
  SUBCASE("binary w leaves mu unchanged") {
    st.k = 10;
    CHECK(update_mu(st, p, 0.0) == 1.0);
  }
  SUBCASE("on-cycle growth takes the capped minimum") {
    st.k = 10;
    const double expect = 1.0 + std::min(1.0, (1.0 / 6.0) * 0.3 / (0.5 + 1e-8));
    CHECK(update_mu(st, p, 0.5) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(update_mu(st, p, 0.5) == doctest::Approx(1.1).epsilon(1e-6));
  }
}

TEST_CASE("stop test") {
  const auto o = worked_quadratic();
  SolverParams p;
  SolverState st;
  st.w = Vec::Ones(2);
  st.x = st.w;
  st.y = -o.gradient(st.w);
  CHECK(check_stop(st, o, p));
  st.w[0] = 0.5;
  CHECK_FALSE(check_stop(st, o, p));
  st.w[0] = 1.0;
  st.x[0] = 1.0 + 2.0 * p.eps_stop;
  CHECK_FALSE(check_stop(st, o, p));
}

TEST_CASE("worked quadratic converges to (1,1)") {
  const auto o = worked_quadratic();
  SolverParams p;
  p.mu0 = 4.0;
  p.sigma = 2.0;
  p.eta = 2.0;  // never fires: the iterates are binary from the start
  Vec x0 = Vec::Zero(2);
  const auto rep = solve(o, g_unit(), p, x0);
  CHECK(rep.converged);
  CHECK(rep.stop_reason == StopReason::Criterion);
  CHECK(rep.x_final[0] == 1.0);
  CHECK(rep.x_final[1] == 1.0);
  CHECK(rep.objective == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK(rep.mu_final == 4.0);
  // agreement with exhaustive enumeration
  const auto [bx, bf] = brute_force_binary(o);
  CHECK(rep.x_final == bx);
}

TEST_CASE("zero objective is a one-iteration fixed point") {
  const auto o = zero_oracle(5);
  SolverParams p;
  Vec x0(5);
  x0 << 1, 0, 1, 1, 0;
  const auto rep = solve(o, g_unit(), p, x0);
  CHECK(rep.converged);
  CHECK(rep.x_final == x0);
  CHECK(rep.iterations <= 2);
}

TEST_CASE("non-binary starts are rejected") {
  const auto o = zero_oracle(2);
  SolverParams p;
  Vec x0(2);
  x0 << 0.5, 0.0;
  CHECK_THROWS(solve(o, g_unit(), p, x0));
}

TEST_CASE("mu trace is nondecreasing and bounded once iterates are binary") {
  const auto o = make_oracle(gen_qubo(16, 0.8, 0.5, 3));
  auto p = default_params_qubo(o.quad_sym.frobenius_norm());
  const auto rep = solve(o, g_unit(), p, Vec::Zero(16));
  double prev = 0.0;
  for (const auto& t : rep.trace) {
    CHECK(t.mu >= prev);
    prev = t.mu;
  }
}

TEST_CASE("binary iterates once mu clears the threshold margin") {
  // with mu0 far above mu_bar + sigma-dependent margin every w^k is binary,
  // so f(w) is always defined on the hypercube vertices
  Rng rng(91, 0);
  DenseMat Q(6, 6);
  for (Eigen::Index i = 0; i < Q.size(); ++i) Q.data()[i] = rng.normal();
  Q = DenseMat((Q + Q.transpose()) / 2);
  Vec q(6);
  for (Eigen::Index i = 0; i < 6; ++i) q[i] = rng.normal();
  const auto o = quadratic_oracle(Mat(Q), q);
  SolverParams p;
  p.sigma = 4.0;
  p.mu0 = 500.0;  // >> mu_bar + sigma*(sqrt(alpha)+1)/c for this scale
  p.eta = 2.0;
  const auto rep = solve(o, g_unit(), p, Vec::Zero(6));
  CHECK(rep.converged);
  for (Eigen::Index i = 0; i < rep.x_final.size(); ++i)
    CHECK((rep.x_final[i] == 0.0 || rep.x_final[i] == 1.0));
}

TEST_CASE("linear residual contraction with Q^k = (sigma/8) I") {
  for (int trial = 0; trial < 5; ++trial) {
    Rng rng(17, std::uint64_t(trial));
    const Eigen::Index n = 8;
    DenseMat B(n, n);
    for (Eigen::Index i = 0; i < B.size(); ++i) B.data()[i] = rng.normal();
    DenseMat Q = B.transpose() * B / double(n);  // convex
    const double beta = Mat(Q).operator_norm();
    const double sigma = 9.0 * beta;  // sigma > 8 max{lambda, beta}
    const double lambda = sigma / 8.0;
    // strongly negative linear term: the optimum is the all-ones vertex, so
    // starting from zero leaves several iterations with w pinned while the
    // (x, y) pair contracts
    Vec q(n);
    for (Eigen::Index i = 0; i < n; ++i) q[i] = -2.0 * sigma * (1.0 + 0.2 * rng.uniform());
    auto o = quadratic_oracle(
        Mat(Q), q,
        Preconditioner::fixed(Mat(DenseMat(lambda * DenseMat::Identity(n, n)))));
    SolverParams p;
    p.sigma = sigma;
    p.mu0 = 100.0 * sigma;
    p.eta = 2.0;
    p.eps_stop = 1e-10;
    const auto rep = solve(o, g_unit(), p, Vec::Zero(n));
    // locate the final stretch where w has stabilized and check the ratio
    int violations = 0, checked = 0;
    for (std::size_t i = 2; i < rep.trace.size(); ++i) {
      const double r0 = rep.trace[i - 1].res_xw;
      const double r1 = rep.trace[i].res_xw;
      if (r0 < 1e-14) continue;
      if (rep.trace[i].f_w != rep.trace[i - 1].f_w) continue;  // w moved
      ++checked;
      if (r1 / r0 > 1.0 / 7.0 + 1e-9) ++violations;
    }
    CHECK(violations == 0);
    CHECK(checked > 0);
  }
}

TEST_CASE("strict JSON determinism on a recovery instance") {
  const auto inst = gen_recovery(40, 60, 8, 2.0, 0.0, 21);
  const auto o = make_oracle(inst);
  const Vec btA = inst.A.apply_transpose(inst.b);
  auto p = default_params_recovery(2.0, 8, 60, btA.norm());
  const auto r1 = solve(o, g_recovery(), p, Vec::Zero(60));
  const auto r2 = solve(o, g_recovery(), p, Vec::Zero(60));
  CHECK(r1.to_json(true).dump() == r2.to_json(true).dump());
  // non-strict mode adds wall time, which legitimately differs
  CHECK(r1.to_json(false).contains("wall_time"));
  CHECK_FALSE(r1.to_json(true).contains("wall_time"));
}

TEST_CASE("preset hyperparameters follow the published formulas") {
  const auto qb = default_params_qubo(200.0);
  CHECK(qb.eta == 2.1);
  CHECK(qb.sigma == 0.01);
  CHECK(qb.k0 == 10);
  CHECK(qb.mu0 == doctest::Approx(0.5e-5 * 200.0));

  const auto cm = default_params_classical_mimo(100, 3.0);
  CHECK(cm.eta == 3.0);
  CHECK(cm.sigma == doctest::Approx(16.0));
  CHECK(cm.mu0 == doctest::Approx(std::sqrt(100.0) * 1e-4 * 3.0));

  const auto ob = default_params_onebit(200, 2.0);
  CHECK(ob.eta == 2.25);
  CHECK(ob.sigma == doctest::Approx(0.2));
  CHECK(ob.mu0 == doctest::Approx(1e-3 * std::log10(200.0) * 2.0));

  const auto rc = default_params_recovery(2.0, 100, 1000, 10.0);
  CHECK(rc.eta == 2.5);
  CHECK(rc.sigma == doctest::Approx((0.6 - 0.1) * 0.1));
  CHECK(rc.k0 == std::max(10, 2 * int(std::ceil(100.0 * 100 / (1000 * 1.0)))));
  CHECK(rc.mu0 == doctest::Approx((5.0 / std::sqrt(1000.0)) * std::pow(10.0, 4.0 - 4.0 - 1.0) * 10.0));
}

TEST_CASE("trace CSV has the documented columns") {
  const auto o = worked_quadratic();
  SolverParams p;
  p.mu0 = 4.0;
  p.sigma = 2.0;
  const auto rep = solve(o, g_unit(), p, Vec::Zero(2));
  const std::string path = "/tmp/shapeak_trace_test.csv";
  rep.write_trace_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,mu,res_xw,res_grad,f_w,L,Ltilde");
  std::string row;
  CHECK(bool(std::getline(in, row)));
  std::remove(path.c_str());
}
