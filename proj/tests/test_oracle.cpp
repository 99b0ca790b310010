#include <doctest.h>

#include <cmath>

#include "shapeak/instances.hpp"
#include "shapeak/oracle.hpp"
#include "shapeak/rng.hpp"
#include "shapeak/stationarity.hpp"

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

}  // namespace

TEST_CASE("brute force on the worked quadratic") {
  const auto [x, f] = brute_force_binary(worked_quadratic());
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 1.0);
  CHECK(f == doctest::Approx(-2.5).epsilon(1e-15));
}

TEST_CASE("brute force tie rule prefers the lowest binary encoding") {
  const auto [x, f] = brute_force_binary(zero_oracle(5));
  CHECK(f == 0.0);
  CHECK(x.norm() == 0.0);
}

TEST_CASE("Gray-code path agrees with naive enumeration up to n = 12") {
  Rng rng(61, 0);
  for (int n : {3, 8, 12}) {
    DenseMat Q(n, n);
    for (Eigen::Index i = 0; i < Q.size(); ++i) Q.data()[i] = rng.normal();
    Vec q(n);
    for (Eigen::Index i = 0; i < n; ++i) q[i] = rng.normal();
    const auto o = quadratic_oracle(Mat(Q), q);
    ObjectiveOracle opaque = o;  // same f, forced through the naive walk
    opaque.is_quadratic = false;
    const auto [xg, fg] = brute_force_binary(o);
    const auto [xn, fn] = brute_force_binary(opaque);
    CHECK(xg == xn);
    CHECK(fg == doctest::Approx(fn).epsilon(1e-10));
  }
}

TEST_CASE("brute force rejects oversized problems") {
  CHECK_THROWS(brute_force_binary(zero_oracle(25)));
}

TEST_CASE("exact-penalty grid check on the worked quadratic") {
  const auto o = worked_quadratic();
  const auto s = g_unit();
  SUBCASE("mu above the threshold passes") {
    const auto rep = verify_exact_penalty(o, s, 4.0);
    CHECK(rep.passed);
    CHECK(rep.evidence.at("hypothesis_met") == 1.0);
    CHECK(rep.evidence.at("argmin_distance_inf") <= rep.evidence.at("grid_cell") + 1e-12);
  }
  SUBCASE("mu below the threshold is flagged, not failed") {
    const auto rep = verify_exact_penalty(o, s, 0.5);
    CHECK(rep.passed);
    CHECK(rep.evidence.at("hypothesis_met") == 0.0);
  }
}

TEST_CASE("grid minimum decreases monotonically with finer grids") {
  const auto o = worked_quadratic();
  const auto s = g_unit();
  double prev = std::numeric_limits<double>::infinity();
  for (int g : {11, 101, 1001}) {
    const auto rep = verify_exact_penalty(o, s, 4.0, g);
    const double v = rep.evidence.at("grid_min_value");
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("custom-penalty grid check accepts the SPF and exposes x(1-x)") {
  const auto o = worked_quadratic();
  const auto s = g_unit();
  const auto via_fn = verify_exact_penalty_fn(
      o, [&s](double t) { return spf_eval(s, t); }, 4.0);
  CHECK(via_fn.passed);
}

TEST_CASE("descent certificate on the worked quadratic") {
  const auto o = worked_quadratic();
  const auto s = g_unit();
  SolverParams p;
  p.mu0 = 4.0;
  p.eta = 2.0;
  const double beta = *o.lipschitz_hint;
  p.sigma = 8.0 * std::max(o.lambda_bound, beta);
  Vec x0 = Vec::Zero(2);
  const auto rep = verify_descent(o, s, p, x0);
  INFO("worst slack " << rep.evidence.at("worst_slack"));
  CHECK(rep.passed);
}

TEST_CASE("descent certificate is trivial for the zero objective") {
  const auto o = zero_oracle(4);
  SolverParams p;
  p.mu0 = 1.0;
  p.sigma = 1.0;
  p.eta = 2.0;
  const auto rep = verify_descent(o, g_unit(), p, Vec::Zero(4));
  CHECK(rep.passed);
}

TEST_CASE("finite-difference gate passes for generated oracles") {
  const auto rec = make_oracle(gen_recovery(20, 12, 3, 1.5, 0.05, 19));
  CHECK(finite_diff_check(rec, 50, 1e-5).passed);
  const auto ob = make_oracle(gen_onebit(24, 10, 5.0, 19));
  CHECK(finite_diff_check(ob, 50, 1e-5).passed);
  const auto qb = make_oracle(gen_qubo(10, 0.8, 0.5, 19));
  CHECK(finite_diff_check(qb, 50, 1e-5).passed);
}

TEST_CASE("verification reports serialize with their scoping evidence") {
  const auto rep = verify_exact_penalty(worked_quadratic(), g_unit(), 4.0);
  const auto j = rep.to_json();
  CHECK(j.at("claim") == "exact_penalty");
  CHECK(j.at("passed") == true);
  CHECK(j.at("evidence").contains("n"));
  CHECK(j.at("evidence").contains("mu"));
  CHECK(j.at("evidence").contains("grid_per_dim"));
}
