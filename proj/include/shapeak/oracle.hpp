#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>

#include <json.hpp>

#include "shapeak/objective.hpp"
#include "shapeak/solver.hpp"
#include "shapeak/spf.hpp"

namespace shapeak {

struct VerificationReport {
  enum class Claim {
    ExactPenalty,
    KktBinary,
    BruteForceOptimum,
    DescentLemma,
    LinearRate,
    GradientCheck
  };
  Claim claim = Claim::BruteForceOptimum;
  bool passed = false;
  std::map<std::string, double> evidence;  // always includes the scoping parameters

  nlohmann::json to_json() const;
};

// Exhaustive minimum of f over {0,1}^n, n <= 24. Quadratic oracles use
// Gray-code delta updates (one row product per flip); ties resolve to the
// lowest binary encoding sum x_i 2^i.
std::pair<Vec, double> brute_force_binary(const ObjectiveOracle& oracle);

// Grid search of f + mu*phi over the box (n <= 3): passes iff the grid
// minimum lands within one grid cell of the binary brute-force minimizer.
// grid_per_dim 0 picks the default (1001 for n <= 2, 201 for n = 3).
VerificationReport verify_exact_penalty(const ObjectiveOracle& oracle,
                                        const SpfSpec& spec, double mu,
                                        int grid_per_dim = 0);

// Same grid check with an arbitrary separable penalty (negative controls).
VerificationReport verify_exact_penalty_fn(const ObjectiveOracle& oracle,
                                           const std::function<double(double)>& penalty,
                                           double mu, int grid_per_dim = 0);

// Runs the solver and asserts the per-step Lyapunov decrease
// L~(k+1) - L~(k) <= -(sigma/8) ||x(k+1) - x(k)||^2 (+1e-9 slack).
VerificationReport verify_descent(const ObjectiveOracle& oracle, const SpfSpec& spec,
                                  SolverParams params, const Vec& x0);

// Central finite differences vs the oracle gradient at seeded box points.
VerificationReport finite_diff_check(const ObjectiveOracle& oracle, int points,
                                     double step, std::uint64_t seed = 1);

std::string to_string(VerificationReport::Claim c);

}  // namespace shapeak
