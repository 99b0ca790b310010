#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "shapeak/objective.hpp"
#include "shapeak/spf.hpp"

namespace shapeak {

struct Certificate {
  enum class Kind { KKT, PStationary };
  Kind kind = Kind::KKT;
  bool satisfied = false;
  double worst_violation = 0.0;
  std::optional<Eigen::Index> witness_index;  // worst component

  nlohmann::json to_json() const;
};

// Signed first-order conditions of the penalty model at x in [0,1]^n:
// at 0 some subgradient makes grad_i + mu*nu >= 0, at 1 <= 0, and interior
// points need 0 in grad_i + mu * subdiff.
Certificate kkt_residual(const Vec& x, const ObjectiveOracle& oracle,
                         const SpfSpec& spec, double mu, double tol = 1e-9);

// Fixed point of the box prox-gradient map: x in Prox_{tau*mu*phi}(x - tau*grad f(x)).
// x counts as a member when it matches any element of the (possibly 2-point)
// prox set within tol.
Certificate is_p_stationary(const Vec& x, const ObjectiveOracle& oracle,
                            const SpfSpec& spec, double mu, double tau, double tol);

// Penalty threshold: max over the box of ||grad f||_inf divided by the spf
// subgradient bound. Exact (interval arithmetic) for quadratic oracles;
// a sampled lower bound otherwise.
struct MuBarResult {
  double value = 0.0;
  bool certified = false;
  std::string method;  // "interval" or "sampled"
};

MuBarResult mu_bar(const ObjectiveOracle& oracle, const SpfSpec& spec,
                   int samples = 100000);

}  // namespace shapeak
