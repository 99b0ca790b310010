#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace shapeak {

enum class SpfFamily { GFamily, HFamily, PsiAbs };
enum class PsiKind { Identity, Power, Log1p, ExpM1, Sin, Tan };

// Parameterization of one sharp-peak function on [0,1]: zero exactly at
// {0,1}, positive inside, subgradients bounded away from zero.
struct SpfSpec {
  SpfFamily family = SpfFamily::GFamily;
  double omega = 0.5;
  double a = 1.0;
  double b = 1.0;
  double p = 1.0;
  double q = 1.0;     // for PsiAbs with psi=Power, q is the outer exponent
  PsiKind psi = PsiKind::Identity;  // PsiAbs only
  double p_psi = 1.0;               // PsiAbs only, inner exponent in (0,1]

  // Throws std::invalid_argument when a parameter is out of range.
  void validate() const;

  nlohmann::json to_json() const;
  static SpfSpec from_json(const nlohmann::json& j);
};

// Pointwise value of the sharp-peak function; x must lie in [0,1].
// At the branch point omega the value is the min of the two branch values.
double spf_eval(const SpfSpec& spec, double x);

// Sum of spf values over a vector (the separable penalty).
double spf_sum(const SpfSpec& spec, const double* x, std::size_t n);

// Uniform lower bound c > 0 on |subgradient| over [0,1].
// For the psi family this is the conservative bound 2 * p_psi * inf psi'.
double subgradient_bound(const SpfSpec& spec);

// One closed subgradient interval; lo/hi may be +-infinity.
struct SubgradInterval {
  double lo;
  double hi;
};

// Subdifferential of the spf at x as a union of closed intervals.
std::vector<SubgradInterval> spf_subdiff(const SpfSpec& spec, double x);

struct SpfValidationReport {
  bool passed = false;
  double min_interior_value = 0.0;  // must be > 0
  double value_at_zero = 0.0;       // must be == 0
  double value_at_one = 0.0;        // must be == 0
  double min_abs_slope = 0.0;       // sampled |finite-difference slope|
  double claimed_bound = 0.0;       // subgradient_bound(spec)
  std::vector<std::string> violations;
};

SpfValidationReport validate_spf(const SpfSpec& spec, int grid_size);

// Same numeric probe for an arbitrary scalar function. Test hook used for
// negative controls such as x(1-x); claimed_bound must be supplied.
SpfValidationReport validate_spf_fn(const std::function<double(double)>& fn,
                                    int grid_size, double claimed_bound);

// Branch machinery shared with the proximal operator. Branch 1 lives on
// [0,omega], branch 2 on [omega,1] (PsiAbs splits at 1/2).
double spf_branch_value(const SpfSpec& spec, int branch, double x);
double spf_branch_derivative(const SpfSpec& spec, int branch, double x);
void spf_branch_domain(const SpfSpec& spec, int branch, double* lo, double* hi);

std::string to_string(SpfFamily f);
std::string to_string(PsiKind k);

}  // namespace shapeak
