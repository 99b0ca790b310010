#include "shapeak/spf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace shapeak {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// pow with the conventions needed for endpoint derivatives: 0^0 = 1,
// 0^negative = +inf.
double pw(double t, double e) {
  if (t == 0.0) {
    if (e == 0.0) return 1.0;
    if (e < 0.0) return kInf;
    return 0.0;
  }
  return std::pow(t, e);
}

double psi_value(PsiKind k, double q, double t) {
  switch (k) {
    case PsiKind::Identity: return t;
    case PsiKind::Power: return pw(t, q);
    case PsiKind::Log1p: return std::log1p(t);
    case PsiKind::ExpM1: return std::expm1(t);
    case PsiKind::Sin: return std::sin(t);
    case PsiKind::Tan: return std::tan(t);
  }
  return t;
}

double psi_derivative(PsiKind k, double q, double t) {
  switch (k) {
    case PsiKind::Identity: return 1.0;
    case PsiKind::Power: return q * pw(t, q - 1.0);
    case PsiKind::Log1p: return 1.0 / (1.0 + t);
    case PsiKind::ExpM1: return std::exp(t);
    case PsiKind::Sin: return std::cos(t);
    case PsiKind::Tan: { const double c = std::cos(t); return 1.0 / (c * c); }
  }
  return 1.0;
}

double psi_derivative_inf(PsiKind k, double q) {
  switch (k) {
    case PsiKind::Identity: return 1.0;
    case PsiKind::Power: return q;           // attained at t = 1
    case PsiKind::Log1p: return 0.5;
    case PsiKind::ExpM1: return 1.0;
    case PsiKind::Sin: return std::cos(1.0);
    case PsiKind::Tan: return 1.0;           // attained at t = 0
  }
  return 1.0;
}

}  // namespace

void SpfSpec::validate() const {
  if (family == SpfFamily::PsiAbs) {
    if (!(p_psi > 0.0 && p_psi <= 1.0))
      throw std::invalid_argument("SpfSpec: p_psi must lie in (0,1]");
    if (psi == PsiKind::Power && !(q > 0.0 && q <= 1.0))
      throw std::invalid_argument("SpfSpec: Power psi exponent must lie in (0,1]");
    return;
  }
  if (!(omega >= 0.0 && omega <= 1.0))
    throw std::invalid_argument("SpfSpec: omega must lie in [0,1]");
  if (!(a >= 1.0) || !(b >= 1.0))
    throw std::invalid_argument("SpfSpec: a and b must be >= 1");
  if (!(p > 0.0) || !(q > 0.0))
    throw std::invalid_argument("SpfSpec: p and q must be > 0");
}

void spf_branch_domain(const SpfSpec& spec, int branch, double* lo, double* hi) {
  const double split = spec.family == SpfFamily::PsiAbs ? 0.5 : spec.omega;
  if (branch == 1) {
    *lo = 0.0;
    *hi = split;
  } else {
    *lo = split;
    *hi = 1.0;
  }
}

double spf_branch_value(const SpfSpec& spec, int branch, double x) {
  switch (spec.family) {
    case SpfFamily::GFamily:
      if (branch == 1) return (pw(x + spec.a, spec.p) - pw(spec.a, spec.p)) / spec.p;
      return (pw(1.0 + spec.b - x, spec.q) - pw(spec.b, spec.q)) / spec.q;
    case SpfFamily::HFamily:
      if (branch == 1) return (pw(spec.a, spec.p) - pw(spec.a - x, spec.p)) / spec.p;
      return (pw(spec.b, spec.q) - pw(x - 1.0 + spec.b, spec.q)) / spec.q;
    case SpfFamily::PsiAbs: {
      const double s = branch == 1 ? 1.0 - 2.0 * x : 2.0 * x - 1.0;
      return psi_value(spec.psi, spec.q, 1.0 - pw(s, spec.p_psi));
    }
  }
  return 0.0;
}

double spf_branch_derivative(const SpfSpec& spec, int branch, double x) {
  switch (spec.family) {
    case SpfFamily::GFamily:
      if (branch == 1) return pw(x + spec.a, spec.p - 1.0);
      return -pw(1.0 + spec.b - x, spec.q - 1.0);
    case SpfFamily::HFamily:
      if (branch == 1) return pw(spec.a - x, spec.p - 1.0);
      return -pw(x - 1.0 + spec.b, spec.q - 1.0);
    case SpfFamily::PsiAbs: {
      const double s = branch == 1 ? 1.0 - 2.0 * x : 2.0 * x - 1.0;
      const double u = 1.0 - pw(s, spec.p_psi);
      const double inner = 2.0 * spec.p_psi * pw(s, spec.p_psi - 1.0);
      const double d = psi_derivative(spec.psi, spec.q, u) * inner;
      return branch == 1 ? d : -d;
    }
  }
  return 0.0;
}

double spf_eval(const SpfSpec& spec, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("spf_eval: x must lie in [0,1]");
  const double split = spec.family == SpfFamily::PsiAbs ? 0.5 : spec.omega;
  if (x < split) return spf_branch_value(spec, 1, x);
  if (x > split) return spf_branch_value(spec, 2, x);
  // Branch point: take the min of the two branch values (the function may be
  // discontinuous there).
  return std::min(spf_branch_value(spec, 1, x), spf_branch_value(spec, 2, x));
}

double spf_sum(const SpfSpec& spec, const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += spf_eval(spec, x[i]);
  return s;
}

double subgradient_bound(const SpfSpec& spec) {
  spec.validate();
  double c;
  switch (spec.family) {
    case SpfFamily::GFamily:
      c = std::min(std::min(pw(spec.a, spec.p - 1.0), pw(spec.omega + spec.a, spec.p - 1.0)),
                   std::min(pw(spec.b + 1.0 - spec.omega, spec.q - 1.0), pw(spec.b, spec.q - 1.0)));
      break;
    case SpfFamily::HFamily:
      c = std::min(std::min(pw(spec.a, spec.p - 1.0), pw(spec.a - spec.omega, spec.p - 1.0)),
                   std::min(pw(spec.b - 1.0 + spec.omega, spec.q - 1.0), pw(spec.b, spec.q - 1.0)));
      break;
    case SpfFamily::PsiAbs:
      // Conservative: inf psi' times the endpoint limit 2p of the inner
      // derivative (for p <= 1 the inner factor |2x-1|^{p-1} is >= 1).
      c = 2.0 * spec.p_psi * psi_derivative_inf(spec.psi, spec.q);
      break;
    default:
      c = 0.0;
  }
  if (!(c > 0.0))
    throw std::domain_error("subgradient_bound: no positive lower bound (degenerate parameters)");
  return c;
}

std::vector<SubgradInterval> spf_subdiff(const SpfSpec& spec, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("spf_subdiff: x must lie in [0,1]");
  const double split = spec.family == SpfFamily::PsiAbs ? 0.5 : spec.omega;
  if (x < split) {
    const double d = spf_branch_derivative(spec, 1, x);
    return {{d, d}};
  }
  if (x > split) {
    const double d = spf_branch_derivative(spec, 2, x);
    return {{d, d}};
  }
  if (spec.family == SpfFamily::PsiAbs) {
    // Peak of the psi family: one-sided slopes +-L (infinite when p < 1).
    const double dl = spf_branch_derivative(spec, 1, x);
    const double dr = spf_branch_derivative(spec, 2, x);
    return {{dl, dl}, {dr, dr}};
  }
  // Branch point of the g/h families: the lower-semicontinuous jump widens
  // the subdifferential to a half-line on the side of the larger branch.
  const double dl = spf_branch_derivative(spec, 1, x);
  const double dr = spf_branch_derivative(spec, 2, x);
  if (split == 0.0) return {{dl, kInf}};
  if (split == 1.0) return {{-kInf, dr}};
  const double v1 = spf_branch_value(spec, 1, x);
  const double v2 = spf_branch_value(spec, 2, x);
  const double tol = 1e-12 * std::max(1.0, std::max(std::abs(v1), std::abs(v2)));
  if (std::abs(v1 - v2) <= tol) return {{dl, dl}, {dr, dr}};
  if (v1 < v2) return {{dl, kInf}};
  return {{-kInf, dr}};
}

namespace {

SpfValidationReport validate_grid(const std::function<double(double)>& fn,
                                  int grid_size, double claimed_bound,
                                  double branch_point) {
  if (grid_size < 3) throw std::invalid_argument("validate_spf: grid_size must be >= 3");
  SpfValidationReport rep;
  rep.claimed_bound = claimed_bound;
  const double h = 1.0 / (grid_size - 1);
  std::vector<double> v(grid_size);
  for (int i = 0; i < grid_size; ++i) v[i] = fn(std::min(1.0, i * h));
  rep.value_at_zero = v.front();
  rep.value_at_one = v.back();
  rep.min_interior_value = kInf;
  for (int i = 1; i + 1 < grid_size; ++i)
    rep.min_interior_value = std::min(rep.min_interior_value, v[i]);

  rep.min_abs_slope = kInf;
  double worst_slope_at = 0.0;
  for (int i = 0; i + 1 < grid_size; ++i) {
    const double x0 = i * h, x1 = (i + 1) * h;
    if (branch_point > x0 && branch_point < x1) continue;
    if (x0 == branch_point || x1 == branch_point) continue;  // jump may sit here
    const double slope = std::abs(v[i + 1] - v[i]) / h;
    if (slope < rep.min_abs_slope) {
      rep.min_abs_slope = slope;
      worst_slope_at = 0.5 * (x0 + x1);
    }
  }

  if (rep.value_at_zero != 0.0) rep.violations.push_back("value at 0 is not exactly 0");
  if (rep.value_at_one != 0.0) rep.violations.push_back("value at 1 is not exactly 0");
  if (!(rep.min_interior_value > 0.0))
    rep.violations.push_back("non-positive value on the interior grid");
  if (rep.min_abs_slope < claimed_bound - 1e-9)
    rep.violations.push_back("sampled |slope| " + std::to_string(rep.min_abs_slope) +
                             " at x=" + std::to_string(worst_slope_at) +
                             " below claimed bound " + std::to_string(claimed_bound));
  rep.passed = rep.violations.empty();
  return rep;
}

}  // namespace

SpfValidationReport validate_spf(const SpfSpec& spec, int grid_size) {
  spec.validate();
  const double split = spec.family == SpfFamily::PsiAbs ? 0.5 : spec.omega;
  return validate_grid([&](double x) { return spf_eval(spec, x); }, grid_size,
                       subgradient_bound(spec), split);
}

SpfValidationReport validate_spf_fn(const std::function<double(double)>& fn,
                                    int grid_size, double claimed_bound) {
  return validate_grid(fn, grid_size, claimed_bound, -1.0);
}

std::string to_string(SpfFamily f) {
  switch (f) {
    case SpfFamily::GFamily: return "g";
    case SpfFamily::HFamily: return "h";
    case SpfFamily::PsiAbs: return "psi";
  }
  return "?";
}

std::string to_string(PsiKind k) {
  switch (k) {
    case PsiKind::Identity: return "identity";
    case PsiKind::Power: return "power";
    case PsiKind::Log1p: return "log1p";
    case PsiKind::ExpM1: return "expm1";
    case PsiKind::Sin: return "sin";
    case PsiKind::Tan: return "tan";
  }
  return "?";
}

namespace {

SpfFamily family_from_string(const std::string& s) {
  if (s == "g") return SpfFamily::GFamily;
  if (s == "h") return SpfFamily::HFamily;
  if (s == "psi") return SpfFamily::PsiAbs;
  throw std::invalid_argument("unknown SPF family: " + s);
}

PsiKind psi_from_string(const std::string& s) {
  if (s == "identity") return PsiKind::Identity;
  if (s == "power") return PsiKind::Power;
  if (s == "log1p") return PsiKind::Log1p;
  if (s == "expm1") return PsiKind::ExpM1;
  if (s == "sin") return PsiKind::Sin;
  if (s == "tan") return PsiKind::Tan;
  throw std::invalid_argument("unknown psi kind: " + s);
}

}  // namespace

nlohmann::json SpfSpec::to_json() const {
  return nlohmann::json{{"family", to_string(family)}, {"omega", omega},
                        {"a", a},                      {"b", b},
                        {"p", p},                      {"q", q},
                        {"psi", to_string(psi)},       {"p_psi", p_psi}};
}

SpfSpec SpfSpec::from_json(const nlohmann::json& j) {
  SpfSpec s;
  s.family = family_from_string(j.at("family").get<std::string>());
  s.omega = j.value("omega", 0.5);
  s.a = j.value("a", 1.0);
  s.b = j.value("b", 1.0);
  s.p = j.value("p", 1.0);
  s.q = j.value("q", 1.0);
  if (j.contains("psi")) s.psi = psi_from_string(j.at("psi").get<std::string>());
  s.p_psi = j.value("p_psi", 1.0);
  s.validate();
  return s;
}

}  // namespace shapeak
