#include "shapeak/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace shapeak {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

double branch_obj(const SpfSpec& spec, int branch, double x, double z, double tau) {
  const double d = x - z;
  return d * d / (2.0 * tau) + spf_branch_value(spec, branch, x);
}

double branch_obj_derivative(const SpfSpec& spec, int branch, double x, double z,
                             double tau) {
  return (x - z) / tau + spf_branch_derivative(spec, branch, x);
}

// Minimize (x-z)^2/(2 tau) + branch(x) over the branch's interval.
void minimize_branch(const SpfSpec& spec, int branch, double z, double tau,
                     double* xmin, double* fmin) {
  double lo, hi;
  spf_branch_domain(spec, branch, &lo, &hi);
  if (lo >= hi) {
    *xmin = lo;
    *fmin = branch_obj(spec, branch, lo, z, tau);
    return;
  }

  const double e = branch == 1 ? spec.p : spec.q;
  if (spec.family == SpfFamily::GFamily && (e == 1.0 || e == 2.0)) {
    // Strongly convex: clamp the unconstrained stationary point.
    double x;
    if (branch == 1)
      x = e == 1.0 ? z - tau : (z - spec.a * tau) / (1.0 + tau);
    else
      x = e == 1.0 ? z + tau : (z + (1.0 + spec.b) * tau) / (1.0 + tau);
    *xmin = clamp(x, lo, hi);
    *fmin = branch_obj(spec, branch, *xmin, z, tau);
    return;
  }
  if (spec.family == SpfFamily::HFamily && (e == 1.0 || e == 2.0)) {
    if (e == 1.0) {
      const double x = branch == 1 ? z - tau : z + tau;
      *xmin = clamp(x, lo, hi);
      *fmin = branch_obj(spec, branch, *xmin, z, tau);
      return;
    }
    if (tau < 1.0) {
      const double x = branch == 1 ? (z - spec.a * tau) / (1.0 - tau)
                                   : (z + (spec.b - 1.0) * tau) / (1.0 - tau);
      *xmin = clamp(x, lo, hi);
      *fmin = branch_obj(spec, branch, *xmin, z, tau);
      return;
    }
    // tau >= 1: the quadratic piece is concave/linear, minimum at an endpoint.
    const double flo = branch_obj(spec, branch, lo, z, tau);
    const double fhi = branch_obj(spec, branch, hi, z, tau);
    if (flo <= fhi) {
      *xmin = lo;
      *fmin = flo;
    } else {
      *xmin = hi;
      *fmin = fhi;
    }
    return;
  }

  // General exponents / psi family: locate sign changes of the derivative on
  // a fine partition and bisect each to machine tolerance, then compare all
  // candidates against the endpoints.
  constexpr int kCells = 256;
  double best_x = lo;
  double best_f = branch_obj(spec, branch, lo, z, tau);
  const double fhi = branch_obj(spec, branch, hi, z, tau);
  if (fhi < best_f) {
    best_x = hi;
    best_f = fhi;
  }
  const double h = (hi - lo) / kCells;
  double xl = lo;
  double dl = branch_obj_derivative(spec, branch, xl, z, tau);
  for (int i = 1; i <= kCells; ++i) {
    const double xr = i == kCells ? hi : lo + i * h;
    const double dr = branch_obj_derivative(spec, branch, xr, z, tau);
    if ((dl < 0.0 && dr >= 0.0) || (dl > 0.0 && dr <= 0.0) || dl == 0.0) {
      double a = xl, b = xr, da = dl;
      for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b);
        const double dm = branch_obj_derivative(spec, branch, m, z, tau);
        if ((da <= 0.0) == (dm <= 0.0)) {
          a = m;
          da = dm;
        } else {
          b = m;
        }
      }
      const double xc = 0.5 * (a + b);
      const double fc = branch_obj(spec, branch, xc, z, tau);
      if (fc < best_f) {
        best_x = xc;
        best_f = fc;
      }
    }
    xl = xr;
    dl = dr;
  }
  *xmin = best_x;
  *fmin = best_f;
}

}  // namespace

ProxResult1D prox_1d(const SpfSpec& spec, double z, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("prox_1d: tau must be > 0");

  double x1, f1, x2, f2;
  minimize_branch(spec, 1, z, tau, &x1, &f1);
  minimize_branch(spec, 2, z, tau, &x2, &f2);

  ProxResult1D r;
  const double scale = std::max({1.0, std::abs(f1), std::abs(f2)});
  if (std::abs(f1 - f2) <= 1e-10 * scale && std::abs(x1 - x2) > 1e-12) {
    r.count = 2;
    r.minimizers = {x1, x2};
    const double s1 = spf_eval(spec, x1);
    const double s2 = spf_eval(spec, x2);
    const double stol = 1e-12 * std::max(1.0, std::max(std::abs(s1), std::abs(s2)));
    if (s1 < s2 - stol)
      r.chosen = x1;
    else if (s2 < s1 - stol)
      r.chosen = x2;
    else
      r.chosen = std::abs(x1) <= std::abs(x2) ? x1 : x2;
    r.objective_value = std::min(f1, f2);
  } else if (f1 <= f2) {
    r.count = 1;
    r.minimizers = {x1, x1};
    r.chosen = x1;
    r.objective_value = f1;
  } else {
    r.count = 1;
    r.minimizers = {x2, x2};
    r.chosen = x2;
    r.objective_value = f2;
  }
  return r;
}

std::vector<double> prox_vector(const SpfSpec& spec, const std::vector<double>& z,
                                double tau) {
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = prox_1d(spec, z[i], tau).chosen;
  return out;
}

}  // namespace shapeak
