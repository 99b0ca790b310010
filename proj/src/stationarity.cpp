#include "shapeak/stationarity.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "shapeak/prox.hpp"

namespace shapeak {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup_of(const std::vector<SubgradInterval>& s) {
  double hi = -kInf;
  for (const auto& iv : s) hi = std::max(hi, iv.hi);
  return hi;
}

double inf_of(const std::vector<SubgradInterval>& s) {
  double lo = kInf;
  for (const auto& iv : s) lo = std::min(lo, iv.lo);
  return lo;
}

// distance from value t to the set {g + mu*nu : nu in intervals}
double set_distance(double g, double mu, const std::vector<SubgradInterval>& s) {
  double best = kInf;
  for (const auto& iv : s) {
    const double lo = g + mu * iv.lo;
    const double hi = g + mu * iv.hi;
    if (0.0 >= lo && 0.0 <= hi)
      return 0.0;
    best = std::min(best, std::min(std::abs(lo), std::abs(hi)));
  }
  return best;
}

}  // namespace

nlohmann::json Certificate::to_json() const {
  nlohmann::json j;
  j["kind"] = kind == Kind::KKT ? "kkt" : "p_stationary";
  j["satisfied"] = satisfied;
  j["worst_violation"] = worst_violation;
  if (witness_index) j["witness_index"] = *witness_index;
  return j;
}

Certificate kkt_residual(const Vec& x, const ObjectiveOracle& oracle,
                         const SpfSpec& spec, double mu, double tol) {
  const Vec g = oracle.gradient(x);
  Certificate c;
  c.kind = Certificate::Kind::KKT;
  c.worst_violation = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto sub = spf_subdiff(spec, x[i]);
    double v;
    if (x[i] == 0.0) {
      const double hi = sup_of(sub);
      v = hi == kInf ? 0.0 : std::max(0.0, -(g[i] + mu * hi));
    } else if (x[i] == 1.0) {
      const double lo = inf_of(sub);
      v = lo == -kInf ? 0.0 : std::max(0.0, g[i] + mu * lo);
    } else {
      v = set_distance(g[i], mu, sub);
    }
    if (v > c.worst_violation) {
      c.worst_violation = v;
      c.witness_index = i;
    }
  }
  c.satisfied = c.worst_violation <= tol;
  return c;
}

Certificate is_p_stationary(const Vec& x, const ObjectiveOracle& oracle,
                            const SpfSpec& spec, double mu, double tau, double tol) {
  const Vec g = oracle.gradient(x);
  Certificate c;
  c.kind = Certificate::Kind::PStationary;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const ProxResult1D r = prox_1d(spec, x[i] - tau * g[i], tau * mu);
    double v = kInf;
    for (int m = 0; m < r.count; ++m)
      v = std::min(v, std::abs(x[i] - r.minimizers[std::size_t(m)]));
    if (v > c.worst_violation) {
      c.worst_violation = v;
      c.witness_index = i;
    }
  }
  c.satisfied = c.worst_violation <= tol;
  return c;
}

MuBarResult mu_bar(const ObjectiveOracle& oracle, const SpfSpec& spec, int samples) {
  const double c = subgradient_bound(spec);
  MuBarResult r;
  if (oracle.is_quadratic) {
    // |grad_i| over the box is maximized at a box vertex; accumulate the
    // attainable range of row i of S*x + q exactly.
    const Vec& q = oracle.quad_lin;
    double worst = 0.0;
    const Eigen::Index n = q.size();
    Vec hi = q, lo = q;
    if (oracle.quad_sym.is_sparse()) {
      const SparseMat& S = oracle.quad_sym.sparse();
      for (int k = 0; k < S.outerSize(); ++k)
        for (SparseMat::InnerIterator it(S, k); it; ++it) {
          if (it.value() > 0.0)
            hi[it.row()] += it.value();
          else
            lo[it.row()] += it.value();
        }
    } else {
      const DenseMat& S = oracle.quad_sym.dense();
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          if (S(i, j) > 0.0)
            hi[i] += S(i, j);
          else
            lo[i] += S(i, j);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i)
      worst = std::max(worst, std::max(std::abs(hi[i]), std::abs(lo[i])));
    r.value = worst / c;
    r.certified = true;
    r.method = "interval";
    return r;
  }

  // Additive low-discrepancy sweep of the box (a sampled lower bound).
  const Eigen::Index n = oracle.n;
  double phi = 2.0;  // root of x^(n+1) = x + 1
  for (int it = 0; it < 64; ++it)
    phi = std::pow(1.0 + phi, 1.0 / (double(n) + 1.0));
  Vec alpha(n), x(n);
  double ap = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    ap /= phi;
    alpha[j] = ap;
    x[j] = 0.5;
  }
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index j = 0; j < n; ++j) {
      x[j] += alpha[j];
      if (x[j] >= 1.0) x[j] -= 1.0;
    }
    worst = std::max(worst, oracle.gradient(x).array().abs().maxCoeff());
  }
  // include the vertices nearest the last sample's rounding, plus all-0/all-1
  worst = std::max(worst, oracle.gradient(Vec::Zero(n)).array().abs().maxCoeff());
  worst = std::max(worst, oracle.gradient(Vec::Ones(n)).array().abs().maxCoeff());
  r.value = worst / c;
  r.certified = false;
  r.method = "sampled";
  return r;
}

}  // namespace shapeak
