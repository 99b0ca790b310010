#include "shapeak/solver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "shapeak/io.hpp"
#include "shapeak/prox.hpp"

namespace shapeak {

namespace {

constexpr std::size_t kTraceCap = 1000000;

bool is_binary(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0 && v[i] != 1.0) return false;
  return true;
}

double check_finite(double v, const char* what, int k) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("solve: non-finite ") + what +
                             " at iteration " + std::to_string(k));
  return v;
}

Vec prox_vec(const SpfSpec& spec, const Vec& z, double tau) {
  Vec out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = prox_1d(spec, z[i], tau).chosen;
  return out;
}

}  // namespace

void SolverParams::validate() const {
  if (!(mu0 > 0.0)) throw std::invalid_argument("SolverParams: mu0 must be > 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("SolverParams: sigma must be > 0");
  if (!(eta > 1.0)) throw std::invalid_argument("SolverParams: eta must be > 1");
  if (!(rho > 0.0 && rho <= 1.0 / 6.0))
    throw std::invalid_argument("SolverParams: rho must lie in (0, 1/6]");
  if (!(eps_mu > 0.0)) throw std::invalid_argument("SolverParams: eps_mu must be > 0");
  if (k0 < 1) throw std::invalid_argument("SolverParams: k0 must be a positive integer");
  if (!(eps_stop > 0.0 && eps_stop < 1.0))
    throw std::invalid_argument("SolverParams: eps_stop must lie in (0,1)");
  if (max_iter < 1) throw std::invalid_argument("SolverParams: max_iter must be >= 1");
  if (time_budget_seconds && !(*time_budget_seconds > 0.0))
    throw std::invalid_argument("SolverParams: time budget must be > 0");
  if (tau_check < 0.0)
    throw std::invalid_argument("SolverParams: tau_check must be >= 0");
}

double update_mu(const SolverState& state, const SolverParams& params, double phi_w) {
  if (state.k % params.k0 != 0 || phi_w == 0.0) return state.mu;
  const double r2 = (state.x - state.w).squaredNorm();
  const double inc = std::min((params.eta - 1.0) * state.mu,
                              params.rho * params.sigma * r2 / (phi_w + params.eps_mu));
  return state.mu + inc;
}

bool check_stop(const SolverState& state, const ObjectiveOracle& oracle,
                const SolverParams& params) {
  if (!is_binary(state.w)) return false;
  const double res_xw = (state.x - state.w).norm();
  if (res_xw >= params.eps_stop) return false;
  const double res_grad = (state.y + oracle.gradient(state.w)).norm();
  return res_grad < params.eps_stop;
}

SolveReport solve(const ObjectiveOracle& oracle, const SpfSpec& spec,
                  const SolverParams& params, const Vec& x0) {
  params.validate();
  spec.validate();
  if (x0.size() != oracle.n)
    throw std::invalid_argument("solve: x0 dimension does not match oracle");
  if (!is_binary(x0)) throw std::invalid_argument("solve: x0 must be binary");

  const auto t_start = std::chrono::steady_clock::now();
  const double sigma = params.sigma;
  Preconditioner& pre = *oracle.precond;

  SolverState st;
  st.w = x0;
  st.x = x0;
  st.y = -oracle.gradient(x0);
  st.mu = params.mu0;
  st.k = 0;

  std::size_t trace_stride = 1;
  auto record = [&](double res_xw, double res_grad, double f_w, double f_x,
                    double phi_w, double step_x) {
    if (std::size_t(st.k) % trace_stride != 0) return;
    const double L = f_x + st.mu * phi_w + st.y.dot(st.x - st.w) +
                     0.5 * sigma * res_xw * res_xw;
    st.trace.push_back({st.k, st.mu, res_xw, res_grad, f_w, L,
                        L + (3.0 * sigma / 8.0) * res_xw * res_xw, step_x});
    if (st.trace.size() >= kTraceCap) {
      std::vector<TraceRecord> kept;
      kept.reserve(st.trace.size() / 2 + 1);
      for (std::size_t i = 0; i < st.trace.size(); i += 2) kept.push_back(st.trace[i]);
      st.trace.swap(kept);
      trace_stride *= 2;
    }
  };

  {
    const double f0 = check_finite(oracle.value(st.w), "f", 0);
    const double phi0 = spf_sum(spec, st.w.data(), std::size_t(st.w.size()));
    record(0.0, 0.0, f0, f0, phi0, 0.0);
  }

  Vec best_binary;
  double best_f = oracle.value(st.w);  // x0 is binary by precondition
  best_binary = st.w;

  bool converged = false;
  StopReason reason = StopReason::MaxIter;
  double res_xw = 0.0, res_grad = 0.0;

  while (st.k < params.max_iter) {
    const Vec x_prev = st.x;
    st.w = prox_vec(spec, st.x + st.y / sigma, st.mu / sigma);
    Vec grad_w = oracle.gradient(st.w);
    for (Eigen::Index i = 0; i < grad_w.size(); ++i)
      check_finite(grad_w[i], "gradient", st.k + 1);
    st.x = st.w - pre.apply_inverse(sigma, grad_w + st.y);
    st.y += sigma * (st.x - st.w);
    ++st.k;

    res_xw = (st.x - st.w).norm();
    res_grad = (st.y + grad_w).norm();
    const double f_w = check_finite(oracle.value(st.w), "f", st.k);
    const double f_x = check_finite(oracle.value(st.x), "f", st.k);
    const double phi_w = spf_sum(spec, st.w.data(), std::size_t(st.w.size()));
    record(res_xw, res_grad, f_w, f_x, phi_w, (st.x - x_prev).norm());

    const bool binary = is_binary(st.w);
    if (binary && f_w < best_f) {
      best_f = f_w;
      best_binary = st.w;
    }
    if (binary && std::max(res_xw, res_grad) < params.eps_stop) {
      converged = true;
      reason = StopReason::Criterion;
      break;
    }
    st.mu = update_mu(st, params, phi_w);

    if (params.time_budget_seconds) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
              .count();
      if (elapsed > *params.time_budget_seconds) {
        reason = StopReason::TimeBudget;
        break;
      }
    }
  }

  SolveReport rep;
  rep.iterations = st.k;
  rep.converged = converged;
  rep.stop_reason = reason;
  rep.mu_final = st.mu;
  rep.residual_xw = res_xw;
  rep.residual_grad = res_grad;
  rep.trace = std::move(st.trace);
  if (converged) {
    rep.x_final = st.w;
    rep.objective = oracle.value(st.w);
  } else if (best_binary.size()) {
    rep.x_final = best_binary;
    rep.objective = best_f;
  } else {
    rep.x_final = (st.w.array() >= 0.5).cast<double>();
    rep.objective = oracle.value(rep.x_final);
  }
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

nlohmann::json SolveReport::to_json(bool strict) const {
  nlohmann::json j;
  j["x_final"] = std::vector<double>(x_final.data(), x_final.data() + x_final.size());
  j["objective"] = objective;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["stop_reason"] = to_string(stop_reason);
  j["mu_final"] = mu_final;
  j["residual_xw"] = residual_xw;
  j["residual_grad"] = residual_grad;
  if (!strict) j["wall_time"] = wall_time;
  return j;
}

void SolveReport::write_trace_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for write");
  out << "k,mu,res_xw,res_grad,f_w,L,Ltilde\n";
  for (const auto& t : trace)
    out << t.k << "," << format_double(t.mu) << "," << format_double(t.res_xw) << ","
        << format_double(t.res_grad) << "," << format_double(t.f_w) << ","
        << format_double(t.L) << "," << format_double(t.Ltilde) << "\n";
}

SolverParams default_params_recovery(double exponent, int s, int n, double norm_btA) {
  SolverParams p;
  p.eta = 2.5;
  p.sigma = (0.6 - double(s) / n) * std::pow(10.0, exponent - 3.0);
  const double t = 4.0 - 2.0 * exponent - 10.0 * double(s) / n;
  p.mu0 = (5.0 / std::sqrt(double(n))) * std::pow(10.0, t) * norm_btA;
  p.k0 = std::max(10, 2 * int(std::ceil(100.0 * s / (n * (exponent - 1.0)))));
  return p;
}

SolverParams default_params_classical_mimo(int n, double norm_ytH_inf) {
  SolverParams p;
  p.eta = 3.0;
  p.sigma = 32.0 / std::log10(double(n));
  p.k0 = 10;
  p.mu0 = std::sqrt(double(n)) * 1e-4 * norm_ytH_inf;
  return p;
}

SolverParams default_params_onebit(int n, double norm_ytH_inf) {
  SolverParams p;
  const int r = n < 5000 ? 0 : 1;
  p.eta = 2.25 + 0.25 * r;
  p.sigma = 0.001 * n;
  p.k0 = 10;
  p.mu0 = (1.0 + 4.0 * r) * 1e-3 * std::log10(double(n)) * norm_ytH_inf;
  return p;
}

SolverParams default_params_qubo(double frobenius_Q) {
  SolverParams p;
  p.eta = 2.1;
  p.sigma = 0.01;
  p.k0 = 10;
  p.mu0 = 0.5e-5 * frobenius_Q;
  return p;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Criterion: return "criterion";
    case StopReason::MaxIter: return "max_iter";
    case StopReason::TimeBudget: return "time_budget";
  }
  return "?";
}

}  // namespace shapeak
