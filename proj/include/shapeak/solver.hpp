#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapeak/objective.hpp"
#include "shapeak/spf.hpp"

namespace shapeak {

struct SolverParams {
  double mu0 = 1.0;
  double sigma = 1.0;
  double eta = 2.0;
  double rho = 1.0 / 6.0;
  double eps_mu = 1e-8;
  int k0 = 10;
  double eps_stop = 1e-4;
  int max_iter = 5000;
  std::optional<double> time_budget_seconds = 600.0;
  double tau_check = 0.0;  // P-stationarity certificate step; 0 means 1/sigma

  void validate() const;  // throws std::invalid_argument on range violations
};

struct TraceRecord {
  int k;
  double mu;
  double res_xw;    // ||x - w||
  double res_grad;  // ||y + grad f(w)||
  double f_w;
  double L;       // augmented Lagrangian
  double Ltilde;  // L + (3 sigma/8) ||x - w||^2
  double step_x;  // ||x(k) - x(k-1)||, 0 at k = 0 (not part of the CSV)
};

struct SolverState {
  Vec w, x, y;
  double mu = 0.0;
  int k = 0;
  std::vector<TraceRecord> trace;
};

enum class StopReason { Criterion, MaxIter, TimeBudget };

struct SolveReport {
  Vec x_final;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIter;
  double mu_final = 0.0;
  double residual_xw = 0.0;
  double residual_grad = 0.0;
  double wall_time = 0.0;
  std::vector<TraceRecord> trace;

  // strict mode omits wall_time so identical runs are bitwise identical
  nlohmann::json to_json(bool strict = false) const;
  void write_trace_csv(const std::string& path) const;
};

// One pass of the penalty growth rule; returns the new mu. k is the index of
// the just-computed iterate.
double update_mu(const SolverState& state, const SolverParams& params, double phi_w);

// Stop test: w exactly binary and both residuals below eps_stop.
bool check_stop(const SolverState& state, const ObjectiveOracle& oracle,
                const SolverParams& params);

SolveReport solve(const ObjectiveOracle& oracle, const SpfSpec& spec,
                  const SolverParams& params, const Vec& x0);

// Hyperparameter presets matching the reference experiments; remaining
// fields take the artifact defaults above.
SolverParams default_params_recovery(double exponent, int s, int n, double norm_btA);
SolverParams default_params_classical_mimo(int n, double norm_ytH_inf);
SolverParams default_params_onebit(int n, double norm_ytH_inf);
SolverParams default_params_qubo(double frobenius_Q);

std::string to_string(StopReason r);

}  // namespace shapeak
