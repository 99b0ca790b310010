// shapeak: generate benchmark instances, solve them, run parameter sweeps,
// and check the solver's optimality certificates from the command line.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapeak/instances.hpp"
#include "shapeak/io.hpp"
#include "shapeak/oracle.hpp"
#include "shapeak/rng.hpp"
#include "shapeak/solver.hpp"
#include "shapeak/spf.hpp"
#include "shapeak/stationarity.hpp"

namespace {

using namespace shapeak;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitVerification = 4;

int worker_count(int trials) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* cap = std::getenv("SHAPEAK_THREADS")) {
    const long v = std::strtol(cap, nullptr, 10);
    if (v > 0 && static_cast<unsigned>(v) < n) n = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<unsigned>(n, static_cast<unsigned>(std::max(trials, 1))));
}

// Lower-median: for even counts take the smaller of the two central values.
double lower_median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

struct SpfFlags {
  std::string family = "g";
  double omega = 0.5, a = 1.0, b = 1.0, p = 1.0, q = 1.0;
  std::string psi = "identity";
  double p_psi = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--spf", family, "Penalty family: g, h, or psi")
        ->check(CLI::IsMember({"g", "h", "psi"}));
    cmd->add_option("--omega", omega, "Branch point in [0,1]");
    cmd->add_option("--a", a, "Left branch coefficient (>= 1)");
    cmd->add_option("--b", b, "Right branch coefficient (>= 1)");
    cmd->add_option("--p", p, "Left branch exponent (> 0)");
    cmd->add_option("--q", q, "Right branch exponent (> 0)");
    cmd->add_option("--psi", psi, "psi kind for the psi family")
        ->check(CLI::IsMember({"identity", "power", "log1p", "expm1", "sin", "tan"}));
    cmd->add_option("--p-psi", p_psi, "Inner exponent for the psi family, in (0,1]");
  }

  SpfSpec build() const {
    SpfSpec s;
    s.family = family == "g"   ? SpfFamily::GFamily
               : family == "h" ? SpfFamily::HFamily
                               : SpfFamily::PsiAbs;
    s.omega = omega;
    s.a = a;
    s.b = b;
    s.p = p;
    s.q = q;
    s.p_psi = p_psi;
    if (psi == "identity") s.psi = PsiKind::Identity;
    else if (psi == "power") s.psi = PsiKind::Power;
    else if (psi == "log1p") s.psi = PsiKind::Log1p;
    else if (psi == "expm1") s.psi = PsiKind::ExpM1;
    else if (psi == "sin") s.psi = PsiKind::Sin;
    else s.psi = PsiKind::Tan;
    s.validate();
    return s;
  }
};

struct ParamFlags {
  std::optional<double> mu0, sigma, eta, rho, eps, eps_mu, time_budget;
  std::optional<int> k0, max_iter;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mu0", mu0, "Initial penalty weight");
    cmd->add_option("--sigma", sigma, "Augmented Lagrangian weight");
    cmd->add_option("--eta", eta, "Penalty growth cap factor (> 1)");
    cmd->add_option("--rho", rho, "Penalty growth coefficient in (0, 1/6]");
    cmd->add_option("--k0", k0, "Penalty update period (iterations)");
    cmd->add_option("--eps", eps, "Stopping tolerance in (0,1)");
    cmd->add_option("--eps-mu", eps_mu, "Penalty-rule denominator offset");
    cmd->add_option("--max-iter", max_iter, "Iteration cap");
    cmd->add_option("--time-budget", time_budget, "Wall-time budget in seconds");
  }

  SolverParams apply(SolverParams p) const {
    if (mu0) p.mu0 = *mu0;
    if (sigma) p.sigma = *sigma;
    if (eta) p.eta = *eta;
    if (rho) p.rho = *rho;
    if (k0) p.k0 = *k0;
    if (eps) p.eps_stop = *eps;
    if (eps_mu) p.eps_mu = *eps_mu;
    if (max_iter) p.max_iter = *max_iter;
    if (time_budget) p.time_budget_seconds = *time_budget;
    return p;
  }
};

double meta(const ProblemInstance& inst, const std::string& key, double fallback) {
  const auto it = inst.metadata.find(key);
  return it == inst.metadata.end() ? fallback : it->second;
}

SolverParams preset_for(const ProblemInstance& inst) {
  switch (inst.kind) {
    case InstanceKind::Recovery: {
      const int n = static_cast<int>(inst.A.cols());
      const int s = static_cast<int>(meta(inst, "s", 0.1 * n));
      return default_params_recovery(inst.exponent, s, n,
                                     inst.A.apply_transpose(inst.b).norm());
    }
    case InstanceKind::ClassicalMimo: {
      const Vec ytH = inst.A.apply_transpose(inst.b);
      return default_params_classical_mimo(static_cast<int>(inst.A.cols()),
                                           ytH.cwiseAbs().maxCoeff());
    }
    case InstanceKind::OneBitMimo: {
      const Vec ytH = inst.A.apply_transpose(inst.b);
      return default_params_onebit(static_cast<int>(inst.A.cols()),
                                   ytH.cwiseAbs().maxCoeff());
    }
    case InstanceKind::Qubo:
      return default_params_qubo(inst.A.frobenius_norm());
  }
  return SolverParams{};
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string kind;
  int m = 500, n = 1000, s = 100;
  double q = 2.0, nf = 0.0;
  double density = 0.8, neg = 0.5;
  double snr = 10.0, r = 0.2;
  bool correlated = false;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string name;
};

int run_generate(const GenerateArgs& a) {
  ProblemInstance inst;
  if (a.kind == "recovery")
    inst = gen_recovery(a.m, a.n, a.s, a.q, a.nf, a.seed);
  else if (a.kind == "qubo")
    inst = gen_qubo(a.n, a.density, a.neg, a.seed);
  else if (a.kind == "onebit")
    inst = gen_onebit(a.m, a.n, a.snr, a.seed);
  else
    inst = gen_classical_mimo(a.m, a.n, a.snr, a.correlated, a.r, a.seed);
  const std::string name =
      a.name.empty() ? a.kind + "_seed" + std::to_string(a.seed) : a.name;
  std::cout << save_instance(inst, a.out, name) << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- solve

struct SolveArgs {
  std::string manifest;
  SpfFlags spf;
  ParamFlags params;
  std::string x0 = "zeros";
  std::string out;
  std::string trace;
  bool strict = false;
};

int run_solve(const SolveArgs& a) {
  const ProblemInstance inst = load_instance(a.manifest);
  ObjectiveOracle oracle = make_oracle(inst);
  const SpfSpec spec = a.spf.build();
  const SolverParams p = a.params.apply(preset_for(inst));

  Vec x0;
  if (a.x0 == "zeros") x0 = Vec::Zero(oracle.n);
  else if (a.x0 == "ones") x0 = Vec::Ones(oracle.n);
  else x0 = read_vector(a.x0);

  const SolveReport rep = solve(oracle, spec, p, x0);

  nlohmann::json j = rep.to_json(a.strict);
  if (inst.ground_truth) {
    j["metric_acc"] = metric_acc(rep.x_final, *inst.ground_truth);
    j["metric_ber"] = metric_ber(rep.x_final, *inst.ground_truth);
  }
  if (a.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream f(a.out);
    f << j.dump(2) << "\n";
    std::cout << a.out << "\n";
  }
  if (!a.trace.empty()) rep.write_trace_csv(a.trace);
  return rep.converged ? kExitOk : kExitBudget;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  std::string family;
  std::string param;
  std::vector<double> values;
  int trials = 20;
  GenerateArgs base;  // fixed generator parameters
  SpfFlags spf;
  ParamFlags params;
  std::string out;
};

struct TrialResult {
  bool ok = false;
  double metric = 0.0;
  double time_s = 0.0;
};

TrialResult run_trial(const BenchArgs& a, double value, std::uint64_t seed) {
  TrialResult r;
  try {
    GenerateArgs g = a.base;
    if (a.param == "m") g.m = static_cast<int>(value);
    else if (a.param == "n") g.n = static_cast<int>(value);
    else if (a.param == "s") g.s = static_cast<int>(value);
    else if (a.param == "q") g.q = value;
    else if (a.param == "nf") g.nf = value;
    else if (a.param == "snr") g.snr = value;
    else if (a.param == "density") g.density = value;
    else if (a.param == "neg") g.neg = value;
    else throw std::invalid_argument("unknown sweep parameter: " + a.param);

    ProblemInstance inst;
    if (a.family == "recovery")
      inst = gen_recovery(g.m, g.n, g.s, g.q, g.nf, seed);
    else if (a.family == "qubo")
      inst = gen_qubo(g.n, g.density, g.neg, seed);
    else if (a.family == "onebit")
      inst = gen_onebit(g.m, g.n, g.snr, seed);
    else
      inst = gen_classical_mimo(g.m, g.n, g.snr, g.correlated, g.r, seed);

    ObjectiveOracle oracle = make_oracle(inst);
    const SpfSpec spec = a.spf.build();
    const SolverParams p = a.params.apply(preset_for(inst));

    const auto t0 = std::chrono::steady_clock::now();
    const SolveReport rep = solve(oracle, spec, p, Vec::Zero(oracle.n));
    r.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (a.family == "recovery")
      r.metric = metric_acc(rep.x_final, *inst.ground_truth);
    else if (a.family == "qubo") {
      if (oracle.n <= 24) {
        const auto [xb, fb] = brute_force_binary(oracle);
        r.metric = metric_gap(rep.objective, fb).value;
      } else {
        r.metric = rep.objective;
      }
    } else {
      r.metric = metric_ber(rep.x_final, *inst.ground_truth);
    }
    r.ok = true;
  } catch (const std::exception& e) {
    std::cerr << "trial failed (value=" << value << " seed=" << seed
              << "): " << e.what() << "\n";
  }
  return r;
}

int run_bench(const BenchArgs& a) {
  std::ostringstream csv;
  csv << "family,param,value,trial_count,metric_name,median,best,time_s\n";
  const std::string metric_name =
      a.family == "recovery" ? "acc"
      : a.family == "qubo"   ? (a.base.n <= 24 ? "gap" : "objective")
                             : "ber";
  const bool higher_is_better = a.family == "recovery";

  for (double value : a.values) {
    std::vector<TrialResult> results(static_cast<std::size_t>(a.trials));
    std::atomic<int> next{0};
    const int workers = worker_count(a.trials);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int t; (t = next.fetch_add(1)) < a.trials;)
          results[static_cast<std::size_t>(t)] =
              run_trial(a, value, static_cast<std::uint64_t>(t) + 1);
      });
    for (auto& th : pool) th.join();

    std::vector<double> metrics, times;
    for (const auto& r : results)
      if (r.ok) {
        metrics.push_back(r.metric);
        times.push_back(r.time_s);
      }
    if (metrics.empty()) {
      csv << a.family << "," << a.param << "," << format_double(value) << ",0,"
          << metric_name << ",nan,nan,nan\n";
      continue;
    }
    const double best = higher_is_better
                            ? *std::max_element(metrics.begin(), metrics.end())
                            : *std::min_element(metrics.begin(), metrics.end());
    csv << a.family << "," << a.param << "," << format_double(value) << ","
        << metrics.size() << "," << metric_name << ","
        << format_double(lower_median(metrics)) << "," << format_double(best) << ","
        << format_double(lower_median(times)) << "\n";
  }

  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(a.out);
    f << csv.str();
    std::cout << a.out << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------------ verify

ObjectiveOracle worked_example_oracle() {
  DenseMat Q(2, 2);
  Q << 1, -1, -2, 0;
  Vec q(2);
  q << -2, 0.5;
  return quadratic_oracle(Mat(Q), q);
}

SpfSpec unit_g() {
  SpfSpec s;
  s.family = SpfFamily::GFamily;
  s.omega = 0.5;
  s.a = s.b = s.p = s.q = 1.0;
  return s;
}

int emit_reports(const std::vector<VerificationReport>& reports) {
  nlohmann::json out = nlohmann::json::array();
  bool all = true;
  for (const auto& r : reports) {
    out.push_back(r.to_json());
    all = all && r.passed;
  }
  std::cout << out.dump(2) << "\n";
  return all ? kExitOk : kExitVerification;
}

int verify_example2() {
  const auto oracle = worked_example_oracle();
  std::vector<VerificationReport> reports;
  reports.push_back(verify_exact_penalty(oracle, unit_g(), 4.0));

  // the solver must land on the enumerated optimum (1,1) with f = -2.5
  SolverParams p;
  p.mu0 = 4.0;
  p.sigma = 2.0;
  const SolveReport run = solve(oracle, unit_g(), p, Vec::Zero(2));
  const auto [xb, fb] = brute_force_binary(oracle);
  VerificationReport agree;
  agree.claim = VerificationReport::Claim::BruteForceOptimum;
  agree.evidence["solver_objective"] = run.objective;
  agree.evidence["enumerated_objective"] = fb;
  agree.evidence["x0"] = run.x_final[0];
  agree.evidence["x1"] = run.x_final[1];
  agree.passed = run.converged && run.x_final == xb && run.objective == fb;
  reports.push_back(agree);
  return emit_reports(reports);
}

int verify_negative_control() {
  // the smooth x(1-x) penalty keeps an interior basin at 1/2 for every mu,
  // so the slope probe must reject it while accepting the sharp-peak family
  const auto probe = validate_spf_fn([](double x) { return x * (1.0 - x); }, 1001, 0.5);
  VerificationReport rejected;
  rejected.claim = VerificationReport::Claim::ExactPenalty;
  rejected.evidence["min_abs_slope"] = probe.min_abs_slope;
  rejected.evidence["claimed_bound"] = probe.claimed_bound;
  rejected.passed = !probe.passed;

  const auto oracle = worked_example_oracle();
  std::vector<VerificationReport> reports{rejected};
  reports.push_back(verify_exact_penalty(oracle, unit_g(), 4.0));
  return emit_reports(reports);
}

int verify_descent_lemma(int n, int seeds) {
  std::vector<VerificationReport> reports;
  for (int s = 1; s <= seeds; ++s) {
    Rng rng(17, static_cast<std::uint64_t>(s));
    DenseMat B(n, n);
    for (Eigen::Index i = 0; i < B.size(); ++i) B.data()[i] = rng.normal();
    DenseMat Q = B.transpose() * B / double(n);
    Vec q(n);
    for (Eigen::Index i = 0; i < n; ++i) q[i] = rng.normal();
    auto oracle = quadratic_oracle(Mat(Q), q);
    SolverParams p;
    p.mu0 = 10.0;
    p.eta = 2.0;
    const double beta = *oracle.lipschitz_hint;
    p.sigma = 8.0 * std::max(oracle.lambda_bound, beta);
    reports.push_back(verify_descent(oracle, unit_g(), p, Vec::Zero(n)));
  }
  return emit_reports(reports);
}

int verify_manifest(const std::string& path) {
  const ProblemInstance inst = load_instance(path);
  ObjectiveOracle oracle = make_oracle(inst);
  std::vector<VerificationReport> reports;
  reports.push_back(finite_diff_check(oracle, 25, 1e-5));

  SpfSpec spec = unit_g();
  SolverParams p = preset_for(inst);
  const SolveReport run = solve(oracle, spec, p, Vec::Zero(oracle.n));
  VerificationReport stat;
  stat.claim = VerificationReport::Claim::KktBinary;
  const auto cert = is_p_stationary(run.x_final, oracle, spec, run.mu_final,
                                    1.0 / p.sigma, p.eps_stop);
  stat.evidence["worst_violation"] = cert.worst_violation;
  stat.evidence["mu_final"] = run.mu_final;
  stat.evidence["converged"] = run.converged ? 1.0 : 0.0;
  // a budget exit still reports the best vertex; only converged runs claim
  // P-stationarity
  stat.passed = !run.converged || cert.satisfied;
  reports.push_back(stat);

  if (oracle.n <= 20 && run.converged) {
    const auto [xb, fb] = brute_force_binary(oracle);
    VerificationReport gap;
    gap.claim = VerificationReport::Claim::BruteForceOptimum;
    gap.evidence["solver_objective"] = run.objective;
    gap.evidence["enumerated_objective"] = fb;
    gap.passed = run.objective <= fb + 1e-9 * (1.0 + std::abs(fb)) ||
                 metric_gap(run.objective, fb).value <= 1.0;
    reports.push_back(gap);
  }
  return emit_reports(reports);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sharp-peak penalty solver for binary integer programs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Sectioned key=value config file; flags override");
  app.failure_message(CLI::FailureMessage::help);

  GenerateArgs gen;
  auto* cg = app.add_subcommand("generate", "Generate a benchmark instance");
  cg->add_option("kind", gen.kind, "recovery | qubo | onebit | classical-mimo")
      ->required()
      ->check(CLI::IsMember({"recovery", "qubo", "onebit", "classical-mimo"}));
  cg->add_option("--m", gen.m, "Rows / measurements");
  cg->add_option("--n", gen.n, "Variables");
  cg->add_option("--s", gen.s, "Support size (recovery)");
  cg->add_option("--q", gen.q, "Residual norm exponent (recovery)");
  cg->add_option("--nf", gen.nf, "Noise factor (recovery)");
  cg->add_option("--density", gen.density, "Nonzero density (qubo)");
  cg->add_option("--neg", gen.neg, "Negative entry proportion (qubo)");
  cg->add_option("--snr", gen.snr, "SNR in dB (mimo)");
  cg->add_flag("--correlated", gen.correlated, "Correlated channel (classical-mimo)");
  cg->add_option("--r", gen.r, "Channel correlation coefficient");
  cg->add_option("--seed", gen.seed, "Generator seed");
  cg->add_option("--out", gen.out, "Output directory");
  cg->add_option("--name", gen.name, "Instance name (default kind_seedN)");

  SolveArgs sol;
  auto* cs = app.add_subcommand("solve", "Solve an instance manifest");
  cs->add_option("manifest", sol.manifest, "Instance manifest path")->required();
  sol.spf.attach(cs);
  sol.params.attach(cs);
  cs->add_option("--x0", sol.x0, "zeros | ones | vector file path");
  cs->add_option("--out", sol.out, "Report JSON path (default stdout)");
  cs->add_option("--trace", sol.trace, "Write per-iteration trace CSV here");
  cs->add_flag("--strict", sol.strict, "Strict-determinism JSON (omit wall time)");

  BenchArgs bench;
  auto* cb = app.add_subcommand("bench", "Sweep one parameter, median over trials");
  cb->add_option("--family", bench.family, "recovery | qubo | onebit | classical-mimo")
      ->required()
      ->check(CLI::IsMember({"recovery", "qubo", "onebit", "classical-mimo"}));
  cb->add_option("--param", bench.param, "Swept parameter name")->required();
  cb->add_option("--values", bench.values, "Swept values (empty list emits a header-only CSV)");
  cb->add_option("--trials", bench.trials, "Seeded trials per value");
  cb->add_option("--m", bench.base.m, "Fixed rows / measurements");
  cb->add_option("--n", bench.base.n, "Fixed variables");
  cb->add_option("--s", bench.base.s, "Fixed support size");
  cb->add_option("--exponent", bench.base.q, "Fixed residual norm exponent");
  cb->add_option("--nf", bench.base.nf, "Fixed noise factor");
  cb->add_option("--density", bench.base.density, "Fixed qubo density");
  cb->add_option("--neg", bench.base.neg, "Fixed qubo negative proportion");
  cb->add_option("--snr", bench.base.snr, "Fixed SNR in dB");
  bench.spf.attach(cb);
  bench.params.attach(cb);
  cb->add_option("--out", bench.out, "CSV path (default stdout)");

  std::string verify_case;
  int verify_n = 16, verify_seeds = 20;
  auto* cv = app.add_subcommand("verify", "Run a verification suite");
  cv->add_option("case", verify_case,
                 "example2 | example1-negative-control | descent-lemma | manifest path")
      ->required();
  cv->add_option("--n", verify_n, "Problem size for descent-lemma");
  cv->add_option("--seeds", verify_seeds, "Seed count for descent-lemma");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*cg) return run_generate(gen);
    if (*cs) return run_solve(sol);
    if (*cb) return run_bench(bench);
    if (*cv) {
      if (verify_case == "example2") return verify_example2();
      if (verify_case == "example1-negative-control") return verify_negative_control();
      if (verify_case == "descent-lemma") return verify_descent_lemma(verify_n, verify_seeds);
      std::ifstream probe(verify_case);
      if (probe.good()) return verify_manifest(verify_case);
      std::cerr << "unknown verify case '" << verify_case
                << "'; available: example2, example1-negative-control, "
                   "descent-lemma, or an instance manifest path\n";
      return kExitUsage;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
