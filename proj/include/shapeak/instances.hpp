#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "shapeak/matrix.hpp"
#include "shapeak/objective.hpp"

namespace shapeak {

enum class InstanceKind { Recovery, ClassicalMimo, OneBitMimo, Qubo };

// One synthetic problem: the oracle-building data plus ground truth and the
// generation parameters needed to regenerate or persist it.
struct ProblemInstance {
  InstanceKind kind = InstanceKind::Qubo;
  Mat A;                // sensing/channel matrix, or Q for QUBO
  Vec b;                // right-hand side, +-1 signs for one-bit, q for QUBO
  double exponent = 2.0;  // residual norm power (recovery)
  double rho = 1.0;       // noise standard deviation (one-bit)
  std::optional<Vec> ground_truth;  // binary, length n
  std::uint64_t seed = 0;
  std::map<std::string, double> metadata;
};

ObjectiveOracle make_oracle(const ProblemInstance& inst);

// b = A x* + nf * noise, A ~ N(0,1)/sqrt(m) (unscaled above n = 1e4, sparse
// at n >= 1e5), x* with exactly s ones.
ProblemInstance gen_recovery(int m, int n, int s, double exponent, double nf,
                             std::uint64_t seed);

// Complex channel lifted to the real quadratic recovery form. n_real is the
// lifted dimension (must be even); correlated channels use the r^{|i-j|}
// correlation profile at both ends.
ProblemInstance gen_classical_mimo(int m_complex, int n_real, double snr_db,
                                   bool correlated, double r, std::uint64_t seed);

// y = sgn(H z* + v), z* in {-1,1}^n, noise variance from the SNR; ground
// truth stored as (z*+1)/2.
ProblemInstance gen_onebit(int m, int n, double snr_db, std::uint64_t seed);

// Symmetric Q with the given density; magnitudes uniform on value_range and
// a fraction neg_proportion of the stored upper triangle negated.
ProblemInstance gen_qubo(int n, double density, double neg_proportion,
                         std::uint64_t seed, double value_lo = 10.0,
                         double value_hi = 100.0);

double metric_acc(const Vec& x, const Vec& x_star);
double metric_ber(const Vec& x, const Vec& x_star);

struct GapResult {
  double value = 0.0;
  bool relative = true;  // false when the reference value is 0 (absolute gap)
};
GapResult metric_gap(double obj, double lowest);

// Persistence: JSON manifest plus MatrixMarket/text data files in out_dir;
// load reproduces the instance (and thus the oracle) bit exactly.
std::string save_instance(const ProblemInstance& inst, const std::string& out_dir,
                          const std::string& name);
ProblemInstance load_instance(const std::string& manifest_path);

std::string to_string(InstanceKind k);
InstanceKind instance_kind_from_string(const std::string& s);

}  // namespace shapeak
