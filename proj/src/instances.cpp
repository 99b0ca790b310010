#include "shapeak/instances.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "shapeak/io.hpp"
#include "shapeak/rng.hpp"

namespace shapeak {

namespace {

// substream ids within one instance seed
enum : std::uint64_t { kStreamMatrix = 0, kStreamTruth = 1, kStreamNoise = 2, kStreamAux = 3 };

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// first k elements of a seeded uniform permutation of 0..n-1
std::vector<int> pick_indices(int n, int k, Rng& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + int(rng.uniform_index(std::uint64_t(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

double snr_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

}  // namespace

ObjectiveOracle make_oracle(const ProblemInstance& inst) {
  switch (inst.kind) {
    case InstanceKind::Recovery:
    case InstanceKind::ClassicalMimo:
      return recovery_oracle(inst.A, inst.b, inst.exponent);
    case InstanceKind::OneBitMimo:
      return onebit_oracle(inst.A, inst.b, inst.rho);
    case InstanceKind::Qubo:
      return quadratic_oracle(inst.A, Vec::Zero(inst.A.cols()));
  }
  throw std::logic_error("make_oracle: unknown instance kind");
}

ProblemInstance gen_recovery(int m, int n, int s, double exponent, double nf,
                             std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_recovery: nonpositive dims");
  if (s < 1 || s > n) throw std::invalid_argument("gen_recovery: s must lie in [1,n]");
  if (!(exponent > 1.0)) throw std::invalid_argument("gen_recovery: exponent must be > 1");

  ProblemInstance inst;
  inst.kind = InstanceKind::Recovery;
  inst.seed = seed;
  inst.exponent = exponent;

  Rng mat_rng(seed, kStreamMatrix);
  const double scale = n <= 10000 ? 1.0 / std::sqrt(double(m)) : 1.0;
  if (n >= 100000) {
    const double density = std::min(1.0, 1e9 / (5.0 * double(n) * double(n)));
    const int per_col = std::max(1, int(std::llround(density * m)));
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(std::size_t(per_col) * std::size_t(n));
    for (int j = 0; j < n; ++j) {
      auto rows = pick_indices(m, per_col, mat_rng);
      std::sort(rows.begin(), rows.end());
      for (int i : rows) trips.emplace_back(i, j, mat_rng.normal() * scale);
    }
    SparseMat A(m, n);
    A.setFromTriplets(trips.begin(), trips.end());
    inst.A = Mat(std::move(A));
  } else {
    DenseMat A(m, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) A(i, j) = mat_rng.normal() * scale;
    inst.A = Mat(std::move(A));
  }

  Rng truth_rng(seed, kStreamTruth);
  Vec xs = Vec::Zero(n);
  for (int i : pick_indices(n, s, truth_rng)) xs[i] = 1.0;
  inst.ground_truth = xs;

  Rng noise_rng(seed, kStreamNoise);
  Vec b = inst.A.apply(xs);
  if (nf != 0.0)
    for (int i = 0; i < m; ++i) b[i] += nf * noise_rng.normal();
  inst.b = std::move(b);

  inst.metadata = {{"m", double(m)}, {"n", double(n)}, {"s", double(s)},
                   {"q", exponent},  {"nf", nf}};
  return inst;
}

ProblemInstance gen_classical_mimo(int m_complex, int n_real, double snr_db,
                                   bool correlated, double r, std::uint64_t seed) {
  if (n_real < 2 || n_real % 2 != 0)
    throw std::invalid_argument("gen_classical_mimo: n_real must be even and >= 2");
  if (std::abs(r) > 1.0) throw std::invalid_argument("gen_classical_mimo: |r| must be <= 1");
  const int nc = n_real / 2;
  const int m = m_complex;

  Rng mat_rng(seed, kStreamMatrix);
  const double scale = n_real <= 10000 ? 1.0 / std::sqrt(double(m)) : 1.0;
  CMat H(m, nc);
  if (correlated && r != 0.0) {
    // unit-variance circularly symmetric entries, then colored at both ends
    CMat Ht(m, nc);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < nc; ++j)
      for (int i = 0; i < m; ++i)
        Ht(i, j) = std::complex<double>(mat_rng.normal(), mat_rng.normal()) * inv_sqrt2;
    auto kms = [&](int dim) {
      DenseMat R(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) R(i, j) = std::pow(r, std::abs(i - j));
      return DenseMat(Eigen::LLT<DenseMat>(R).matrixL());
    };
    const DenseMat P = kms(m);
    const DenseMat Q = kms(nc);
    H = (P * Ht * Q.transpose()) * scale;
  } else {
    for (int j = 0; j < nc; ++j)
      for (int i = 0; i < m; ++i)
        H(i, j) = std::complex<double>(mat_rng.normal(), mat_rng.normal()) * scale;
  }

  Rng truth_rng(seed, kStreamTruth);
  CVec ws(nc);
  Vec xs(n_real);
  for (int j = 0; j < nc; ++j) {
    const double re = double(truth_rng.uniform_index(2));
    const double im = double(truth_rng.uniform_index(2));
    ws[j] = std::complex<double>(re, im);
    xs[j] = re;
    xs[nc + j] = im;
  }

  // noise variance from SNR = E||H w*||^2 / E||noise||^2
  double signal_energy;  // E||H w*||^2
  if (correlated && r != 0.0) {
    Rng aux_rng(seed, kStreamAux);
    double acc = 0.0;
    const int draws = 1000;
    for (int d = 0; d < draws; ++d) {
      CVec w(nc);
      for (int j = 0; j < nc; ++j)
        w[j] = std::complex<double>(double(aux_rng.uniform_index(2)),
                                    double(aux_rng.uniform_index(2)));
      acc += (H * w).squaredNorm();
    }
    signal_energy = acc / draws;
  } else {
    // E|H_ij|^2 = 2 scale^2 and E|w*_j|^2 = 1 (QPSK components are fair bits)
    signal_energy = double(m) * double(nc) * 2.0 * scale * scale;
  }
  const double rho2 = signal_energy / (snr_linear(snr_db) * m);

  Rng noise_rng(seed, kStreamNoise);
  CVec y = H * ws;
  const double noise_scale = std::sqrt(rho2 / 2.0);
  for (int i = 0; i < m; ++i)
    y[i] += std::complex<double>(noise_rng.normal(), noise_rng.normal()) * noise_scale;

  // real lifting
  DenseMat A(2 * m, n_real);
  A.block(0, 0, m, nc) = H.real();
  A.block(0, nc, m, nc) = -H.imag();
  A.block(m, 0, m, nc) = H.imag();
  A.block(m, nc, m, nc) = H.real();
  Vec b(2 * m);
  b.head(m) = y.real();
  b.tail(m) = y.imag();

  ProblemInstance inst;
  inst.kind = InstanceKind::ClassicalMimo;
  inst.seed = seed;
  inst.exponent = 2.0;
  inst.A = Mat(std::move(A));
  inst.b = std::move(b);
  inst.ground_truth = xs;
  inst.metadata = {{"m_complex", double(m)}, {"n", double(n_real)},
                   {"snr_db", snr_db},       {"correlated", correlated ? 1.0 : 0.0},
                   {"r", r},                 {"rho2", rho2}};
  return inst;
}

ProblemInstance gen_onebit(int m, int n, double snr_db, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_onebit: nonpositive dims");
  Rng mat_rng(seed, kStreamMatrix);
  DenseMat H(m, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) H(i, j) = mat_rng.normal();

  Rng truth_rng(seed, kStreamTruth);
  Vec zs(n), xs(n);
  for (int j = 0; j < n; ++j) {
    const double bit = double(truth_rng.uniform_index(2));
    zs[j] = 2.0 * bit - 1.0;
    xs[j] = bit;
  }

  // E||H z*||^2 = m n, E||v||^2 = m rho^2  =>  rho^2 = n / SNR
  const double rho2 = double(n) / snr_linear(snr_db);
  const double rho = std::sqrt(rho2);

  Rng noise_rng(seed, kStreamNoise);
  Vec t = H * zs;
  Vec y(m);
  for (int i = 0; i < m; ++i) {
    const double v = t[i] + rho * noise_rng.normal();
    y[i] = v < 0.0 ? -1.0 : 1.0;  // sgn with sgn(0) := +1
  }

  ProblemInstance inst;
  inst.kind = InstanceKind::OneBitMimo;
  inst.seed = seed;
  inst.rho = rho;
  inst.A = Mat(std::move(H));
  inst.b = std::move(y);
  inst.ground_truth = xs;
  inst.metadata = {{"m", double(m)}, {"n", double(n)}, {"snr_db", snr_db}, {"rho2", rho2}};
  return inst;
}

ProblemInstance gen_qubo(int n, double density, double neg_proportion,
                         std::uint64_t seed, double value_lo, double value_hi) {
  if (n < 1) throw std::invalid_argument("gen_qubo: nonpositive dim");
  if (!(density > 0.0 && density <= 1.0))
    throw std::invalid_argument("gen_qubo: density must lie in (0,1]");
  if (!(neg_proportion >= 0.0 && neg_proportion <= 1.0))
    throw std::invalid_argument("gen_qubo: neg_proportion must lie in [0,1]");

  Rng rng(seed, kStreamMatrix);
  // upper triangle (including diagonal) selection + magnitudes
  struct Entry { int i, j; double v; };
  std::vector<Entry> upper;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const bool keep = density >= 1.0 || rng.uniform() < density;
      const double mag = rng.uniform(value_lo, value_hi);
      if (keep) upper.push_back({i, j, mag});
    }

  // negate an exact-count uniformly random subset of the stored entries
  Rng neg_rng(seed, kStreamAux);
  const int nnz = int(upper.size());
  const int neg = int(std::llround(neg_proportion * nnz));
  for (int k : pick_indices(nnz, neg, neg_rng)) upper[std::size_t(k)].v = -upper[std::size_t(k)].v;

  ProblemInstance inst;
  inst.kind = InstanceKind::Qubo;
  inst.seed = seed;
  if (n >= 10000) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * upper.size());
    for (const auto& e : upper) {
      trips.emplace_back(e.i, e.j, e.v);
      if (e.i != e.j) trips.emplace_back(e.j, e.i, e.v);
    }
    SparseMat Q(n, n);
    Q.setFromTriplets(trips.begin(), trips.end());
    inst.A = Mat(std::move(Q));
  } else {
    DenseMat Q = DenseMat::Zero(n, n);
    for (const auto& e : upper) {
      Q(e.i, e.j) = e.v;
      Q(e.j, e.i) = e.v;
    }
    inst.A = Mat(std::move(Q));
  }
  inst.b = Vec::Zero(n);
  inst.metadata = {{"n", double(n)},
                   {"density", density},
                   {"neg_proportion", neg_proportion},
                   {"value_lo", value_lo},
                   {"value_hi", value_hi}};
  return inst;
}

double metric_acc(const Vec& x, const Vec& x_star) {
  if (x.size() != x_star.size()) throw std::invalid_argument("metric_acc: length mismatch");
  const double denom = x_star.norm();
  if (denom == 0.0) throw std::invalid_argument("metric_acc: x_star must be nonzero");
  return 1.0 - (x - x_star).norm() / denom;
}

double metric_ber(const Vec& x, const Vec& x_star) {
  if (x.size() != x_star.size()) throw std::invalid_argument("metric_ber: length mismatch");
  if (x.size() == 0) throw std::invalid_argument("metric_ber: empty vectors");
  Eigen::Index mismatches = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != x_star[i]) ++mismatches;
  return double(mismatches) / double(x.size());
}

GapResult metric_gap(double obj, double lowest) {
  GapResult g;
  if (lowest == 0.0) {
    g.relative = false;
    g.value = std::abs(obj);
  } else {
    g.relative = true;
    g.value = std::abs(obj - lowest) / std::abs(lowest) * 100.0;
  }
  return g;
}

std::string to_string(InstanceKind k) {
  switch (k) {
    case InstanceKind::Recovery: return "recovery";
    case InstanceKind::ClassicalMimo: return "classical_mimo";
    case InstanceKind::OneBitMimo: return "onebit_mimo";
    case InstanceKind::Qubo: return "qubo";
  }
  return "?";
}

InstanceKind instance_kind_from_string(const std::string& s) {
  if (s == "recovery") return InstanceKind::Recovery;
  if (s == "classical_mimo") return InstanceKind::ClassicalMimo;
  if (s == "onebit_mimo") return InstanceKind::OneBitMimo;
  if (s == "qubo") return InstanceKind::Qubo;
  throw std::invalid_argument("unknown instance kind: " + s);
}

std::string save_instance(const ProblemInstance& inst, const std::string& out_dir,
                          const std::string& name) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string matrix_file = name + ".A.mtx";
  const std::string rhs_file = name + ".b.txt";
  const std::string truth_file = name + ".truth.txt";
  write_matrix_market((fs::path(out_dir) / matrix_file).string(), inst.A);
  write_vector((fs::path(out_dir) / rhs_file).string(), inst.b);
  if (inst.ground_truth)
    write_vector((fs::path(out_dir) / truth_file).string(), *inst.ground_truth);

  nlohmann::json j;
  j["kind"] = to_string(inst.kind);
  j["seed"] = inst.seed;
  j["exponent"] = inst.exponent;
  j["rho"] = inst.rho;
  j["metadata"] = inst.metadata;
  j["files"]["matrix"] = matrix_file;
  j["files"]["rhs"] = rhs_file;
  if (inst.ground_truth) j["files"]["truth"] = truth_file;

  const std::string manifest = (fs::path(out_dir) / (name + ".manifest.json")).string();
  std::ofstream out(manifest);
  if (!out) throw std::runtime_error(manifest + ": cannot open for write");
  out << j.dump(2) << "\n";
  return manifest;
}

ProblemInstance load_instance(const std::string& manifest_path) {
  namespace fs = std::filesystem;
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error(manifest_path + ": cannot open");
  nlohmann::json j;
  in >> j;

  const fs::path dir = fs::path(manifest_path).parent_path();
  ProblemInstance inst;
  inst.kind = instance_kind_from_string(j.at("kind").get<std::string>());
  inst.seed = j.value("seed", std::uint64_t{0});
  inst.exponent = j.value("exponent", 2.0);
  inst.rho = j.value("rho", 1.0);
  if (j.contains("metadata"))
    inst.metadata = j.at("metadata").get<std::map<std::string, double>>();
  inst.A = read_matrix_market((dir / j.at("files").at("matrix").get<std::string>()).string());
  inst.b = read_vector((dir / j.at("files").at("rhs").get<std::string>()).string());
  if (j.at("files").contains("truth"))
    inst.ground_truth =
        read_vector((dir / j.at("files").at("truth").get<std::string>()).string());
  return inst;
}

}  // namespace shapeak
