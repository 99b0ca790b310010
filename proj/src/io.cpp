#include "shapeak/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace shapeak {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = char(std::tolower(unsigned(c)));
  return s;
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

}  // namespace

Mat read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad(path, "cannot open");
  std::string line;
  if (!std::getline(in, line)) bad(path, "empty file");
  std::istringstream hdr(line);
  std::string banner, object, format, field, symmetry;
  hdr >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix")
    bad(path, "not a MatrixMarket matrix");
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer") bad(path, "unsupported field " + field);
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") bad(path, "unsupported symmetry " + symmetry);

  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::istringstream sizes(line);

  if (format == "array") {
    Eigen::Index rows, cols;
    if (!(sizes >> rows >> cols)) bad(path, "bad size line");
    DenseMat m(rows, cols);
    // Array format is column-major; symmetric files store the lower triangle.
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = symmetric ? j : 0; i < rows; ++i) {
        double v;
        if (!(in >> v)) bad(path, "truncated data");
        m(i, j) = v;
        if (symmetric) m(j, i) = v;
      }
    }
    return Mat(std::move(m));
  }
  if (format == "coordinate") {
    Eigen::Index rows, cols;
    long long nnz;
    if (!(sizes >> rows >> cols >> nnz)) bad(path, "bad size line");
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(std::size_t(symmetric ? 2 * nnz : nnz));
    for (long long k = 0; k < nnz; ++k) {
      Eigen::Index i, j;
      double v;
      if (!(in >> i >> j >> v)) bad(path, "truncated data");
      trips.emplace_back(i - 1, j - 1, v);
      if (symmetric && i != j) trips.emplace_back(j - 1, i - 1, v);
    }
    SparseMat m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    return Mat(std::move(m));
  }
  bad(path, "unsupported format " + format);
}

void write_matrix_market(const std::string& path, const Mat& m) {
  std::ofstream out(path);
  if (!out) bad(path, "cannot open for write");
  if (m.is_sparse()) {
    const SparseMat& s = m.sparse();
    const bool sym = s.rows() == s.cols() &&
                     (SparseMat(s.transpose()) - s).norm() == 0.0;
    long long nnz = 0;
    for (int k = 0; k < s.outerSize(); ++k)
      for (SparseMat::InnerIterator it(s, k); it; ++it)
        if (!sym || it.row() >= it.col()) ++nnz;
    out << "%%MatrixMarket matrix coordinate real "
        << (sym ? "symmetric" : "general") << "\n";
    out << s.rows() << " " << s.cols() << " " << nnz << "\n";
    for (int k = 0; k < s.outerSize(); ++k)
      for (SparseMat::InnerIterator it(s, k); it; ++it)
        if (!sym || it.row() >= it.col())
          out << (it.row() + 1) << " " << (it.col() + 1) << " "
              << format_double(it.value()) << "\n";
  } else {
    const DenseMat& d = m.dense();
    const bool sym = d.rows() == d.cols() && d == d.transpose();
    out << "%%MatrixMarket matrix array real " << (sym ? "symmetric" : "general")
        << "\n";
    out << d.rows() << " " << d.cols() << "\n";
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      for (Eigen::Index i = sym ? j : 0; i < d.rows(); ++i)
        out << format_double(d(i, j)) << "\n";
  }
  if (!out) bad(path, "write failed");
}

Vec read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad(path, "cannot open");
  // Sniff: a JSON array starts with '['.
  int c = in.peek();
  while (c != EOF && std::isspace(c)) {
    in.get();
    c = in.peek();
  }
  std::vector<double> vals;
  if (c == '[') {
    nlohmann::json j;
    in >> j;
    if (!j.is_array()) bad(path, "JSON vector must be an array");
    vals = j.get<std::vector<double>>();
  } else {
    double v;
    while (in >> v) vals.push_back(v);
    if (!in.eof()) bad(path, "non-numeric token in vector file");
  }
  return Eigen::Map<const Vec>(vals.data(), Eigen::Index(vals.size()));
}

void write_vector(const std::string& path, const Vec& v) {
  std::ofstream out(path);
  if (!out) bad(path, "cannot open for write");
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << "\n";
  if (!out) bad(path, "write failed");
}

}  // namespace shapeak
