#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "shapeak/io.hpp"
#include "shapeak/rng.hpp"

using namespace shapeak;
namespace fs = std::filesystem;

namespace {

struct TmpDir {
  fs::path path;
  TmpDir() {
    path = fs::temp_directory_path() /
           ("shapeak_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("dense matrix round trips bit exactly") {
  TmpDir tmp;
  Rng rng(3, 0);
  DenseMat m(4, 3);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  write_matrix_market(tmp.file("dense.mtx"), Mat(m));
  const Mat back = read_matrix_market(tmp.file("dense.mtx"));
  REQUIRE_FALSE(back.is_sparse());
  CHECK(back.dense() == m);
}

TEST_CASE("symmetric dense matrix uses the symmetric qualifier and round trips") {
  TmpDir tmp;
  DenseMat m(3, 3);
  m << 1, -2, 3, -2, 4, 0.5, 3, 0.5, -7;
  write_matrix_market(tmp.file("sym.mtx"), Mat(m));
  std::ifstream in(tmp.file("sym.mtx"));
  std::string header;
  std::getline(in, header);
  CHECK(header.find("symmetric") != std::string::npos);
  const Mat back = read_matrix_market(tmp.file("sym.mtx"));
  CHECK(back.dense() == m);
}

TEST_CASE("sparse matrix round trips bit exactly with symmetry mirroring") {
  TmpDir tmp;
  SparseMat m(5, 5);
  std::vector<Eigen::Triplet<double>> tr = {
      {0, 0, 1.25}, {1, 0, -0.5}, {0, 1, -0.5}, {3, 4, 2.0}, {4, 3, 2.0}, {2, 2, -9.75}};
  m.setFromTriplets(tr.begin(), tr.end());
  write_matrix_market(tmp.file("sparse.mtx"), Mat(m));
  const Mat back = read_matrix_market(tmp.file("sparse.mtx"));
  REQUIRE(back.is_sparse());
  CHECK(DenseMat(back.sparse()) == DenseMat(m));
}

TEST_CASE("vector text round trip is bit exact") {
  TmpDir tmp;
  Rng rng(8, 1);
  Vec v(64);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal() * std::pow(10.0, int(i) % 7 - 3);
  write_vector(tmp.file("v.txt"), v);
  const Vec back = read_vector(tmp.file("v.txt"));
  REQUIRE(back.size() == v.size());
  CHECK(back == v);
}

TEST_CASE("vectors also load from JSON arrays") {
  TmpDir tmp;
  {
    std::ofstream out(tmp.file("v.json"));
    out << "[1.5, -2.25, 0, 1e-3]\n";
  }
  const Vec v = read_vector(tmp.file("v.json"));
  REQUIRE(v.size() == 4);
  CHECK(v[0] == 1.5);
  CHECK(v[1] == -2.25);
  CHECK(v[2] == 0.0);
  CHECK(v[3] == 1e-3);
}

TEST_CASE("format_double is a shortest exact decimal") {
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(std::stod(format_double(-1e-300)) == -1e-300);
}

TEST_CASE("missing files raise") {
  CHECK_THROWS(read_matrix_market("/nonexistent/path.mtx"));
  CHECK_THROWS(read_vector("/nonexistent/path.txt"));
}
