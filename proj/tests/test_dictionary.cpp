#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

#include "csfact/dictionary.hpp"
#include "csfact/matcore.hpp"
#include "csfact/rng.hpp"

using namespace csfact;

namespace {

std::vector<double> random_signal(int len, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(len);
  for (double& v : x) v = rng.next_normal();
  return x;
}

double roundtrip_error(const std::vector<double>& x) {
  std::vector<double> a, d;
  cdf97_analyze(x, a, d);
  const std::vector<double> y = cdf97_synthesize(a, d);
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    err = std::max(err, std::abs(x[i] - y[i]));
  return err;
}

Matrix seeded_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
  return m;
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/csfact_test_") + name;
}

}  // namespace

TEST_CASE("cdf97 filter DC gains") {
  const Cdf97Filters f = cdf97_filters();
  const double lp_sum =
      std::accumulate(f.analysis_lowpass.begin(), f.analysis_lowpass.end(), 0.0);
  CHECK(std::abs(lp_sum - std::sqrt(2.0)) <= 1e-10);
  const double sp_sum = std::accumulate(f.synthesis_lowpass.begin(),
                                        f.synthesis_lowpass.end(), 0.0);
  CHECK(std::abs(sp_sum - std::sqrt(2.0)) <= 1e-10);
  // highpass branches kill DC
  const double hp_sum = std::accumulate(f.analysis_highpass.begin(),
                                        f.analysis_highpass.end(), 0.0);
  CHECK(std::abs(hp_sum) <= 1e-10);
}

TEST_CASE("cdf97 perfect reconstruction") {
  CHECK(roundtrip_error(random_signal(64, 123)) <= 1e-10);

  std::vector<double> impulse(32, 0.0);
  impulse[0] = 1.0;
  CHECK(roundtrip_error(impulse) <= 1e-10);

  for (int len : {16, 64, 128})
    for (std::uint64_t seed = 0; seed < 34; ++seed)
      CHECK(roundtrip_error(random_signal(len, seed * 3 + len)) <= 1e-10);
}

TEST_CASE("wavelet_dictionary paper shape") {
  WaveletSpec spec;  // 128 x 1024, 5 levels
  spec.seed = 9;
  Matrix d = wavelet_dictionary(spec);
  CHECK(d.rows() == 128);
  CHECK(d.cols() == 1024);
  for (Eigen::Index j = 0; j < d.cols(); ++j)
    CHECK(std::abs(d.col(j).norm() - 1.0) <= 1e-12);
  CHECK(rank(d, default_rank_tol(128, 1024)) == 128);
}

TEST_CASE("wavelet_dictionary circular shift structure") {
  WaveletSpec spec;
  spec.signal_len = 8;
  spec.total_cols = 16;
  spec.levels = 1;
  spec.seed = 1;
  Matrix d = wavelet_dictionary(spec);
  for (int c = 0; c + 1 < 8; ++c)
    for (int i = 0; i < 8; ++i)
      CHECK(d((i + 1) % 8, c + 1) == d(i, c));

  CHECK_THROWS_AS(wavelet_dictionary(WaveletSpec{10, 40, 1, 0}),
                  ParameterError);
  CHECK_THROWS_AS(wavelet_dictionary(WaveletSpec{8, 16, 4, 0}),
                  ParameterError);
}

TEST_CASE("frame_diagnostics cases") {
  // rows of an orthonormal matrix, scaled: tight frame
  Matrix g = seeded_matrix(10, 10, 5);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr((Eigen::MatrixXd(g)));
  Matrix q = Matrix(qr.householderQ() * Eigen::MatrixXd::Identity(10, 10));
  Matrix d = 0.7 * q.topRows(4);
  CHECK(frame_diagnostics(d).tight_frame_err <= 1e-10);

  // identity padded with zero columns: zero columns show in the norm dev
  Matrix padded = Matrix::Zero(4, 6);
  padded.leftCols(4) = Matrix::Identity(4, 4);
  CHECK(frame_diagnostics(padded).column_norm_max_dev == doctest::Approx(1.0));

  // wavelet dictionary: diagnostic only, must be finite
  WaveletSpec spec;
  spec.seed = 2;
  FrameDiagnostics diag = frame_diagnostics(wavelet_dictionary(spec));
  CHECK(std::isfinite(diag.tight_frame_err));
  CHECK(diag.rank == 128);

  // invariance under column permutation
  Matrix m = seeded_matrix(5, 9, 44);
  Matrix perm = m;
  perm.col(0).swap(perm.col(8));
  perm.col(2).swap(perm.col(5));
  CHECK(std::abs(frame_diagnostics(m).tight_frame_err -
                 frame_diagnostics(perm).tight_frame_err) <= 1e-12);
}

TEST_CASE("csmx round trip is bit exact") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int rows = 1 + static_cast<int>(seed % 9);
    const int cols = 1 + static_cast<int>((seed * 7) % 13);
    Matrix m = seeded_matrix(rows, cols, seed + 1000);
    if (seed % 5 == 0 && rows > 1) m.row(rows - 1).setZero();  // rank deficient
    const std::string path = temp_path("roundtrip.csmx");
    write_matrix(path, m);
    Matrix back = read_matrix(path);
    REQUIRE(back.rows() == m.rows());
    REQUIRE(back.cols() == m.cols());
    CHECK(std::memcmp(back.data(), m.data(), 8 * m.size()) == 0);
  }
}

TEST_CASE("csmx rejects corruption") {
  const std::string path = temp_path("corrupt.csmx");
  Matrix m = seeded_matrix(7, 13, 77);
  write_matrix(path, m);

  // truncation
  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    std::ofstream out(path + ".trunc", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(read_matrix(path + ".trunc"), FormatError);

  // bad magic
  {
    std::ofstream out(path + ".magic", std::ios::binary);
    out << "XXXX garbage that is long enough to pass the header length check";
  }
  CHECK_THROWS_AS(read_matrix(path + ".magic"), FormatError);

  CHECK_THROWS_AS(read_matrix("/nonexistent/no.csmx"), IoError);
}

TEST_CASE("csv import/export") {
  const std::string path = temp_path("import.csv");
  {
    std::ofstream out(path);
    out << "1,2\n3,4\n";
  }
  Matrix m = read_matrix_csv(path);
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 2);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 1) == 4.0);

  // round-trip-safe formatting
  Matrix r = seeded_matrix(4, 3, 55);
  write_matrix_csv(path, r);
  CHECK(read_matrix_csv(path) == r);

  {
    std::ofstream out(path);
    out << "1,2\n3\n";
  }
  CHECK_THROWS_AS(read_matrix_csv(path), FormatError);
}
