#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "csfact/cosamp.hpp"
#include "csfact/ensembles.hpp"
#include "csfact/rng.hpp"

using namespace csfact;

namespace {

Matrix gaussian(int rows, int cols, std::uint64_t seed) {
  return gaussian_matrix(EnsembleSpec{EnsembleKind::gaussian, rows, cols, seed});
}

int nnz(const Vector& v) {
  int count = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) count += v(i) != 0.0;
  return count;
}

}  // namespace

TEST_CASE("cosamp zero measurements give zero") {
  RecoveryProblem p;
  p.phi = gaussian(20, 40, 1);
  p.z = Vector::Zero(20);
  p.k = 3;
  RecoveryResult r = cosamp(p);
  CHECK(r.x_hat.isZero());
  CHECK(r.converged);
  CHECK(r.iterations <= 1);
}

TEST_CASE("cosamp identity operator recovers in one pass") {
  SparseVector x = sparse_vector(12, 3, 9);
  RecoveryProblem p;
  p.phi = Matrix::Identity(12, 12);
  p.z = x.dense();
  p.k = 3;
  RecoveryResult r = cosamp(p);
  CHECK((r.x_hat - x.dense()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
}

TEST_CASE("cosamp parameter validation") {
  RecoveryProblem p;
  p.phi = gaussian(10, 40, 2);
  p.z = Vector::Ones(10);
  p.k = 4;  // 3k = 12 > m = 10
  CHECK_THROWS_AS(cosamp(p), ParameterError);
  p.allow_underdetermined = true;
  CHECK_NOTHROW(cosamp(p));

  RecoveryProblem bad;
  bad.phi = gaussian(10, 20, 3);
  bad.z = Vector::Ones(9);  // dimension mismatch
  bad.k = 2;
  CHECK_THROWS_AS(cosamp(bad), DimensionError);

  RecoveryProblem zerok;
  zerok.phi = gaussian(10, 20, 4);
  zerok.z = Vector::Ones(10);
  zerok.k = 0;
  CHECK_THROWS_AS(cosamp(zerok), ParameterError);
}

TEST_CASE("cosamp recovers planted sparse vectors at 64 x 256") {
  int hits = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    Matrix phi = gaussian(64, 256, derive_seed(777, t, 1));
    SparseVector x = sparse_vector(256, 5, derive_seed(777, t, 2));
    RecoveryProblem p;
    p.phi = phi;
    p.z = phi * x.dense();
    p.k = 5;
    RecoveryResult r = cosamp(p);
    hits += recovery_success(r.x_hat, x.dense());
  }
  // acceptance demands >= 0.99 at this size; keep a small margin here
  CHECK(static_cast<double>(hits) / trials >= 0.98);
}

TEST_CASE("cosamp output sparsity never exceeds k") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Matrix phi = gaussian(32, 64, derive_seed(42, seed, 1));
    RecoveryProblem p;
    p.phi = phi;
    p.z = gaussian(32, 1, derive_seed(42, seed, 2)).col(0);  // unstructured z
    p.k = 4;
    p.max_iter = 8;
    RecoveryResult r = cosamp(p);
    CHECK(nnz(r.x_hat) <= 4);
    CHECK(std::isfinite(r.final_residual));
  }
}

TEST_CASE("cosamp scale equivariance") {
  Matrix phi = gaussian(40, 100, 11);
  SparseVector x = sparse_vector(100, 6, 12);
  RecoveryProblem p;
  p.phi = phi;
  p.z = phi * x.dense();
  p.k = 6;
  Vector base = cosamp(p).x_hat;
  for (double c : {0.5, 2.0, 10.0}) {
    RecoveryProblem scaled = p;
    scaled.z = c * p.z;
    Vector xc = cosamp(scaled).x_hat;
    CHECK((xc - c * base).cwiseAbs().maxCoeff() <= 1e-8 * c);
  }
}

TEST_CASE("cosamp best iterate: more iterations never raise the residual") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Matrix phi = gaussian(24, 96, derive_seed(31, seed, 1));
    // noisy measurements of a slightly over-sparse signal so iteration matters
    SparseVector x = sparse_vector(96, 10, derive_seed(31, seed, 2));
    Vector noise = gaussian(24, 1, derive_seed(31, seed, 3)).col(0);
    RecoveryProblem p;
    p.phi = phi;
    p.z = phi * x.dense() + 0.05 * noise;
    p.k = 8;
    p.halt_tol = 0.0;
    p.max_iter = 5;
    const double short_res = cosamp(p).final_residual;
    p.max_iter = 50;
    const double long_res = cosamp(p).final_residual;
    CHECK(long_res <= short_res + 1e-12);
  }
}

TEST_CASE("recovery_success threshold is strict at n * 1e-2") {
  const int n = 256;
  Vector x = Vector::Zero(n);
  Vector off = Vector::Zero(n);
  off(0) = n * 1e-2;  // ||off - x||_1 == threshold exactly
  CHECK_FALSE(recovery_success(off, x));

  Vector close = Vector::Zero(n);
  close(3) = 2.0;  // ||close - x||_1 = 2.0 < 2.56
  CHECK(recovery_success(close, x));

  Vector far = Vector::Zero(n);
  far(3) = 2.6;
  CHECK_FALSE(recovery_success(far, x));

  CHECK(recovery_success(x, x));
}
