#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "csfact/ensembles.hpp"
#include "csfact/rng.hpp"

using namespace csfact;

TEST_CASE("gaussian_matrix determinism and moments") {
  EnsembleSpec spec{EnsembleKind::gaussian, 128, 1024, 99};
  Matrix a = gaussian_matrix(spec);
  Matrix b = gaussian_matrix(spec);
  CHECK(a == b);

  const double n = 1024.0;
  const double mean = a.mean();
  const double var = (a.array() - mean).square().sum() / (a.size() - 1);
  CHECK(var >= 0.9 / n);
  CHECK(var <= 1.1 / n);

  EnsembleSpec small{EnsembleKind::gaussian, 64, 256, 5};
  Matrix c = gaussian_matrix(small);
  const double sigma = 1.0 / std::sqrt(256.0);
  CHECK(std::abs(c.mean()) <= 4.0 * sigma / std::sqrt(64.0 * 256.0));

  CHECK_THROWS_AS(gaussian_matrix(EnsembleSpec{EnsembleKind::gaussian, 0, 4, 1}),
                  DimensionError);
}

TEST_CASE("bernoulli_matrix entries and determinism") {
  EnsembleSpec spec{EnsembleKind::bernoulli, 128, 1024, 12};
  Matrix a = bernoulli_matrix(spec);
  CHECK(a == bernoulli_matrix(spec));

  const double v = 1.0 / std::sqrt(1024.0);
  int positives = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      CHECK(std::abs(a(i, j)) == v);
      positives += a(i, j) > 0;
    }
  const double frac = static_cast<double>(positives) / a.size();
  CHECK(frac >= 0.47);
  CHECK(frac <= 0.53);
}

TEST_CASE("row_selector") {
  RowSelector full = row_selector(5, 5, 3);
  std::set<int> s(full.indices.begin(), full.indices.end());
  CHECK(s.size() == 5);  // permutation of all rows

  CHECK(row_selector(2, 7, 4).indices == row_selector(2, 7, 4).indices);
  CHECK_THROWS_AS(row_selector(3, 2, 0), ParameterError);

  int first_row = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed)
    first_row += row_selector(1, 2, seed).indices[0] == 0;
  const double freq = first_row / 10000.0;
  CHECK(freq >= 0.47);
  CHECK(freq <= 0.53);
}

TEST_CASE("row_selector has no duplicates") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RowSelector e = row_selector(17, 40, seed);
    std::set<int> s(e.indices.begin(), e.indices.end());
    CHECK(s.size() == 17);
  }
}

TEST_CASE("apply_selector") {
  RowSelector id{3, 3, {0, 1, 2}};
  CHECK(apply_selector(id, Matrix::Identity(3, 3)) == Matrix::Identity(3, 3));

  Matrix m(3, 2);
  m << 1, 2, 3, 4, 5, 6;
  RowSelector perm{2, 3, {2, 0}};
  Matrix sel = apply_selector(perm, m);
  CHECK(sel(0, 0) == 5);
  CHECK(sel(1, 0) == 1);

  CHECK_THROWS_AS(apply_selector(perm, Matrix::Identity(4, 4)), DimensionError);

  // distributes over products
  EnsembleSpec gs{EnsembleKind::gaussian, 8, 8, 7};
  Matrix ginv = gaussian_matrix(gs);
  EnsembleSpec ds{EnsembleKind::gaussian, 8, 20, 8};
  Matrix d = gaussian_matrix(ds);
  RowSelector e = row_selector(4, 8, 9);
  CHECK((apply_selector(e, Matrix(ginv * d)) - apply_selector(e, ginv) * d)
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("sparse_vector") {
  SparseVector dense = sparse_vector(6, 6, 1);
  CHECK(dense.support.size() == 6);
  for (double v : dense.values) {
    CHECK(v != 0.0);
    CHECK(std::abs(v) <= 1.0);
  }

  SparseVector x = sparse_vector(1024, 10, 2);
  CHECK(x.support.size() == 10);
  std::set<int> s(x.support.begin(), x.support.end());
  CHECK(s.size() == 10);
  CHECK(x.dense().cwiseAbs().unaryExpr([](double v) { return v > 0 ? 1.0 : 0.0; }).sum() ==
        10.0);

  SparseVector y1 = sparse_vector(50, 5, 77);
  SparseVector y2 = sparse_vector(50, 5, 77);
  CHECK(y1.support == y2.support);
  CHECK(y1.values == y2.values);

  CHECK_THROWS_AS(sparse_vector(4, 5, 0), ParameterError);
}

TEST_CASE("ensemble energy scaling E||Ax||^2 ~ (l/n) ||x||^2") {
  for (EnsembleKind kind : {EnsembleKind::gaussian, EnsembleKind::bernoulli}) {
    EnsembleSpec spec{kind, 128, 1024, 31};
    Matrix a = random_matrix(spec);
    double sum = 0.0;
    const int vectors = 1000;
    for (int v = 0; v < vectors; ++v) {
      Rng rng(derive_seed(1000, v, 7));
      Vector x(1024);
      for (int i = 0; i < 1024; ++i) x(i) = rng.next_normal();
      x /= x.norm();
      sum += (a * x).squaredNorm();
    }
    const double mean = sum / vectors;
    const double expected = 128.0 / 1024.0;
    CHECK(mean >= 0.9 * expected);
    CHECK(mean <= 1.1 * expected);
  }
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
  CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
  CHECK(derive_seed(5, 3, 9) == derive_seed(5, 3, 9));
}

TEST_CASE("random_orthonormal is orthonormal and seeded") {
  Matrix q = random_orthonormal(12, 4);
  CHECK(max_abs(q * q.transpose() - Matrix::Identity(12, 12)) <= 1e-12);
  CHECK(q == random_orthonormal(12, 4));
  CHECK(max_abs(q - random_orthonormal(12, 5)) > 1e-3);
}
