#include "csfact/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>

#include "csfact/rng.hpp"

namespace csfact {

namespace {

void check_dims(const EnsembleSpec& spec) {
  if (spec.rows <= 0 || spec.cols <= 0)
    throw DimensionError("ensemble: rows and cols must be positive");
}

}  // namespace

Matrix gaussian_matrix(const EnsembleSpec& spec) {
  if (spec.kind != EnsembleKind::gaussian)
    throw ParameterError("gaussian_matrix: spec.kind is not gaussian");
  check_dims(spec);
  Rng rng(spec.seed);
  const double sigma = 1.0 / std::sqrt(static_cast<double>(spec.cols));
  Matrix a(spec.rows, spec.cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      a(i, j) = sigma * rng.next_normal();
  return a;
}

Matrix bernoulli_matrix(const EnsembleSpec& spec) {
  if (spec.kind != EnsembleKind::bernoulli)
    throw ParameterError("bernoulli_matrix: spec.kind is not bernoulli");
  check_dims(spec);
  Rng rng(spec.seed);
  const double v = 1.0 / std::sqrt(static_cast<double>(spec.cols));
  Matrix a(spec.rows, spec.cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      a(i, j) = rng.next_bool() ? v : -v;
  return a;
}

Matrix random_matrix(const EnsembleSpec& spec) {
  return spec.kind == EnsembleKind::gaussian ? gaussian_matrix(spec)
                                             : bernoulli_matrix(spec);
}

RowSelector row_selector(int m, int l, std::uint64_t seed) {
  if (m < 1 || m > l)
    throw ParameterError("row_selector: need 1 <= m <= l");
  Rng rng(seed);
  std::vector<int> pool(l);
  std::iota(pool.begin(), pool.end(), 0);
  // partial Fisher-Yates: the first m slots end up a uniform m-subset
  for (int i = 0; i < m; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(l - i)));
    std::swap(pool[i], pool[j]);
  }
  RowSelector e;
  e.m = m;
  e.l = l;
  e.indices.assign(pool.begin(), pool.begin() + m);
  return e;
}

Matrix apply_selector(const RowSelector& e, const Matrix& m) {
  if (m.rows() != e.l)
    throw DimensionError("apply_selector: matrix has " +
                         std::to_string(m.rows()) + " rows, selector expects " +
                         std::to_string(e.l));
  Matrix out(e.m, m.cols());
  for (int i = 0; i < e.m; ++i) out.row(i) = m.row(e.indices[i]);
  return out;
}

SparseVector sparse_vector(int n, int k, std::uint64_t seed) {
  if (k < 1 || k > n)
    throw ParameterError("sparse_vector: need 1 <= k <= n");
  Rng rng(seed);
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  SparseVector x;
  x.n = n;
  x.support.assign(pool.begin(), pool.begin() + k);
  std::sort(x.support.begin(), x.support.end());
  x.values.resize(k);
  for (int i = 0; i < k; ++i) {
    double v = 0.0;
    do {
      v = rng.uniform(-1.0, 1.0);
    } while (v == 0.0);
    x.values[i] = v;
  }
  return x;
}

Matrix random_orthonormal(int q, std::uint64_t seed) {
  if (q <= 0) throw DimensionError("random_orthonormal: q must be positive");
  Rng rng(seed);
  Eigen::MatrixXd g(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) g(i, j) = rng.next_normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd qm = qr.householderQ() * Eigen::MatrixXd::Identity(q, q);
  // fix signs against the R diagonal so the distribution is Haar
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < q; ++j)
    if (r(j, j) < 0) qm.col(j) = -qm.col(j);
  return qm;
}

}  // namespace csfact
