#ifndef CSFACT_ENSEMBLES_HPP
#define CSFACT_ENSEMBLES_HPP

#include <cstdint>
#include <vector>

#include "csfact/matrix.hpp"

namespace csfact {

enum class EnsembleKind { gaussian, bernoulli };

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::gaussian;
  int rows = 0;  // l
  int cols = 0;  // n
  std::uint64_t seed = 0;
};

// The row-selection operator: m distinct rows out of l, in draw order.
struct RowSelector {
  int m = 0;
  int l = 0;
  std::vector<int> indices;
};

struct SparseVector {
  int n = 0;
  std::vector<int> support;     // ascending, |support| = k
  std::vector<double> values;   // nonzero, aligned with support

  Vector dense() const {
    Vector x = Vector::Zero(n);
    for (std::size_t i = 0; i < support.size(); ++i)
      x(support[i]) = values[i];
    return x;
  }
};

// i.i.d. N(0, 1/n) entries, deterministic under spec.seed.
Matrix gaussian_matrix(const EnsembleSpec& spec);

// i.i.d. +-1/sqrt(n) entries with equal probability.
Matrix bernoulli_matrix(const EnsembleSpec& spec);

Matrix random_matrix(const EnsembleSpec& spec);

// Uniform m-subset of [0, l) via partial Fisher-Yates.
RowSelector row_selector(int m, int l, std::uint64_t seed);

Matrix apply_selector(const RowSelector& e, const Matrix& m);

// Support: uniform k-subset of [0, n); values: uniform on [-1, 1] with exact
// zeros resampled so ||x||_0 = k exactly.
SparseVector sparse_vector(int n, int k, std::uint64_t seed);

// Random orthonormal q x q matrix (QR of a seeded Gaussian matrix).
Matrix random_orthonormal(int q, std::uint64_t seed);

}  // namespace csfact

#endif
