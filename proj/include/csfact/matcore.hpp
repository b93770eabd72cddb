#ifndef CSFACT_MATCORE_HPP
#define CSFACT_MATCORE_HPP

#include "csfact/matrix.hpp"

namespace csfact {

// Eigen-decomposition of a symmetric matrix, eigenvalues sorted
// non-increasing, eigenvector signs fixed (largest-magnitude entry of each
// column is positive) so repeated runs are deterministic.
struct SpectralDecomposition {
  Matrix q;       // orthonormal eigenvectors, one per column
  Vector lambda;  // eigenvalues, descending
};

struct LeastSquaresSolution {
  Vector x;
  bool min_norm_fallback = false;  // set when the system was rank deficient
};

// Default relative rank cutoff; multiplied by the largest singular value.
inline double default_rank_tol(int rows, int cols) {
  return 1e-10 * static_cast<double>(std::max(rows, cols));
}

SpectralDecomposition sym_eig(const Matrix& s);

// Orthonormal basis of the column space of m (k = numerical rank columns).
// Pass the transpose for a row-space basis.
Matrix orthonormal_range_basis(const Matrix& m, double tol);

// Orthonormal basis N of the null space of m: m * N = 0, N^T N = I.
Matrix nullspace_basis(const Matrix& m, double tol);

// Moore-Penrose pseudo-inverse.
Matrix pinv(const Matrix& m, double tol);

// R with R * s * R = I for symmetric positive-definite s.
Matrix inv_sqrt_spd(const Matrix& s, double tol = 1e-12);

// Numerical rank: singular values above tol * sigma_max.
int rank(const Matrix& m, double tol);

// Minimizer of ||a x - b||_2; falls back to the minimum-norm solution and
// flags it when a is rank deficient.
LeastSquaresSolution solve_least_squares(const Matrix& a, const Vector& b);

}  // namespace csfact

#endif
