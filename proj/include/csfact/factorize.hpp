#ifndef CSFACT_FACTORIZE_HPP
#define CSFACT_FACTORIZE_HPP

#include <cstdint>
#include <optional>

#include "csfact/ensembles.hpp"
#include "csfact/matrix.hpp"

namespace csfact {

enum class FactorMethod { spectral, tight_frame, gram_schmidt };

const char* to_string(FactorMethod m);

// D = G * A * H with G invertible (l x l) and H orthonormal (n x n).
// `scale` records the uniform rescaling applied to a tight-frame input with
// D D^T = c I, c != 1; it is 1 everywhere else.
struct Factorization {
  Matrix g;
  Matrix a;
  Matrix h;
  FactorMethod method = FactorMethod::spectral;
  int rank = 0;
  double tol = 0.0;
  double scale = 1.0;
};

struct ValidationReport {
  double residual_rel = 0.0;        // ||d - GAH||_F / max(1, ||d||_F)
  double h_orthonormality_err = 0.0;  // ||H H^T - I||_max
  double g_condition_number = 0.0;
  int rank_d = 0;
  int rank_a = 0;
};

// Lemma-style construction from the spectral decompositions of A A^T and
// D D^T. Requires equal numerical rank. completion_seed != 0 rotates the
// null-space completion, giving a different but equally valid H.
Factorization factor_spectral(const Matrix& d, const Matrix& a, double tol,
                              std::uint64_t completion_seed = 0);

// Construction for tight frames (D D^T = c I): G = O (A A^T)^{-1/2} up to the
// recorded scale. O defaults to the identity; any orthonormal O is valid.
Factorization factor_tight_frame(const Matrix& d, const Matrix& a,
                                 const std::optional<Matrix>& o, double tol,
                                 std::uint64_t completion_seed = 0);

// Construction from orthonormal row-space bases of A and D, with the
// rectangular products D V and A U extended to invertible square matrices.
Factorization factor_gram_schmidt(const Matrix& d, const Matrix& a, double tol,
                                  std::uint64_t completion_seed = 0);

ValidationReport validate(const Factorization& f, const Matrix& d);

// S = selected rows of G^{-1}; satisfies S D = (selected rows of A H).
Matrix sensing_matrix(const Factorization& f, const RowSelector& e);

}  // namespace csfact

#endif
