#ifndef CSFACT_COSAMP_HPP
#define CSFACT_COSAMP_HPP

#include "csfact/matrix.hpp"

namespace csfact {

struct RecoveryProblem {
  Matrix phi;            // m x n measurement operator
  Vector z;              // m measurements
  int k = 0;             // sparsity level
  int max_iter = 50;
  double halt_tol = 1e-6;
  // the least-squares steps are determined when 3k <= m; set this to run
  // outside that regime anyway (minimum-norm fallback then kicks in)
  bool allow_underdetermined = false;
};

struct RecoveryResult {
  Vector x_hat;              // at most k nonzeros
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  bool min_norm_fallback = false;  // some least-squares step was rank deficient
};

RecoveryResult cosamp(const RecoveryProblem& p);

// True iff ||x_hat - x||_1 < n * 1e-2 (strict).
bool recovery_success(const Vector& x_hat, const Vector& x);

}  // namespace csfact

#endif
