#ifndef CSFACT_MATRIX_HPP
#define CSFACT_MATRIX_HPP

#include <Eigen/Dense>

#include "csfact/errors.hpp"

namespace csfact {

// Universal dense carrier: real, double precision, row-major storage.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite())
    throw NumericalError(std::string(what) + ": non-finite entries");
}

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite())
    throw NumericalError(std::string(what) + ": non-finite entries");
}

// ||a - b||_F / max(1, ||b||_F)
inline double rel_frobenius(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace csfact

#endif
