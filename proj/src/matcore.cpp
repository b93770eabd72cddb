#include "csfact/matcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace csfact {

namespace {

// Full SVD helper; BDCSVD handles the 128x1024 shapes quickly and falls back
// to Jacobi internally for small inputs.
Eigen::BDCSVD<Eigen::MatrixXd> svd_of(const Matrix& m, unsigned options) {
  Eigen::MatrixXd mc = m;  // column-major copy for the decomposition
  return Eigen::BDCSVD<Eigen::MatrixXd>(mc, options);
}

void fix_column_signs(Matrix& q) {
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    Eigen::Index imax = 0;
    q.col(j).cwiseAbs().maxCoeff(&imax);
    if (q(imax, j) < 0) q.col(j) = -q.col(j);
  }
}

}  // namespace

SpectralDecomposition sym_eig(const Matrix& s) {
  if (s.rows() != s.cols())
    throw DimensionError("sym_eig: matrix is not square");
  require_finite(s, "sym_eig");
  const double asym = (s - s.transpose()).norm();
  if (asym > 1e-12 * std::max(1.0, s.norm()))
    throw DimensionError("sym_eig: input not symmetric within tolerance");
  Eigen::MatrixXd sym = 0.5 * (s + s.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success)
    throw NumericalError("sym_eig: eigensolver failed to converge");

  // Eigen returns ascending order; flip to descending.
  const Eigen::Index n = sym.rows();
  SpectralDecomposition out;
  out.q.resize(n, n);
  out.lambda.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.lambda(j) = es.eigenvalues()(n - 1 - j);
    out.q.col(j) = es.eigenvectors().col(n - 1 - j);
  }
  fix_column_signs(out.q);

  const double resid =
      (out.q * out.lambda.asDiagonal() * out.q.transpose() - sym).norm() /
      std::max(1.0, sym.norm());
  if (resid > 1e-10)
    throw NumericalError("sym_eig: reconstruction residual " +
                         std::to_string(resid));
  return out;
}

Matrix orthonormal_range_basis(const Matrix& m, double tol) {
  if (tol <= 0) throw ParameterError("orthonormal_range_basis: tol must be > 0");
  require_finite(m, "orthonormal_range_basis");
  auto svd = svd_of(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  int k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * smax && sv(i) > 0) ++k;
  Matrix b = svd.matrixU().leftCols(k);
  fix_column_signs(b);
  return b;
}

Matrix nullspace_basis(const Matrix& m, double tol) {
  if (tol <= 0) throw ParameterError("nullspace_basis: tol must be > 0");
  require_finite(m, "nullspace_basis");
  auto svd = svd_of(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  int k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * smax && sv(i) > 0) ++k;
  Matrix n = svd.matrixV().rightCols(m.cols() - k);
  fix_column_signs(n);
  return n;
}

Matrix pinv(const Matrix& m, double tol) {
  if (tol <= 0) throw ParameterError("pinv: tol must be > 0");
  require_finite(m, "pinv");
  if (m.size() == 0 || m.norm() == 0.0)
    return Matrix::Zero(m.cols(), m.rows());
  auto svd = svd_of(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = tol * sv(0);
  Vector inv_sv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Matrix inv_sqrt_spd(const Matrix& s, double tol) {
  SpectralDecomposition eig = sym_eig(s);
  Vector inv_sqrt(eig.lambda.size());
  for (Eigen::Index i = 0; i < eig.lambda.size(); ++i) {
    if (eig.lambda(i) <= tol)
      throw SingularityError("inv_sqrt_spd: eigenvalue " +
                             std::to_string(eig.lambda(i)) +
                             " not positive at tolerance");
    inv_sqrt(i) = 1.0 / std::sqrt(eig.lambda(i));
  }
  return eig.q * inv_sqrt.asDiagonal() * eig.q.transpose();
}

int rank(const Matrix& m, double tol) {
  if (tol <= 0) throw ParameterError("rank: tol must be > 0");
  require_finite(m, "rank");
  if (m.size() == 0) return 0;
  auto svd = svd_of(m, 0);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (smax == 0.0) return 0;
  int k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * smax) ++k;
  return k;
}

LeastSquaresSolution solve_least_squares(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size())
    throw DimensionError("solve_least_squares: row count mismatch");
  require_finite(a, "solve_least_squares");
  require_finite(b, "solve_least_squares");
  LeastSquaresSolution sol;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(a)};
  if (qr.rank() < a.cols()) {
    sol.x = pinv(a, default_rank_tol(static_cast<int>(a.rows()),
                                     static_cast<int>(a.cols()))) *
            b;
    sol.min_norm_fallback = true;
  } else {
    sol.x = qr.solve(b);
  }
  require_finite(sol.x, "solve_least_squares result");
  return sol;
}

}  // namespace csfact
