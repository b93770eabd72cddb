#include "csfact/factorize.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include "csfact/matcore.hpp"
#include "csfact/rng.hpp"

namespace csfact {

namespace {

void check_pair_shape(const Matrix& d, const Matrix& a) {
  if (d.rows() != a.rows() || d.cols() != a.cols())
    throw DimensionError("factorize: D and A must have the same shape");
  if (d.rows() > d.cols())
    throw DimensionError("factorize: need l <= n");
}

int equal_rank_or_throw(const Matrix& d, const Matrix& a, double tol) {
  const int rd = rank(d, tol);
  const int ra = rank(a, tol);
  if (rd != ra) throw RankMismatchError(rd, ra);
  return rd;
}

// Orthonormal rotation of the null-space completion; identity when seed = 0.
Matrix completion_rotation(int dim, std::uint64_t seed) {
  if (seed == 0 || dim == 0) return Matrix::Identity(dim, dim);
  return random_orthonormal(dim, seed);
}

Eigen::VectorXd singular_values(const Matrix& m) {
  return Eigen::BDCSVD<Eigen::MatrixXd>(Eigen::MatrixXd(m)).singularValues();
}

void enforce_invariants(const Factorization& f, const Matrix& d,
                        const char* where) {
  const double resid = rel_frobenius(f.g * f.a * f.h, d);
  if (resid > 1e-8)
    throw NumericalError(std::string(where) + ": factorization residual " +
                         std::to_string(resid) + " exceeds 1e-8");
  const Eigen::Index n = f.h.rows();
  const double horth =
      max_abs(f.h * f.h.transpose() - Matrix::Identity(n, n));
  if (horth > 1e-8)
    throw NumericalError(std::string(where) + ": H orthonormality error " +
                         std::to_string(horth));
  const auto sv = singular_values(f.g);
  if (sv(sv.size() - 1) <= f.tol * sv(0))
    throw SingularityError(std::string(where) + ": G singular at tolerance");
}

}  // namespace

const char* to_string(FactorMethod m) {
  switch (m) {
    case FactorMethod::spectral: return "spectral";
    case FactorMethod::tight_frame: return "tight_frame";
    case FactorMethod::gram_schmidt: return "gram_schmidt";
  }
  return "?";
}

Factorization factor_spectral(const Matrix& d, const Matrix& a, double tol,
                              std::uint64_t completion_seed) {
  check_pair_shape(d, a);
  if (tol <= 0) throw ParameterError("factor_spectral: tol must be > 0");
  const int l = static_cast<int>(d.rows());
  const int n = static_cast<int>(d.cols());
  const int k = equal_rank_or_throw(d, a, tol);

  SpectralDecomposition ea = sym_eig(a * a.transpose());
  SpectralDecomposition ed = sym_eig(d * d.transpose());

  // Sigma_S: sqrt(sigma_A / sigma_D) on the leading k diagonal entries,
  // 1 beyond the rank so W stays invertible and well conditioned.
  Vector sigma_s = Vector::Ones(l);
  const double cutoff_a = tol * tol * std::max(ea.lambda(0), 0.0);
  const double cutoff_d = tol * tol * std::max(ed.lambda(0), 0.0);
  for (int i = 0; i < k; ++i) {
    if (ed.lambda(i) <= cutoff_d) {
      if (ea.lambda(i) > cutoff_a)
        throw NumericalError(
            "factor_spectral: numerical rank inconsistency at index " +
            std::to_string(i));
      continue;
    }
    sigma_s(i) = std::sqrt(ea.lambda(i) / ed.lambda(i));
  }

  Matrix w = ea.q * sigma_s.asDiagonal() * ed.q.transpose();
  Matrix g = ed.q * sigma_s.cwiseInverse().asDiagonal() * ea.q.transpose();

  Matrix na = nullspace_basis(a, tol);
  Matrix nd = nullspace_basis(d, tol);
  Matrix rot = completion_rotation(n - k, completion_seed);
  Matrix h = pinv(a, tol) * w * d + na * rot * nd.transpose();

  Factorization f{g, a, h, FactorMethod::spectral, k, tol, 1.0};
  enforce_invariants(f, d, "factor_spectral");
  return f;
}

Factorization factor_tight_frame(const Matrix& d, const Matrix& a,
                                 const std::optional<Matrix>& o, double tol,
                                 std::uint64_t completion_seed) {
  check_pair_shape(d, a);
  if (tol <= 0) throw ParameterError("factor_tight_frame: tol must be > 0");
  const int l = static_cast<int>(d.rows());
  const int n = static_cast<int>(d.cols());
  const int kd = rank(d, tol);
  const int ka = rank(a, tol);
  if (ka != kd) throw RankMismatchError(kd, ka);

  Matrix omat = o.value_or(Matrix::Identity(l, l));
  if (omat.rows() != l || omat.cols() != l)
    throw DimensionError("factor_tight_frame: O must be l x l");
  if (max_abs(omat * omat.transpose() - Matrix::Identity(l, l)) > 1e-8)
    throw ParameterError("factor_tight_frame: O is not orthonormal");

  // Tight-frame test: D D^T must be a multiple of the identity (full rank)
  // or, in the rank-deficient pseudo-inverse variant, a multiple of the
  // orthogonal projector onto the range of D.
  Matrix ddt = d * d.transpose();
  const double cstar = ddt.trace() / std::max(kd, 1);
  Matrix target;
  if (kd == l) {
    target = Matrix::Identity(l, l);
  } else {
    Matrix b = orthonormal_range_basis(d, tol);
    target = b * b.transpose();
  }
  const double dev = max_abs(ddt / cstar - target);
  if (dev > 1e-6)
    throw NotTightFrameError(
        "factor_tight_frame: ||D D^T / c - P||_max = " + std::to_string(dev));
  const double scale = std::sqrt(cstar);
  Matrix dsc = d / scale;

  Matrix g0;
  if (ka == l) {
    g0 = inv_sqrt_spd(a * a.transpose(), tol * tol);
  } else {
    // pseudo-inverse variant: invert on the rank-k subspace, identity on its
    // orthogonal complement so G stays invertible
    SpectralDecomposition ea = sym_eig(a * a.transpose());
    Vector diag = Vector::Ones(l);
    for (int i = 0; i < ka; ++i) diag(i) = 1.0 / std::sqrt(ea.lambda(i));
    g0 = ea.q * diag.asDiagonal() * ea.q.transpose();
  }

  Matrix gd = omat * g0;  // the G of the rescaled dictionary
  Matrix na = nullspace_basis(a, tol);
  Matrix nd = nullspace_basis(d, tol);
  Matrix rot = completion_rotation(n - kd, completion_seed);
  Matrix h = a.transpose() * gd.transpose() * dsc + na * rot * nd.transpose();

  Factorization f{Matrix(scale * gd), a, h, FactorMethod::tight_frame, kd, tol,
                  scale};
  if (ka < l) {
    // the variant only works when the ranges of A and D line up; surface
    // that as a singularity instead of returning a bad factorization
    if (rel_frobenius(f.g * f.a * f.h, d) > 1e-8)
      throw SingularityError(
          "factor_tight_frame: A A^T singular and pseudo-inverse fallback "
          "does not reproduce D (ranges of A and D differ)");
  }
  enforce_invariants(f, d, "factor_tight_frame");
  return f;
}

Factorization factor_gram_schmidt(const Matrix& d, const Matrix& a, double tol,
                                  std::uint64_t completion_seed) {
  check_pair_shape(d, a);
  if (tol <= 0) throw ParameterError("factor_gram_schmidt: tol must be > 0");
  const int l = static_cast<int>(d.rows());
  const int n = static_cast<int>(d.cols());
  const int k = equal_rank_or_throw(d, a, tol);

  Matrix u = orthonormal_range_basis(a.transpose(), tol);   // n x k
  Matrix v = orthonormal_range_basis(d.transpose(), tol);   // n x k
  Matrix u_perp = nullspace_basis(a, tol);                  // n x (n-k)
  Matrix v_perp = nullspace_basis(d, tol);

  Matrix rot = completion_rotation(n - k, completion_seed);
  Matrix h = u * v.transpose() + u_perp * rot * v_perp.transpose();

  Matrix au = a * u;  // l x k, rank k
  Matrix dv = d * v;

  // Extend to invertible square matrices by appending an orthonormal basis
  // of the orthogonal column-space complement, scaled to the mean nonzero
  // singular value so the extension stays moderately conditioned.
  auto extend = [&](const Matrix& m) -> Matrix {
    if (k == l) return m;
    Matrix range = orthonormal_range_basis(m, tol);
    Matrix comp = nullspace_basis(Matrix(range.transpose()), tol);
    const auto sv = singular_values(m);
    double mean_sv = 0.0;
    for (int i = 0; i < k; ++i) mean_sv += sv(i);
    mean_sv /= std::max(k, 1);
    Matrix ext(l, l);
    ext.leftCols(k) = m;
    ext.rightCols(l - k) = mean_sv * comp;
    return ext;
  };

  Matrix au_hat = extend(au);
  Matrix dv_hat = extend(dv);
  if (rank(au_hat, tol) < l || rank(dv_hat, tol) < l)
    throw NumericalError(
        "factor_gram_schmidt: invertible extension degenerate at tolerance");

  // G = DV-hat * (AU-hat)^{-1}
  Eigen::PartialPivLU<Eigen::MatrixXd> lu{
      Eigen::MatrixXd(Eigen::MatrixXd(au_hat).transpose())};
  Matrix g = lu.solve(Eigen::MatrixXd(dv_hat).transpose()).transpose();

  Factorization f{g, a, h, FactorMethod::gram_schmidt, k, tol, 1.0};
  enforce_invariants(f, d, "factor_gram_schmidt");
  return f;
}

ValidationReport validate(const Factorization& f, const Matrix& d) {
  if (f.g.cols() != f.a.rows() || f.a.cols() != f.h.rows())
    throw DimensionError("validate: inconsistent factor shapes");
  if (d.rows() != f.g.rows() || d.cols() != f.h.cols())
    throw DimensionError("validate: D shape does not match factors");
  ValidationReport r;
  r.residual_rel = rel_frobenius(f.g * f.a * f.h, d);
  const Eigen::Index n = f.h.rows();
  r.h_orthonormality_err =
      max_abs(f.h * f.h.transpose() - Matrix::Identity(n, n));
  const auto sv = singular_values(f.g);
  r.g_condition_number =
      sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                            : std::numeric_limits<double>::infinity();
  const double tol = f.tol > 0 ? f.tol : default_rank_tol(
      static_cast<int>(d.rows()), static_cast<int>(d.cols()));
  r.rank_d = rank(d, tol);
  r.rank_a = rank(f.a, tol);
  return r;
}

Matrix sensing_matrix(const Factorization& f, const RowSelector& e) {
  if (e.l != f.g.rows())
    throw DimensionError("sensing_matrix: selector length does not match G");
  const auto sv = singular_values(f.g);
  const double tol = f.tol > 0 ? f.tol : 1e-12;
  if (sv(sv.size() - 1) <= tol * sv(0))
    throw SingularityError("sensing_matrix: G singular at tolerance");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(f.g)};
  Matrix ginv = lu.inverse();
  return apply_selector(e, ginv);
}

}  // namespace csfact
