#include "csfact/cosamp.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "csfact/matcore.hpp"

namespace csfact {

namespace {

// Indices of the `count` largest-magnitude entries; ties broken toward the
// lowest index so results are identical across platforms.
std::vector<int> top_magnitude(const Vector& v, int count) {
  std::vector<int> idx(v.size());
  for (int i = 0; i < v.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ma = std::abs(v(a)), mb = std::abs(v(b));
    if (ma != mb) return ma > mb;
    return a < b;
  });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(count)));
  return idx;
}

}  // namespace

RecoveryResult cosamp(const RecoveryProblem& p) {
  const int m = static_cast<int>(p.phi.rows());
  const int n = static_cast<int>(p.phi.cols());
  if (p.z.size() != m)
    throw DimensionError("cosamp: measurement length does not match operator");
  if (p.k < 1 || p.k > n) throw ParameterError("cosamp: need 1 <= k <= n");
  if (m > n) throw DimensionError("cosamp: need m <= n");
  if (3 * p.k > m && !p.allow_underdetermined)
    throw ParameterError(
        "cosamp: 3k > m; pass allow_underdetermined to run anyway");
  for (int j = 0; j < n; ++j)
    if (p.phi.col(j).norm() == 0.0)
      throw ParameterError("cosamp: operator column " + std::to_string(j) +
                           " is identically zero");
  require_finite(p.phi, "cosamp operator");
  require_finite(p.z, "cosamp measurements");

  RecoveryResult best;
  best.x_hat = Vector::Zero(n);
  const double znorm = p.z.norm();
  best.final_residual = znorm;
  if (znorm == 0.0) {
    best.converged = true;
    return best;
  }

  Vector x = Vector::Zero(n);
  Vector r = p.z;
  std::vector<int> support;  // current support, ascending
  double prev_residual = znorm;

  for (int iter = 1; iter <= p.max_iter; ++iter) {
    // support identification: 2k largest proxy entries merged with current
    Vector proxy = p.phi.transpose() * r;
    std::vector<int> omega = top_magnitude(proxy, 2 * p.k);
    std::set<int> merged(omega.begin(), omega.end());
    merged.insert(support.begin(), support.end());
    const std::vector<int> t(merged.begin(), merged.end());

    Matrix phi_t(m, t.size());
    for (std::size_t j = 0; j < t.size(); ++j) phi_t.col(j) = p.phi.col(t[j]);
    LeastSquaresSolution ls = solve_least_squares(phi_t, p.z);
    if (ls.min_norm_fallback) best.min_norm_fallback = true;

    // prune to the k largest entries
    Vector b = Vector::Zero(n);
    for (std::size_t j = 0; j < t.size(); ++j) b(t[j]) = ls.x(j);
    const std::vector<int> keep = top_magnitude(b, p.k);
    x = Vector::Zero(n);
    support.assign(keep.begin(), keep.end());
    std::sort(support.begin(), support.end());
    for (int i : support) x(i) = b(i);

    r = p.z - p.phi * x;
    const double rn = r.norm();
    if (rn < best.final_residual) {
      best.final_residual = rn;
      best.x_hat = x;
    }
    best.iterations = iter;
    if (rn <= p.halt_tol * znorm) {
      best.converged = true;
      break;
    }
    if (prev_residual - rn < 1e-7 * prev_residual) break;
    prev_residual = rn;
  }
  return best;
}

bool recovery_success(const Vector& x_hat, const Vector& x) {
  if (x_hat.size() != x.size())
    throw DimensionError("recovery_success: length mismatch");
  const double n = static_cast<double>(x.size());
  return (x_hat - x).lpNorm<1>() < n * 1e-2;
}

}  // namespace csfact
