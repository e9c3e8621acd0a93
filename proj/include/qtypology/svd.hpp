#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qtypology/error.hpp"
#include "qtypology/rng.hpp"

namespace qtypology {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SvdOptions {
  int oversample = 10;
  int max_iterations = 500;
  double tolerance = 1e-12;       // Ritz residual relative to the top singular value
  double drop_threshold = 1e-10;  // components below this fraction of S_max are dropped
};

struct SvdFactors {
  Eigen::MatrixXd U;  // rows x r
  Eigen::VectorXd S;  // r, strictly positive, non-increasing
  Eigen::MatrixXd V;  // cols x r
  int requested_rank = 0;
  bool rank_deficient = false;  // fewer than requested_rank components survived
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

// One-sided (Hestenes) Jacobi SVD of a small dense square matrix:
// M = U diag(s) V^T with s sorted non-increasing.
inline void jacobi_svd(const Eigen::MatrixXd& M, Eigen::MatrixXd& U, Eigen::VectorXd& s, Eigen::MatrixXd& V) {
  const Eigen::Index n = M.cols();
  Eigen::MatrixXd W = M;
  V = Eigen::MatrixXd::Identity(n, n);
  const double eps = 1e-15;
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = W.col(p).squaredNorm();
        const double beta = W.col(q).squaredNorm();
        const double gamma = W.col(p).dot(W.col(q));
        if (std::abs(gamma) <= eps * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = c * t;
        for (Eigen::Index i = 0; i < W.rows(); ++i) {
          const double wp = W(i, p), wq = W(i, q);
          W(i, p) = c * wp - sn * wq;
          W(i, q) = sn * wp + c * wq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double vp = V(i, p), vq = V(i, q);
          V(i, p) = c * vp - sn * vq;
          V(i, q) = sn * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  Eigen::VectorXd norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms(j) = W.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return norms(a) > norms(b); });
  U.resize(W.rows(), n);
  s.resize(n);
  Eigen::MatrixXd Vs(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = order[static_cast<std::size_t>(k)];
    s(k) = norms(j);
    U.col(k) = norms(j) > 0 ? Eigen::VectorXd(W.col(j) / norms(j)) : Eigen::VectorXd::Zero(W.rows());
    Vs.col(k) = V.col(j);
  }
  V = std::move(Vs);
}

inline Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& Y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(Y.rows(), Y.cols());
}

}  // namespace detail

// Rank-d truncated SVD by randomized block subspace iteration with a
// Rayleigh-Ritz step on the small projected matrix, iterated until the Ritz
// residuals of the leading d pairs fall below tolerance * S_max. Components
// with singular values under drop_threshold * S_max are removed, which sets
// rank_deficient when fewer than d remain. Each component's sign is fixed so
// the largest-magnitude entry of its U column is positive.
inline SvdFactors truncated_svd(const SparseRowMatrix& A, int d, std::uint64_t seed, const SvdOptions& opt = {}) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (d < 1) throw Error(ErrorKind::kValidation, "rank d must be >= 1");
  if (d > std::min(m, n))
    throw Error(ErrorKind::kValidation, "rank d=" + std::to_string(d) + " exceeds min(rows, cols)=" +
                                            std::to_string(std::min(m, n)));
  const Eigen::Index block = std::min<Eigen::Index>(std::min(m, n), d + std::max(opt.oversample, d));

  Rng rng(seed);
  Eigen::MatrixXd omega(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) omega(i, j) = rng.normal();

  Eigen::MatrixXd Q = detail::orthonormal_basis(A * omega);
  SvdFactors f;
  f.requested_rank = d;
  Eigen::MatrixXd U, V;
  Eigen::VectorXd s;
  for (int it = 1;; ++it) {
    // A^T Q = Z R  =>  Q^T A = R^T Z^T, so the SVD of R^T gives the Ritz pairs.
    Eigen::MatrixXd AtQ = A.transpose() * Q;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(AtQ);
    Eigen::MatrixXd Z = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
    Eigen::MatrixXd R = Z.transpose() * AtQ;
    Eigen::MatrixXd Ur, Vr;
    detail::jacobi_svd(R.transpose(), Ur, s, Vr);
    U = Q * Ur;
    V = Z * Vr;

    const double smax = s(0);
    double worst = 0.0;
    if (smax > 0) {
      Eigen::MatrixXd res = A * V.leftCols(d) - U.leftCols(d) * s.head(d).asDiagonal();
      for (Eigen::Index j = 0; j < d; ++j) worst = std::max(worst, res.col(j).norm() / smax);
    }
    f.iterations = it;
    f.residual = worst;
    if (worst <= opt.tolerance || block == std::min(m, n) || it >= opt.max_iterations) break;
    Q = detail::orthonormal_basis(A * Z);
  }

  int r = 0;
  const double smax = s.size() ? s(0) : 0.0;
  while (r < d && smax > 0 && s(r) >= opt.drop_threshold * smax) ++r;
  f.rank_deficient = r < d;
  f.S = s.head(r);
  f.U = U.leftCols(r);
  f.V = V.leftCols(r);
  for (int j = 0; j < r; ++j) {
    Eigen::Index arg = 0;
    f.U.col(j).cwiseAbs().maxCoeff(&arg);
    if (f.U(arg, j) < 0) {
      f.U.col(j) *= -1.0;
      f.V.col(j) *= -1.0;
    }
  }
  return f;
}

}  // namespace qtypology
