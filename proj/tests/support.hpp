#pragma once

// Reference computations owned by the tests. They avoid the library's own
// solvers so that agreement means something.

#include "swibal/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double rel_err(const MatrixXd& X, const MatrixXd& Y) {
  return (X - Y).norm() / std::max(1e-300, Y.norm());
}

// Column-major vec(X) of the n^2 system
//   (I (x) A + A (x) I + sum D (x) D) vec X = -vec W,
// assembled entry by entry and solved by full-pivot LU.
inline MatrixXd kron_reference(const MatrixXd& A, const std::vector<MatrixXd>& D,
                               const MatrixXd& W) {
  const auto n = A.rows();
  MatrixXd K = MatrixXd::Zero(n * n, n * n);
  // Row (i, j) of A X + X A^T + sum D X D^T, with X_{kl} at column k + n l.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index l = 0; l < n; ++l) {
          double v = 0.0;
          if (l == j) v += A(i, k);
          if (k == i) v += A(j, l);
          for (const auto& Dm : D) v += Dm(i, k) * Dm(j, l);
          K(i + n * j, k + n * l) = v;
        }
  const VectorXd w = Eigen::Map<const VectorXd>(W.data(), n * n);
  const VectorXd x = K.fullPivLu().solve(-w);
  return Eigen::Map<const MatrixXd>(x.data(), n, n);
}

// Cosines of principal angles from the SVD of U^T V (both orthonormal).
inline double principal_angle_by_cosines(const MatrixXd& U, const MatrixXd& V) {
  if (U.cols() != V.cols()) return M_PI / 2;
  if (U.cols() == 0) return 0.0;
  const VectorXd c = (U.transpose() * V).jacobiSvd().singularValues();
  return std::acos(std::min(1.0, c.minCoeff()));
}

inline int numeric_rank(const MatrixXd& M, double rtol = 1e-10) {
  if (M.size() == 0) return 0;
  const VectorXd s = M.jacobiSvd().singularValues();
  int r = 0;
  while (r < s.size() && s(r) > rtol * s(0)) ++r;
  return r;
}

// [B, A B, ..., A^{n-1} B]
inline MatrixXd krylov_matrix(const MatrixXd& A, const MatrixXd& B) {
  const auto n = A.rows();
  MatrixXd K(n, n * B.cols());
  MatrixXd blk = B;
  for (Eigen::Index k = 0; k < n; ++k) {
    K.middleCols(k * B.cols(), B.cols()) = blk;
    blk = A * blk;
  }
  return K;
}

inline MatrixXd stable_matrix(std::mt19937_64& rng, int n, double shift = 0.5) {
  std::normal_distribution<double> g;
  MatrixXd G(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) G(i, j) = g(rng);
  const double rho = G.eigenvalues().cwiseAbs().maxCoeff();
  return 0.5 * (G - G.transpose()) - (shift + rho) * MatrixXd::Identity(n, n);
}

inline MatrixXd gaussian(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> g;
  MatrixXd G(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) G(i, j) = g(rng);
  return G;
}

inline MatrixXd unit_vector(int n, int k) {
  MatrixXd e = MatrixXd::Zero(n, 1);
  e(k, 0) = 1.0;
  return e;
}

// A_j = A_1 - delta_j I + eps G_j with eps small against delta_j. The coupling
// terms D_j are then dissipative for any positive definite Q, so the per-mode
// inequalities hold strictly for both Gramians.
inline swibal::LssModel dissipative_coupling_model(std::mt19937_64& rng, int n, int modes,
                                                   int m, int p) {
  std::uniform_real_distribution<double> u(0.1, 0.3);
  const MatrixXd A1 = stable_matrix(rng, n);
  const double alpha = -A1.eigenvalues().real().maxCoeff();
  std::vector<swibal::Mode> ms;
  for (int j = 0; j < modes; ++j) {
    MatrixXd A = A1;
    if (j > 0) {
      const double delta = u(rng) * alpha;
      const MatrixXd G = gaussian(rng, n, n);
      A += -delta * MatrixXd::Identity(n, n) +
           0.05 * delta * G / G.jacobiSvd().singularValues()(0);
    }
    ms.push_back({A, gaussian(rng, n, m), gaussian(rng, p, n)});
  }
  return swibal::LssModel::from_modes(std::move(ms));
}

}  // namespace testing
