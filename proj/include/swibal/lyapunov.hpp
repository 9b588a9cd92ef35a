#pragma once

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace swibal {

using Eigen::MatrixXd;

/// Solver for the standard Lyapunov equation A X + X A^T + W = 0 with a
/// fixed Hurwitz A. The real Schur form A = U T U^T is computed once so
/// repeated right-hand sides (as in the series method) cost one
/// quasi-triangular sweep each.
class LyapunovSolver {
 public:
  /// Throws Error(NotHurwitz) or Error(NearSingular).
  explicit LyapunovSolver(const MatrixXd& A);

  int size() const { return static_cast<int>(T_.rows()); }
  const MatrixXd& schur_vectors() const { return U_; }
  const MatrixXd& schur_form() const { return T_; }
  double spectral_abscissa() const { return abscissa_; }

  /// Solves A X + X A^T + W = 0. W is symmetrized on input, X on output.
  MatrixXd solve(const MatrixXd& W) const;

  /// Same equation in Schur coordinates: T Y + Y T^T + V = 0 with
  /// V = U^T W U symmetric.
  MatrixXd solve_schur(const MatrixXd& V) const;

 private:
  MatrixXd U_;
  MatrixXd T_;
  MatrixXd Tt_;                // T^T, so row sweeps read contiguous memory
  std::vector<int> block_start_;  // 1x1 and 2x2 diagonal blocks of T
  double abscissa_ = 0.0;
};

/// One-shot convenience wrapper around LyapunovSolver.
MatrixXd solve_lyapunov(const MatrixXd& A, const MatrixXd& W);

/// Factor L (n x n) with L L^T = X for A X + X A^T + B B^T = 0, computed
/// directly from a complex Schur form (Hammarling's method) without forming X.
/// Small singular values of L keep relative accuracy, which an
/// eigendecomposition of X cannot offer below sqrt(eps) * ||X||.
MatrixXd lyapunov_factor(const MatrixXd& A, const MatrixXd& B);

/// n x k factor F replaced by an n x n factor G with G G^T = F F^T
/// (unchanged when k <= n).
MatrixXd compress_factor(const MatrixXd& F);

enum class GenMethod { Kronecker, FixedPoint, Auto };

std::string_view method_name(GenMethod method);

struct GenSolveOptions {
  GenMethod method = GenMethod::Auto;
  double rel_tol = 1e-12;
  int max_iter = 1000;
  int kron_cap = 64;
};

struct GenSolveReport {
  GenMethod method = GenMethod::FixedPoint;
  int iterations = 0;
  double residual = 0.0;  // as returned by generalized_residual
  bool converged = false;
  double series_tail = 0.0;  // ||X_K||_F / ||X_{K-1}||_F of the last two terms
};

struct GenSolution {
  MatrixXd X;
  GenSolveReport report;
};

/// ||A X + X A^T + sum_j D_j X D_j^T + W||_F / max(1, ||W||_F).
double generalized_residual(const MatrixXd& A, std::span<const MatrixXd> D,
                            const MatrixXd& W, const MatrixXd& X);

/// Dense solve of the vectorized equation
///   (I (x) A + A (x) I + sum_j D_j (x) D_j) vec X = -vec W.
/// Cost is O(n^6); n above kron_cap throws Error(DimensionTooLarge).
MatrixXd solve_generalized_kron(const MatrixXd& A, std::span<const MatrixXd> D,
                                const MatrixXd& W, int kron_cap = 64);

/// Neumann-series solve X = sum_k X_k with
///   A X_1 + X_1 A^T + W = 0,
///   A X_k + X_k A^T + sum_j D_j X_{k-1} D_j^T = 0.
/// Stops once ||X_K||_F <= rel_tol ||X||_F. Throws Error(Diverged) after five
/// consecutive growing terms, Error(NotConverged) when max_iter runs out.
GenSolution solve_generalized_fixedpoint(const MatrixXd& A,
                                         std::span<const MatrixXd> D,
                                         const MatrixXd& W,
                                         const GenSolveOptions& opts = {});

/// Dispatches on opts.method. Auto runs the series first and falls back to
/// the Kronecker solve when the series stalls without diverging and
/// n <= kron_cap.
GenSolution solve_generalized(const MatrixXd& A, std::span<const MatrixXd> D,
                              const MatrixXd& W, const GenSolveOptions& opts = {});

/// The first K terms X_1 .. X_K of the series above.
std::vector<MatrixXd> series_terms(const MatrixXd& A, std::span<const MatrixXd> D,
                                   const MatrixXd& W, int K);

/// Sufficient condition for the series to converge:
///   ||sum_j D_j D_j^T||_2 < 2 alpha / beta^2 where ||e^{At}|| <= beta e^{-alpha t}.
/// For normal A, beta = 1 exactly. Otherwise beta is sampled on a log grid
/// and `heuristic` is set.
struct ExistenceDiagnostic {
  double alpha = 0.0;
  double beta = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  bool heuristic = false;
};

ExistenceDiagnostic existence_margin(const MatrixXd& A, std::span<const MatrixXd> D);

}  // namespace swibal
