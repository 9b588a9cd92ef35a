#pragma once

#include "swibal/lyapunov.hpp"
#include "swibal/model.hpp"

#include <string_view>
#include <vector>

namespace swibal {

enum class GramianKind { Reachability, Observability };

struct GramianResult {
  MatrixXd matrix;
  GramianKind kind = GramianKind::Reachability;
  GenSolveReport report;
};

/// Solves A P + P A^T + sum_j (D_j P D_j^T + B_j B_j^T) = 0 with A = A_1,
/// D_j = A_j - A_1.
GramianResult reach_gramian(const LssModel& model, const GenSolveOptions& opts = {});

/// Solves A^T Q + Q A + sum_j (D_j^T Q D_j + C_j^T C_j) = 0.
GramianResult obs_gramian(const LssModel& model, const GenSolveOptions& opts = {});

enum class AverageScale { Sum, Mean };

/// Per-mode Lyapunov Gramians and their sum (or mean).
struct AveragedGramians {
  MatrixXd P;
  MatrixXd Q;
  std::vector<MatrixXd> P_terms;
  std::vector<MatrixXd> Q_terms;
};

/// Throws Error(NotHurwitz) naming the first mode whose A_j is not Hurwitz.
AveragedGramians averaged_gramians(const LssModel& model,
                                   AverageScale scale = AverageScale::Sum);

/// Square-root factors of the averaged Gramians, P = S S^T and Q = R R^T,
/// assembled from per-mode Lyapunov factors (see lyapunov_factor).
struct AveragedFactors {
  MatrixXd S;
  MatrixXd R;
};

AveragedFactors averaged_factors(const LssModel& model,
                                 AverageScale scale = AverageScale::Sum);

/// Orthonormal basis of a subspace together with the spectral data used to
/// decide its dimension.
struct SubspaceBasis {
  MatrixXd basis;  // n x rank
  int rank = 0;
  VectorXd values;  // eigenvalues (or singular values) that were kept
  double rtol = 0.0;

  int ambient() const { return static_cast<int>(basis.rows()); }
};

inline constexpr double kRankTol = 1e-10;

/// Range of a symmetric PSD matrix: eigenvectors with lambda_i > rtol lambda_max.
SubspaceBasis range_basis(const MatrixXd& S, double rtol = kRankTol);

/// Orthonormal basis of the column span of M, singular values above
/// rtol * sigma_max.
SubspaceBasis orth(const MatrixXd& M, double rtol = kRankTol);

/// Factor F (n x rank) with S = F F^T, from the eigendecomposition of S.
/// Used in place of a Cholesky factor because Gramians may be singular.
MatrixXd psd_factor(const MatrixXd& S, double rtol = kRankTol);

/// True iff span(U) is contained in span(V): ||(I - V V^T) U||_2 <= tol.
bool subspace_contains(const SubspaceBasis& U, const SubspaceBasis& V,
                       double tol = 1e-8);

/// Sine of the largest principal angle between two subspaces, or 1 when
/// their dimensions differ.
double max_principal_angle_sin(const SubspaceBasis& U, const SubspaceBasis& V);

/// Largest principal angle in radians, computed from its sine so that
/// nearly identical subspaces do not lose precision.
double max_principal_angle(const SubspaceBasis& U, const SubspaceBasis& V);

/// Square-root factor L of the generalized Gramian (P = L L^T), summing the
/// fixed-point series term by term in factored form. Small singular values of
/// L keep relative accuracy well below sqrt(eps) * ||L||^2, where an
/// eigendecomposition of P loses them. Cost grows like n^4 per term.
/// Throws Error(Diverged) or Error(NotConverged) like the matrix series.
MatrixXd reach_gramian_factor(const LssModel& model, const GenSolveOptions& opts = {});
MatrixXd obs_gramian_factor(const LssModel& model, const GenSolveOptions& opts = {});

/// Largest n for which reachable_subspace uses the factored Gramian.
inline constexpr int kFactorCap = 64;

/// range(P) as an orthonormal basis. Up to kFactorCap states the rank is
/// decided on singular values of the Gramian factor (sigma_i > rtol sigma_1,
/// the same scale the closure oracle uses); larger models, or models whose
/// series only converges through the Kronecker solve, use range_basis(P, rtol)
/// on eigenvalues.
SubspaceBasis reachable_subspace(const LssModel& model, const GenSolveOptions& opts = {},
                                 double rtol = kRankTol);
SubspaceBasis observable_subspace(const LssModel& model, const GenSolveOptions& opts = {},
                                  double rtol = kRankTol);

struct RankVerdict {
  bool verdict = false;
  int rank = 0;
  int n = 0;
};

RankVerdict is_completely_reachable(const LssModel& model,
                                    const GenSolveOptions& opts = {},
                                    double rtol = kRankTol);
RankVerdict is_completely_observable(const LssModel& model,
                                     const GenSolveOptions& opts = {},
                                     double rtol = kRankTol);

}  // namespace swibal
