#pragma once

#include "swibal/gramians.hpp"
#include "swibal/model.hpp"

#include <string>
#include <variant>
#include <vector>

namespace swibal {

inline constexpr double kBiorthTol = 1e-8;

struct TruncationOrder {
  int r = 1;
};

/// Smallest r whose discarded tail sum_{i>r} sigma_i is at most
/// tol * sum_i sigma_i.
struct EnergyTolerance {
  double tol = 1e-6;
};

using Truncation = std::variant<TruncationOrder, EnergyTolerance>;

/// Square-root balanced truncation with global projectors. The reduced model
/// is (W^T A_j V, W^T B_j, C_j V) for every mode, with W^T V = I_r.
struct BalancedReduction {
  MatrixXd V;
  MatrixXd W;
  VectorXd hsv;  // all singular values of S^T R, descending
  int r = 0;
  LssModel reduced;
  double bound_coefficient = 0.0;  // 2 * sum_{k>r} sigma_k
  std::vector<std::string> warnings;
};

/// Singular values of S^T R where P = S S^T and Q = R R^T.
VectorXd hankel_singular_values(const MatrixXd& P, const MatrixXd& Q,
                                double rtol = kRankTol);

/// Requests above the numerical rank of S^T R are capped (with a warning).
/// Throws Error(DegenerateGramians) when S^T R vanishes and
/// Error(OrderTooLarge) when the requested order exceeds n.
BalancedReduction balance_truncate(const LssModel& model, const MatrixXd& P,
                                   const MatrixXd& Q, const Truncation& truncation,
                                   double rtol = kRankTol);

/// Same reduction from given factors P = S S^T, Q = R R^T (any column count).
BalancedReduction balance_truncate_factors(const LssModel& model, const MatrixXd& S,
                                           const MatrixXd& R, const Truncation& truncation,
                                           double rtol = kRankTol);

VectorXd hankel_singular_values_from_factors(const MatrixXd& S, const MatrixXd& R);

/// 2 * (sum_{k>r} sigma_k) * ||u||_{L2}. r equal to hsv.size() gives 0.
double error_bound(const VectorXd& hsv, int r, double u_l2);

/// Throws Error(BiorthogonalityViolated) unless ||W^T V - I||_F <= 1e-8.
LssModel project_model(const LssModel& model, const MatrixXd& V, const MatrixXd& W);

struct AssumptionReport {
  struct Coupling {
    int mode = 0;               // k = 2..M
    double min_eig_reach = 0.0;  // of sum_j D_j P D_j^T + sum_{j!=k} B_j B_j^T - D_k P - P D_k^T
    double min_eig_obs = 0.0;    // dual with Q, D^T, C^T C
  };
  struct ModeLmi {
    int mode = 0;                // k = 1..M
    double max_eig_reach = 0.0;  // of A_k P + P A_k^T + B_k B_k^T
    double max_eig_obs = 0.0;    // of A_k^T Q + Q A_k + C_k^T C_k
    bool strict_reach = false;   // max_eig_reach < -tol
    bool strict_obs = false;
  };
  std::vector<Coupling> coupling;
  std::vector<ModeLmi> modes;
  bool verdict = false;            // every coupling min eigenvalue >= -tol
  bool per_mode_lmis_hold = false;  // every ModeLmi max eigenvalue <= tol
  bool strict_reach_all = false;
  bool strict_obs_all = false;
  bool gramians_definite = false;  // P and Q positive definite
  double tol = 0.0;
};

AssumptionReport check_assumption1(const LssModel& model, const MatrixXd& P,
                                   const MatrixXd& Q, double tol = 1e-8);

struct StabilityCertificate {
  bool verdict = false;
  std::vector<double> max_eigs;  // lambda_max(A_j^T X + X A_j) per mode
};

/// Checks whether X certifies quadratic stability: A_j^T X + X A_j < 0 for
/// every mode. Throws Error(NotPositiveDefinite) unless X is symmetric PD.
StabilityCertificate quadratic_stability_certificate(const LssModel& model,
                                                     const MatrixXd& X);

}  // namespace swibal
