#include "swibal/balred.hpp"

#include "swibal/error.hpp"

#include <cmath>
#include <sstream>

namespace swibal {

namespace {

struct SquareRootFactors {
  MatrixXd S;
  MatrixXd R;
  Eigen::BDCSVD<MatrixXd> svd;
};

SquareRootFactors factor_pair(MatrixXd S, MatrixXd R) {
  if (S.rows() != R.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "Gramian factors must have the same row count");
  }
  SquareRootFactors f;
  f.S = std::move(S);
  f.R = std::move(R);
  if (f.S.cols() == 0 || f.R.cols() == 0) {
    throw Error(ErrorCode::DegenerateGramians, "a Gramian has numerical rank 0");
  }
  f.svd.compute(f.S.transpose() * f.R, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (!(f.svd.singularValues()(0) > 0.0)) {
    throw Error(ErrorCode::DegenerateGramians, "S^T R vanishes");
  }
  return f;
}

SquareRootFactors factor(const MatrixXd& P, const MatrixXd& Q, double rtol) {
  if (P.rows() != P.cols() || Q.rows() != Q.cols() || P.rows() != Q.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "Gramians must be square and of equal size");
  }
  return factor_pair(psd_factor(P, rtol), psd_factor(Q, rtol));
}

int numerical_rank(const VectorXd& s, double rtol) {
  int k = 0;
  while (k < s.size() && s(k) > rtol * s(0)) ++k;
  return k;
}

int order_for_energy(const VectorXd& s, double tol) {
  const double total = s.sum();
  double tail = total;
  for (int k = 1; k <= s.size(); ++k) {
    tail -= s(k - 1);
    if (tail <= tol * total) return k;
  }
  return static_cast<int>(s.size());
}

double max_eig(const MatrixXd& S) {
  if (S.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (S + S.transpose()),
                                                 Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

double min_eig(const MatrixXd& S) { return -max_eig(-S); }

}  // namespace

VectorXd hankel_singular_values(const MatrixXd& P, const MatrixXd& Q, double rtol) {
  return factor(P, Q, rtol).svd.singularValues();
}

VectorXd hankel_singular_values_from_factors(const MatrixXd& S, const MatrixXd& R) {
  return factor_pair(S, R).svd.singularValues();
}

double error_bound(const VectorXd& hsv, int r, double u_l2) {
  if (r < 0 || r > hsv.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "truncation order " + std::to_string(r) + " outside [0, " +
                    std::to_string(hsv.size()) + "]");
  }
  if (!(u_l2 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "||u|| must be >= 0");
  return 2.0 * hsv.tail(hsv.size() - r).sum() * u_l2;
}

LssModel project_model(const LssModel& model, const MatrixXd& V, const MatrixXd& W) {
  require_consistent(model);
  if (V.rows() != model.n || W.rows() != model.n || V.cols() != W.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "projectors must both be n x r");
  }
  const auto r = V.cols();
  const double err = (W.transpose() * V - MatrixXd::Identity(r, r)).norm();
  if (!(err <= kBiorthTol)) {
    std::ostringstream os;
    os << "||W^T V - I||_F = " << err << " exceeds 1e-8";
    throw Error(ErrorCode::BiorthogonalityViolated, os.str());
  }
  LssModel out;
  out.n = static_cast<int>(r);
  out.m = model.m;
  out.p = model.p;
  out.label = model.label.empty() ? std::string("reduced")
                                  : model.label + " (reduced, r = " + std::to_string(r) + ")";
  for (const Mode& md : model.modes) {
    out.modes.push_back({W.transpose() * md.A * V, W.transpose() * md.B, md.C * V});
  }
  return out;
}

namespace {

BalancedReduction truncate(const LssModel& model, const SquareRootFactors& f,
                           const Truncation& truncation, double rtol) {
  if (f.S.rows() != model.n) {
    throw Error(ErrorCode::ShapeMismatch, "Gramian size does not match the model");
  }
  const VectorXd& sigma = f.svd.singularValues();
  const int rank = numerical_rank(sigma, rtol);

  BalancedReduction out;
  out.hsv = sigma;
  int r = 0;
  if (const auto* order = std::get_if<TruncationOrder>(&truncation)) {
    r = order->r;
    if (r < 1) throw Error(ErrorCode::InvalidArgument, "reduced order must be >= 1");
    if (r > model.n) {
      throw Error(ErrorCode::OrderTooLarge,
                  "reduced order " + std::to_string(r) + " exceeds n = " +
                      std::to_string(model.n));
    }
  } else {
    const double tol = std::get<EnergyTolerance>(truncation).tol;
    if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "energy tolerance must be >= 0");
    r = order_for_energy(sigma.head(rank), tol);
  }
  if (r > rank) {
    out.warnings.push_back("requested order " + std::to_string(r) +
                           " capped at the numerical rank " + std::to_string(rank) +
                           " of S^T R");
    r = rank;
  }
  if (r < sigma.size() && sigma(r) >= sigma(r - 1) * (1.0 - 1e-8)) {
    std::ostringstream os;
    os << "sigma_" << r << " and sigma_" << r + 1 << " are numerically equal ("
       << sigma(r - 1) << "); truncation splits a repeated singular value";
    out.warnings.push_back(os.str());
  }

  const VectorXd inv_sqrt = sigma.head(r).cwiseSqrt().cwiseInverse();
  out.V = f.S * f.svd.matrixU().leftCols(r) * inv_sqrt.asDiagonal();
  out.W = f.R * f.svd.matrixV().leftCols(r) * inv_sqrt.asDiagonal();
  // W^T V = I holds only up to about eps * sigma_1 / sigma_r. Past the
  // tolerance, switch to an orthonormal V with the same spans; the reduced
  // model is then similar to the balanced one.
  const MatrixXd I = MatrixXd::Identity(r, r);
  if (!((out.W.transpose() * out.V - I).norm() <= kBiorthTol)) {
    Eigen::HouseholderQR<MatrixXd> qv(out.V);
    Eigen::HouseholderQR<MatrixXd> qw(out.W);
    out.V = qv.householderQ() * MatrixXd::Identity(model.n, r);
    const MatrixXd Wo = qw.householderQ() * MatrixXd::Identity(model.n, r);
    out.W = (Wo.transpose() * out.V).partialPivLu().solve(Wo.transpose()).transpose();
    out.warnings.push_back("balanced projectors lost biorthogonality at r = " +
                           std::to_string(r) +
                           "; reduced model returned in orthonormal coordinates");
  }
  out.r = r;
  out.reduced = project_model(model, out.V, out.W);
  out.bound_coefficient = 2.0 * sigma.tail(sigma.size() - r).sum();
  return out;
}

}  // namespace

BalancedReduction balance_truncate(const LssModel& model, const MatrixXd& P,
                                   const MatrixXd& Q, const Truncation& truncation,
                                   double rtol) {
  if (P.rows() != model.n) {
    throw Error(ErrorCode::ShapeMismatch, "Gramian size does not match the model");
  }
  return truncate(model, factor(P, Q, rtol), truncation, rtol);
}

BalancedReduction balance_truncate_factors(const LssModel& model, const MatrixXd& S,
                                           const MatrixXd& R,
                                           const Truncation& truncation, double rtol) {
  return truncate(model, factor_pair(S, R), truncation, rtol);
}

AssumptionReport check_assumption1(const LssModel& model, const MatrixXd& P,
                                   const MatrixXd& Q, double tol) {
  const BilinearEmbedding emb = bilinear_embed(model);
  const int M = model.num_modes();
  const int n = model.n;
  if (P.rows() != n || P.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw Error(ErrorCode::ShapeMismatch, "Gramian size does not match the model");
  }

  MatrixXd coupling_P = MatrixXd::Zero(n, n);
  MatrixXd coupling_Q = MatrixXd::Zero(n, n);
  MatrixXd BB = MatrixXd::Zero(n, n);
  MatrixXd CC = MatrixXd::Zero(n, n);
  for (int j = 0; j < M; ++j) {
    coupling_P.noalias() += emb.D[j] * P * emb.D[j].transpose();
    coupling_Q.noalias() += emb.D[j].transpose() * Q * emb.D[j];
    BB.noalias() += emb.B[j] * emb.B[j].transpose();
    CC.noalias() += emb.C[j].transpose() * emb.C[j];
  }

  AssumptionReport rep;
  rep.tol = tol;
  rep.verdict = true;
  for (int k = 1; k < M; ++k) {
    const MatrixXd& Dk = emb.D[k];
    const MatrixXd reach = coupling_P + BB - emb.B[k] * emb.B[k].transpose() -
                           Dk * P - P * Dk.transpose();
    const MatrixXd obs = coupling_Q + CC - emb.C[k].transpose() * emb.C[k] -
                         Dk.transpose() * Q - Q * Dk;
    AssumptionReport::Coupling c{k + 1, min_eig(reach), min_eig(obs)};
    rep.verdict = rep.verdict && c.min_eig_reach >= -tol && c.min_eig_obs >= -tol;
    rep.coupling.push_back(c);
  }

  rep.per_mode_lmis_hold = true;
  rep.strict_reach_all = true;
  rep.strict_obs_all = true;
  for (int k = 0; k < M; ++k) {
    const Mode& md = model.modes[k];
    AssumptionReport::ModeLmi lmi;
    lmi.mode = k + 1;
    lmi.max_eig_reach = max_eig(md.A * P + P * md.A.transpose() + md.B * md.B.transpose());
    lmi.max_eig_obs = max_eig(md.A.transpose() * Q + Q * md.A + md.C.transpose() * md.C);
    lmi.strict_reach = lmi.max_eig_reach < -tol;
    lmi.strict_obs = lmi.max_eig_obs < -tol;
    rep.per_mode_lmis_hold =
        rep.per_mode_lmis_hold && lmi.max_eig_reach <= tol && lmi.max_eig_obs <= tol;
    rep.strict_reach_all = rep.strict_reach_all && lmi.strict_reach;
    rep.strict_obs_all = rep.strict_obs_all && lmi.strict_obs;
    rep.modes.push_back(lmi);
  }

  auto definite = [](const MatrixXd& S) {
    const double top = max_eig(S);
    return top > 0.0 && min_eig(S) > kRankTol * top;
  };
  rep.gramians_definite = definite(P) && definite(Q);
  return rep;
}

StabilityCertificate quadratic_stability_certificate(const LssModel& model,
                                                     const MatrixXd& X) {
  require_consistent(model);
  if (X.rows() != model.n || X.cols() != model.n) {
    throw Error(ErrorCode::ShapeMismatch, "certificate must be n x n");
  }
  const double asym = (X - X.transpose()).norm();
  if (asym > 1e-12 * std::max(1.0, X.norm()) || !(min_eig(X) > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "quadratic stability certificate must be symmetric positive definite");
  }
  StabilityCertificate out;
  out.verdict = true;
  for (const Mode& md : model.modes) {
    const double top = max_eig(md.A.transpose() * X + X * md.A);
    out.max_eigs.push_back(top);
    out.verdict = out.verdict && top < 0.0;
  }
  return out;
}

}  // namespace swibal
