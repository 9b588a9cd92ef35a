#include "swibal/gramians.hpp"

#include "swibal/error.hpp"

#include <algorithm>
#include <cmath>

namespace swibal {

namespace {

MatrixXd sum_outer(const std::vector<MatrixXd>& factors, bool transpose_first) {
  const auto rows = transpose_first ? factors.front().cols() : factors.front().rows();
  MatrixXd W = MatrixXd::Zero(rows, rows);
  for (const auto& F : factors) {
    if (transpose_first) {
      W.noalias() += F.transpose() * F;
    } else {
      W.noalias() += F * F.transpose();
    }
  }
  return W;
}

MatrixXd hcat(const std::vector<MatrixXd>& blocks, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  MatrixXd out(rows, cols);
  cols = 0;
  for (const auto& b : blocks) {
    out.middleCols(cols, b.cols()) = b;
    cols += b.cols();
  }
  return out;
}

}  // namespace

GramianResult reach_gramian(const LssModel& model, const GenSolveOptions& opts) {
  const BilinearEmbedding emb = bilinear_embed(model);
  const MatrixXd W = sum_outer(emb.B, false);
  GenSolution sol = solve_generalized(emb.A, emb.D, W, opts);
  return {std::move(sol.X), GramianKind::Reachability, sol.report};
}

GramianResult obs_gramian(const LssModel& model, const GenSolveOptions& opts) {
  GramianResult out = reach_gramian(dual_model(model), opts);
  out.kind = GramianKind::Observability;
  return out;
}

MatrixXd reach_gramian_factor(const LssModel& model, const GenSolveOptions& opts) {
  const BilinearEmbedding emb = bilinear_embed(model);
  const auto n = emb.A.rows();
  std::vector<MatrixXd> D;
  for (const auto& Dj : emb.D) {
    if (!Dj.isZero(0.0)) D.push_back(Dj);
  }
  MatrixXd L = lyapunov_factor(emb.A, compress_factor(hcat(emb.B, n)));
  MatrixXd S = L;
  double prev = L.squaredNorm();
  int growing = 0;
  for (int k = 1; k < opts.max_iter; ++k) {
    if (D.empty() || L.cols() == 0) return S;
    std::vector<MatrixXd> terms;
    for (const auto& Dj : D) terms.push_back(Dj * L);
    L = lyapunov_factor(emb.A, compress_factor(hcat(terms, n)));
    MatrixXd both(n, S.cols() + L.cols());
    both << S, L;
    S = compress_factor(both);
    // trace(X_k) = ||L_k||_F^2 and trace(X) = ||S||_F^2.
    const double term = L.squaredNorm();
    if (term <= opts.rel_tol * S.squaredNorm()) return S;
    growing = term > prev ? growing + 1 : 0;
    if (growing >= 5) {
      throw Error(ErrorCode::Diverged, "factored Gramian series is growing");
    }
    prev = term;
  }
  throw Error(ErrorCode::NotConverged, "factored Gramian series did not converge in " +
                                           std::to_string(opts.max_iter) + " terms");
}

MatrixXd obs_gramian_factor(const LssModel& model, const GenSolveOptions& opts) {
  return reach_gramian_factor(dual_model(model), opts);
}

SubspaceBasis reachable_subspace(const LssModel& model, const GenSolveOptions& opts,
                                 double rtol) {
  if (model.n <= kFactorCap) {
    try {
      return orth(reach_gramian_factor(model, opts), rtol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Diverged && e.code() != ErrorCode::NotConverged) throw;
    }
  }
  return range_basis(reach_gramian(model, opts).matrix, rtol);
}

SubspaceBasis observable_subspace(const LssModel& model, const GenSolveOptions& opts,
                                  double rtol) {
  return reachable_subspace(dual_model(model), opts, rtol);
}

AveragedGramians averaged_gramians(const LssModel& model, AverageScale scale) {
  require_consistent(model);
  AveragedGramians out;
  out.P = MatrixXd::Zero(model.n, model.n);
  out.Q = MatrixXd::Zero(model.n, model.n);
  for (int j = 0; j < model.num_modes(); ++j) {
    const Mode& md = model.modes[j];
    try {
      const LyapunovSolver reach(md.A);
      const LyapunovSolver obs(md.A.transpose());
      out.P_terms.push_back(reach.solve(md.B * md.B.transpose()));
      out.Q_terms.push_back(obs.solve(md.C.transpose() * md.C));
    } catch (const Error& e) {
      throw Error(e.code(), "mode " + std::to_string(j + 1) + ": " + e.what());
    }
    out.P += out.P_terms.back();
    out.Q += out.Q_terms.back();
  }
  if (scale == AverageScale::Mean) {
    out.P /= model.num_modes();
    out.Q /= model.num_modes();
  }
  return out;
}

AveragedFactors averaged_factors(const LssModel& model, AverageScale scale) {
  require_consistent(model);
  const int M = model.num_modes();
  MatrixXd S(model.n, model.n * M);
  MatrixXd R(model.n, model.n * M);
  for (int j = 0; j < M; ++j) {
    const Mode& md = model.modes[j];
    try {
      S.middleCols(j * model.n, model.n) = lyapunov_factor(md.A, md.B);
      R.middleCols(j * model.n, model.n) =
          lyapunov_factor(md.A.transpose(), md.C.transpose());
    } catch (const Error& e) {
      throw Error(e.code(), "mode " + std::to_string(j + 1) + ": " + e.what());
    }
  }
  AveragedFactors out{compress_factor(S), compress_factor(R)};
  if (scale == AverageScale::Mean) {
    out.S /= std::sqrt(static_cast<double>(M));
    out.R /= std::sqrt(static_cast<double>(M));
  }
  return out;
}

SubspaceBasis range_basis(const MatrixXd& S, double rtol) {
  SubspaceBasis out;
  out.rtol = rtol;
  const auto n = S.rows();
  if (n == 0) {
    out.basis = MatrixXd(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()));
  const VectorXd& lam = es.eigenvalues();  // ascending
  const double lmax = lam(n - 1);
  int keep = 0;
  if (lmax > 0.0) {
    while (keep < n && lam(n - 1 - keep) > rtol * lmax) ++keep;
  }
  out.rank = keep;
  out.basis = es.eigenvectors().rightCols(keep).rowwise().reverse();
  out.values = lam.tail(keep).reverse();
  return out;
}

SubspaceBasis orth(const MatrixXd& M, double rtol) {
  SubspaceBasis out;
  out.rtol = rtol;
  if (M.cols() == 0 || M.rows() == 0) {
    out.basis = MatrixXd(M.rows(), 0);
    return out;
  }
  Eigen::BDCSVD<MatrixXd> svd(M, Eigen::ComputeThinU);
  const VectorXd& s = svd.singularValues();
  int keep = 0;
  if (s(0) > 0.0) {
    while (keep < s.size() && s(keep) > rtol * s(0)) ++keep;
  }
  out.rank = keep;
  out.basis = svd.matrixU().leftCols(keep);
  out.values = s.head(keep);
  return out;
}

MatrixXd psd_factor(const MatrixXd& S, double rtol) {
  const SubspaceBasis r = range_basis(S, rtol);
  return r.basis * r.values.cwiseSqrt().asDiagonal();
}

namespace {

double spectral_norm(const MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::BDCSVD<MatrixXd>(M).singularValues()(0);
}

}  // namespace

bool subspace_contains(const SubspaceBasis& U, const SubspaceBasis& V, double tol) {
  if (U.ambient() != V.ambient()) {
    throw Error(ErrorCode::ShapeMismatch, "subspaces live in different dimensions");
  }
  if (U.rank == 0) return true;
  const MatrixXd residual = U.basis - V.basis * (V.basis.transpose() * U.basis);
  return spectral_norm(residual) <= tol;
}

double max_principal_angle_sin(const SubspaceBasis& U, const SubspaceBasis& V) {
  if (U.ambient() != V.ambient()) {
    throw Error(ErrorCode::ShapeMismatch, "subspaces live in different dimensions");
  }
  if (U.rank != V.rank) return 1.0;
  if (U.rank == 0) return 0.0;
  const MatrixXd residual = U.basis - V.basis * (V.basis.transpose() * U.basis);
  return std::min(1.0, spectral_norm(residual));
}

double max_principal_angle(const SubspaceBasis& U, const SubspaceBasis& V) {
  return std::asin(max_principal_angle_sin(U, V));
}

RankVerdict is_completely_reachable(const LssModel& model, const GenSolveOptions& opts,
                                    double rtol) {
  const SubspaceBasis r = reachable_subspace(model, opts, rtol);
  return {r.rank == model.n, r.rank, model.n};
}

RankVerdict is_completely_observable(const LssModel& model, const GenSolveOptions& opts,
                                     double rtol) {
  const SubspaceBasis r = observable_subspace(model, opts, rtol);
  return {r.rank == model.n, r.rank, model.n};
}

}  // namespace swibal
