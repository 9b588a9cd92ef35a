#include "swibal/lyapunov.hpp"

#include "swibal/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <complex>
#include <limits>
#include <cmath>
#include <sstream>

namespace swibal {

namespace {

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;

MatrixXd symmetrized(const MatrixXd& W) { return 0.5 * (W + W.transpose()); }

void require_square(const MatrixXd& M, int n, const char* what) {
  if (M.rows() != n || M.cols() != n) {
    std::ostringstream os;
    os << what << " is " << M.rows() << "x" << M.cols() << ", expected " << n << "x"
       << n;
    throw Error(ErrorCode::ShapeMismatch, os.str());
  }
}

void require_shapes(const MatrixXd& A, std::span<const MatrixXd> D, const MatrixXd& W) {
  const int n = static_cast<int>(A.rows());
  require_square(A, n, "A");
  for (const auto& Dj : D) require_square(Dj, n, "D_j");
  require_square(W, n, "W");
}

// Solves T_ii X + X T_jj^T = R for blocks of size 1 or 2.
SmallMatrix solve_small_sylvester(const SmallMatrix& Tii, const SmallMatrix& Tjj,
                                  const SmallMatrix& R) {
  const int iz = static_cast<int>(Tii.rows());
  const int jz = static_cast<int>(Tjj.rows());
  SmallMatrix K = SmallMatrix::Zero(iz * jz, iz * jz);
  for (int b = 0; b < jz; ++b) {
    K.block(b * iz, b * iz, iz, iz) += Tii;
    for (int a = 0; a < jz; ++a) {
      K.block(b * iz, a * iz, iz, iz).diagonal().array() += Tjj(b, a);
    }
  }
  SmallVector rhs(iz * jz);
  for (int c = 0; c < jz; ++c) rhs.segment(c * iz, iz) = R.col(c);
  const SmallVector x = K.fullPivLu().solve(rhs);
  SmallMatrix X(iz, jz);
  for (int c = 0; c < jz; ++c) X.col(c) = x.segment(c * iz, iz);
  return X;
}

}  // namespace

LyapunovSolver::LyapunovSolver(const MatrixXd& A) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "Lyapunov solve needs a square A");
  }
  const int n = static_cast<int>(A.rows());
  if (n == 0) return;
  Eigen::RealSchur<MatrixXd> schur(A);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorCode::NearSingular, "real Schur decomposition did not converge");
  }
  T_ = schur.matrixT();
  U_ = schur.matrixU();

  abscissa_ = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n;) {
    block_start_.push_back(i);
    if (i + 1 < n && T_(i + 1, i) != 0.0) {
      abscissa_ = std::max(abscissa_, 0.5 * (T_(i, i) + T_(i + 1, i + 1)));
      i += 2;
    } else {
      abscissa_ = std::max(abscissa_, T_(i, i));
      i += 1;
    }
  }
  block_start_.push_back(n);
  // Everything strictly below the quasi-triangular band is rounding noise.
  for (int j = 0; j < n; ++j) {
    for (int i = j + 2; i < n; ++i) T_(i, j) = 0.0;
  }
  Tt_ = T_.transpose();

  if (!(abscissa_ < 0.0)) {
    std::ostringstream os;
    os << "matrix is not Hurwitz (spectral abscissa " << abscissa_ << ")";
    throw Error(ErrorCode::NotHurwitz, os.str());
  }
  // lambda_i + lambda_j is closest to zero for the rightmost eigenvalue pair.
  if (2.0 * std::abs(abscissa_) < 1e-12) {
    throw Error(ErrorCode::NearSingular,
                "eigenvalue pair sums within 1e-12 of zero; Lyapunov operator is "
                "near singular");
  }
}

MatrixXd LyapunovSolver::solve_schur(const MatrixXd& V) const {
  const int n = size();
  require_square(V, n, "W");
  MatrixXd Y = MatrixXd::Zero(n, n);
  const int nb = static_cast<int>(block_start_.size()) - 1;

  for (int jb = nb - 1; jb >= 0; --jb) {
    const int j0 = block_start_[jb];
    const int jz = block_start_[jb + 1] - j0;
    const int jend = j0 + jz;
    const SmallMatrix Tjj = T_.block(j0, j0, jz, jz);

    // Contribution of the already solved columns to the right of block j.
    MatrixXd G = V.block(0, j0, jend, jz);
    if (jend < n) {
      G.noalias() += Y.block(0, jend, jend, n - jend) *
                     Tt_.block(jend, j0, n - jend, jz);
    }

    for (int ib = jb; ib >= 0; --ib) {
      const int i0 = block_start_[ib];
      const int iz = block_start_[ib + 1] - i0;
      const int iend = i0 + iz;
      SmallMatrix rhs = G.block(i0, 0, iz, jz);
      if (iend < n) {
        rhs.noalias() += Tt_.block(iend, i0, n - iend, iz).transpose() *
                         Y.block(iend, j0, n - iend, jz);
      }
      const SmallMatrix X =
          solve_small_sylvester(T_.block(i0, i0, iz, iz), Tjj, -rhs);
      Y.block(i0, j0, iz, jz) = X;
      Y.block(j0, i0, jz, iz) = X.transpose();
    }
  }
  return symmetrized(Y);
}

MatrixXd LyapunovSolver::solve(const MatrixXd& W) const {
  require_square(W, size(), "W");
  if (size() == 0) return MatrixXd(0, 0);
  const MatrixXd V = U_.transpose() * symmetrized(W) * U_;
  return symmetrized(U_ * solve_schur(V) * U_.transpose());
}

MatrixXd solve_lyapunov(const MatrixXd& A, const MatrixXd& W) {
  return LyapunovSolver(A).solve(W);
}

MatrixXd compress_factor(const MatrixXd& F) {
  const auto n = F.rows();
  if (F.cols() <= n) return F;
  Eigen::HouseholderQR<MatrixXd> qr(F.transpose());
  return qr.matrixQR().topRows(n).triangularView<Eigen::Upper>().toDenseMatrix().transpose();
}

MatrixXd lyapunov_factor(const MatrixXd& A, const MatrixXd& B) {
  using Complex = std::complex<double>;
  using MatrixXc = Eigen::MatrixXcd;
  using VectorXc = Eigen::VectorXcd;
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n) {
    throw Error(ErrorCode::ShapeMismatch, "lyapunov_factor: A must be n x n and B n x m");
  }
  if (n == 0) return MatrixXd(0, 0);
  // Complex Schur form A = Z T Z^H; the factor U of Z^H X Z is upper
  // triangular and is built from the last row upwards.
  Eigen::ComplexSchur<MatrixXc> schur(A.cast<Complex>());
  const MatrixXc& T = schur.matrixT();
  const MatrixXc& Z = schur.matrixU();
  const double abscissa = T.diagonal().real().maxCoeff();
  if (!(abscissa < 0.0)) {
    std::ostringstream os;
    os << "A is not Hurwitz (spectral abscissa " << abscissa << ")";
    throw Error(ErrorCode::NotHurwitz, os.str());
  }
  // One column at a time: X is the sum of the single-column solutions, and
  // the rank-one recursion below is exact only for a single column.
  MatrixXc L(n, n * B.cols());
  VectorXc z;
  for (Eigen::Index col = 0; col < B.cols(); ++col) {
    VectorXc b = Z.adjoint() * B.col(col).cast<Complex>();
    // Entries at roundoff level carry a meaningless phase that the update
    // below would amplify through (T_1 + conj(tau))^{-1}; treat them as zero.
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * b.norm();
    MatrixXc U = MatrixXc::Zero(n, n);
    for (Eigen::Index k = n - 1; k >= 0; --k) {
      const Complex tau = T(k, k);
      const double nb = std::abs(b(k));
      if (nb <= floor) continue;
      const double sq = std::sqrt(-2.0 * tau.real());
      const double nu = nb / sq;
      U(k, k) = nu;
      if (k == 0) break;
      // With bh = b_k / |b_k|:  (T_1 + conj(tau) I) z = sq conj(bh) b_1 + nu t,
      // u = -z and b_1 <- b_1 + sq bh z.
      const Complex bh = b(k) / nb;
      z = (sq * std::conj(bh)) * b.head(k) + nu * T.col(k).head(k);
      const Complex shift = std::conj(tau);
      for (Eigen::Index j = k - 1; j >= 0; --j) {
        z(j) /= T(j, j) + shift;
        if (j > 0) z.head(j) -= T.col(j).head(j) * z(j);
      }
      U.col(k).head(k) = -z;
      b.head(k) += (sq * bh) * z;
    }
    L.middleCols(col * n, n) = Z * U;
  }
  MatrixXd S(n, 2 * L.cols());
  S << L.real(), L.imag();
  return compress_factor(S);
}

std::string_view method_name(GenMethod method) {
  switch (method) {
    case GenMethod::Kronecker: return "kron";
    case GenMethod::FixedPoint: return "fixedpoint";
    case GenMethod::Auto: return "auto";
  }
  return "unknown";
}

double generalized_residual(const MatrixXd& A, std::span<const MatrixXd> D,
                            const MatrixXd& W, const MatrixXd& X) {
  require_shapes(A, D, W);
  require_square(X, static_cast<int>(A.rows()), "X");
  MatrixXd R = A * X;
  R += R.transpose().eval();
  R += W;
  for (const auto& Dj : D) R.noalias() += Dj * X * Dj.transpose();
  return R.norm() / std::max(1.0, W.norm());
}

MatrixXd solve_generalized_kron(const MatrixXd& A, std::span<const MatrixXd> D,
                                const MatrixXd& W, int kron_cap) {
  require_shapes(A, D, W);
  const int n = static_cast<int>(A.rows());
  if (n > kron_cap) {
    throw Error(ErrorCode::DimensionTooLarge,
                "Kronecker solve limited to n <= " + std::to_string(kron_cap) +
                    " (n = " + std::to_string(n) + ")");
  }
  const int N = n * n;
  MatrixXd K = MatrixXd::Zero(N, N);
  for (int b = 0; b < n; ++b) {
    K.block(b * n, b * n, n, n) += A;  // I (x) A
    for (int a = 0; a < n; ++a) {
      K.block(b * n, a * n, n, n).diagonal().array() += A(b, a);  // A (x) I
      for (const auto& Dj : D) {
        if (Dj(b, a) != 0.0) K.block(b * n, a * n, n, n) += Dj(b, a) * Dj;
      }
    }
  }
  const MatrixXd Ws = symmetrized(W);
  const Eigen::Map<const Eigen::VectorXd> w(Ws.data(), N);
  Eigen::PartialPivLU<MatrixXd> lu(K);
  if (N > 0 && !(lu.rcond() > 1e-14)) {
    throw Error(ErrorCode::SingularKroneckerMatrix,
                "Kronecker matrix is numerically singular");
  }
  Eigen::VectorXd x = lu.solve(-w);
  return symmetrized(Eigen::Map<MatrixXd>(x.data(), n, n));
}

namespace {

constexpr int kDivergenceRun = 5;

// Exact for small matrices; power iteration on E^T E otherwise.
double spectral_norm(const MatrixXd& E) {
  if (E.rows() <= 64) return Eigen::JacobiSVD<MatrixXd>(E).singularValues()(0);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(E.cols()).normalized();
  double sigma = 0.0;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd w = E.transpose() * (E * v);
    const double next = std::sqrt(w.norm());
    v = w / w.norm();
    if (std::abs(next - sigma) <= 1e-12 * next) return next;
    sigma = next;
  }
  return sigma;
}

std::vector<MatrixXd> schur_coordinates(const LyapunovSolver& solver,
                                        std::span<const MatrixXd> D) {
  const MatrixXd& U = solver.schur_vectors();
  std::vector<MatrixXd> out;
  for (const auto& Dj : D) {
    if (Dj.isZero(0.0)) continue;
    out.push_back(U.transpose() * Dj * U);
  }
  return out;
}

MatrixXd apply_coupling(std::span<const MatrixXd> D, const MatrixXd& X) {
  MatrixXd out = MatrixXd::Zero(X.rows(), X.cols());
  for (const auto& Dj : D) out.noalias() += Dj * X * Dj.transpose();
  return out;
}

}  // namespace

GenSolution solve_generalized_fixedpoint(const MatrixXd& A,
                                         std::span<const MatrixXd> D,
                                         const MatrixXd& W,
                                         const GenSolveOptions& opts) {
  require_shapes(A, D, W);
  if (!(opts.rel_tol > 0.0) || opts.max_iter < 1) {
    throw Error(ErrorCode::InvalidArgument, "fixed point needs rel_tol > 0 and max_iter >= 1");
  }
  const LyapunovSolver solver(A);
  const MatrixXd& U = solver.schur_vectors();
  const std::vector<MatrixXd> Ds = schur_coordinates(solver, D);

  GenSolution out;
  out.report.method = GenMethod::FixedPoint;
  MatrixXd term = solver.solve_schur(U.transpose() * symmetrized(W) * U);
  MatrixXd sum = term;
  double prev_norm = term.norm();
  int growing = 0;
  int k = 1;
  bool converged = Ds.empty() || prev_norm <= opts.rel_tol * sum.norm();

  while (!converged && k < opts.max_iter) {
    term = solver.solve_schur(apply_coupling(Ds, term));
    sum += term;
    ++k;
    const double norm = term.norm();
    out.report.series_tail = prev_norm > 0.0 ? norm / prev_norm : 0.0;
    if (!std::isfinite(norm) || !std::isfinite(sum.norm())) {
      growing = kDivergenceRun;
    } else {
      growing = norm > prev_norm ? growing + 1 : 0;
    }
    if (growing >= kDivergenceRun) {
      std::ostringstream os;
      os << "Gramian series diverged after " << k
         << " terms (term norm ratio " << out.report.series_tail
         << "); the existence condition ||sum D_j D_j^T|| < 2 alpha / beta^2 is "
            "likely violated";
      throw Error(ErrorCode::Diverged, os.str());
    }
    prev_norm = norm;
    converged = norm <= opts.rel_tol * sum.norm();
  }

  out.X = symmetrized(U * sum * U.transpose());
  out.report.iterations = k;
  out.report.converged = converged;
  out.report.residual = generalized_residual(A, D, W, out.X);
  if (!converged) {
    std::ostringstream os;
    os << "Gramian series did not reach rel_tol " << opts.rel_tol << " within "
       << opts.max_iter << " terms (last ratio " << out.report.series_tail << ")";
    throw Error(ErrorCode::NotConverged, os.str());
  }
  return out;
}

GenSolution solve_generalized(const MatrixXd& A, std::span<const MatrixXd> D,
                              const MatrixXd& W, const GenSolveOptions& opts) {
  auto kron = [&] {
    GenSolution out;
    out.X = solve_generalized_kron(A, D, W, opts.kron_cap);
    out.report.method = GenMethod::Kronecker;
    out.report.residual = generalized_residual(A, D, W, out.X);
    out.report.converged = true;
    return out;
  };
  switch (opts.method) {
    case GenMethod::Kronecker: {
      // Kronecker solve has no Hurwitz precondition of its own, but the
      // Gramian interpretation needs one.
      LyapunovSolver check(A);
      return kron();
    }
    case GenMethod::FixedPoint:
      return solve_generalized_fixedpoint(A, D, W, opts);
    case GenMethod::Auto:
      try {
        return solve_generalized_fixedpoint(A, D, W, opts);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotConverged || A.rows() > opts.kron_cap) throw;
        return kron();
      }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown solve method");
}

std::vector<MatrixXd> series_terms(const MatrixXd& A, std::span<const MatrixXd> D,
                                   const MatrixXd& W, int K) {
  require_shapes(A, D, W);
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "series_terms needs K >= 1");
  const LyapunovSolver solver(A);
  std::vector<MatrixXd> terms;
  terms.reserve(K);
  terms.push_back(solver.solve(W));
  for (int k = 1; k < K; ++k) {
    terms.push_back(solver.solve(apply_coupling(D, terms.back())));
  }
  return terms;
}

ExistenceDiagnostic existence_margin(const MatrixXd& A, std::span<const MatrixXd> D) {
  const int n = static_cast<int>(A.rows());
  require_shapes(A, D, MatrixXd::Zero(n, n));
  const LyapunovSolver solver(A);  // Hurwitz check

  ExistenceDiagnostic d;
  d.alpha = -solver.spectral_abscissa();

  MatrixXd S = MatrixXd::Zero(n, n);
  for (const auto& Dj : D) S.noalias() += Dj * Dj.transpose();
  d.lhs = n > 0 ? Eigen::SelfAdjointEigenSolver<MatrixXd>(S, Eigen::EigenvaluesOnly)
                      .eigenvalues()
                      .cwiseAbs()
                      .maxCoeff()
                : 0.0;

  const double commutator =
      (A * A.transpose() - A.transpose() * A).norm();
  const bool normal = commutator <= 1e-12 * std::max(1.0, A.squaredNorm());
  d.beta = 1.0;
  d.heuristic = !normal;
  if (!normal) {
    constexpr int kPoints = 64;
    const double lo = std::log(1e-3 / d.alpha);
    const double hi = std::log(10.0 / d.alpha);
    for (int k = 0; k < kPoints; ++k) {
      const double t = std::exp(lo + (hi - lo) * k / (kPoints - 1));
      const MatrixXd E = (A * t).exp();
      const double norm = spectral_norm(E);
      d.beta = std::max(d.beta, norm * std::exp(d.alpha * t));
    }
  }
  d.rhs = 2.0 * d.alpha / (d.beta * d.beta);
  d.satisfied = d.alpha > 0.0 && d.lhs < d.rhs;
  return d;
}

}  // namespace swibal
