#include "swibal/random_models.hpp"

#include "swibal/error.hpp"
#include "swibal/lyapunov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace swibal {

MatrixXd random_gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd G(rows, cols);
  // Column-major fill order fixes the stream consumption.
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) G(i, j) = normal(rng);
  return G;
}

MatrixXd random_orthogonal(std::mt19937_64& rng, int n) {
  const MatrixXd G = random_gaussian(rng, n, n);
  Eigen::HouseholderQR<MatrixXd> qr(G);
  MatrixXd Q = qr.householderQ();
  const MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    if (R(i, i) < 0.0) Q.col(i) = -Q.col(i);
  }
  return Q;
}

SwitchingSignal random_switching(std::mt19937_64& rng, int num_modes, double horizon,
                                 int segments) {
  if (num_modes < 1 || segments < 1 || !(horizon > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "random_switching: bad arguments");
  }
  std::uniform_real_distribution<double> len(0.5, 1.5);
  std::vector<double> w(segments);
  for (double& v : w) v = len(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::uniform_int_distribution<int> pick(1, num_modes);
  std::vector<SwitchingSignal::Segment> segs;
  double t = 0.0;
  int prev = 0;
  for (int k = 0; k < segments; ++k) {
    t += horizon * w[k] / total;
    int mode = pick(rng);
    if (num_modes > 1) {
      while (mode == prev) mode = pick(rng);
    }
    segs.push_back({k + 1 == segments ? horizon : t, mode});
    prev = mode;
  }
  return SwitchingSignal(std::move(segs));
}

namespace {

// Block sizes (a, b, c) with b >= 1.
std::array<int, 3> kalman_blocks(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> bd(1, n);
  const int b = bd(rng);
  std::uniform_int_distribution<int> ad(0, n - b);
  const int a = ad(rng);
  return {a, b, n - a - b};
}

// Zeroes every block below the block diagonal.
void upper_block_triangular(MatrixXd& M, const std::array<int, 3>& blk) {
  int r0 = 0;
  for (int bi = 0; bi < 3; ++bi) {
    int c0 = 0;
    for (int bj = 0; bj < bi; ++bj) {
      M.block(r0, c0, blk[bi], blk[bj]).setZero();
      c0 += blk[bj];
    }
    r0 += blk[bi];
  }
}

}  // namespace

LssModel random_model(std::mt19937_64& rng, const RandomModelSpec& spec) {
  const int n = spec.n;
  if (n < 1 || spec.m < 1 || spec.p < 1 || spec.modes < 1) {
    throw Error(ErrorCode::InvalidArgument, "random_model: n, m, p, modes must be >= 1");
  }
  const MatrixXd G = random_gaussian(rng, n, n);
  const double rho = G.eigenvalues().cwiseAbs().maxCoeff();
  MatrixXd A1 = 0.5 * (G - G.transpose()) -
                (spec.shift + rho) * MatrixXd::Identity(n, n);
  MatrixXd B = random_gaussian(rng, n, spec.m * spec.modes);
  MatrixXd C = random_gaussian(rng, spec.p * spec.modes, n);
  std::vector<MatrixXd> D(spec.modes, MatrixXd::Zero(n, n));
  for (int j = 1; j < spec.modes; ++j) {
    D[j] = random_gaussian(rng, n, n);
    D[j] /= D[j].jacobiSvd().singularValues()(0);
  }

  MatrixXd T = MatrixXd::Identity(n, n);
  if (spec.kalman_structure) {
    const auto blk = kalman_blocks(rng, n);
    // A fresh upper part keeps the off-diagonal coupling between blocks.
    A1 += 0.5 * random_gaussian(rng, n, n).triangularView<Eigen::StrictlyUpper>().toDenseMatrix();
    upper_block_triangular(A1, blk);
    for (auto& Dj : D) upper_block_triangular(Dj, blk);
    B.bottomRows(blk[2]).setZero();
    C.leftCols(blk[0]).setZero();
    T = random_orthogonal(rng, n);
  }

  const double alpha = -spectral_abscissa(A1);
  double scale = spec.coupling * alpha;
  for (int attempt = 0; attempt < 60; ++attempt, scale *= 0.5) {
    std::vector<MatrixXd> Ds;
    for (const auto& Dj : D) Ds.push_back(scale * Dj);
    bool ok = true;
    for (const auto& Dj : Ds) ok = ok && spectral_abscissa(A1 + Dj) < 0.0;
    if (ok && spec.modes > 1) ok = existence_margin(A1, Ds).satisfied;
    if (!ok) continue;

    std::vector<Mode> modes;
    for (int j = 0; j < spec.modes; ++j) {
      modes.push_back({T * (A1 + Ds[j]) * T.transpose(),
                       T * B.middleCols(j * spec.m, spec.m),
                       C.middleRows(j * spec.p, spec.p) * T.transpose()});
    }
    return LssModel::from_modes(std::move(modes), "random");
  }
  throw Error(ErrorCode::InvalidArgument, "random_model: could not meet the coupling gate");
}

}  // namespace swibal
