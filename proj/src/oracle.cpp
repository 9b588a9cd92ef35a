#include "swibal/oracle.hpp"

#include "swibal/error.hpp"

#include <vector>

namespace swibal {

ClosureResult invariant_closure(std::span<const MatrixXd> generators,
                                const MatrixXd& seed, int max_sweeps, double rtol) {
  const auto n = seed.rows();
  for (const auto& G : generators) {
    if (G.rows() != n || G.cols() != n) {
      throw Error(ErrorCode::ShapeMismatch, "closure generator has wrong shape");
    }
  }
  if (max_sweeps < 0) max_sweeps = static_cast<int>(n);

  ClosureResult out;
  out.basis = orth(seed, rtol);
  if (generators.empty()) {
    out.saturated = true;
    return out;
  }

  while (out.sweeps < max_sweeps) {
    ++out.sweeps;
    const MatrixXd& V = out.basis.basis;
    MatrixXd candidates(n, V.cols() * static_cast<Eigen::Index>(generators.size()));
    for (std::size_t g = 0; g < generators.size(); ++g) {
      candidates.middleCols(g * V.cols(), V.cols()).noalias() = generators[g] * V;
    }
    bool grew = false;
    if (candidates.cols() > 0 && out.basis.rank < n) {
      const double scale = Eigen::BDCSVD<MatrixXd>(candidates).singularValues()(0);
      MatrixXd fresh = candidates - V * (V.transpose() * candidates);
      fresh -= V * (V.transpose() * fresh);
      if (scale > 0.0) {
        Eigen::BDCSVD<MatrixXd> svd(fresh, Eigen::ComputeThinU);
        const VectorXd& s = svd.singularValues();
        int add = 0;
        while (add < s.size() && s(add) > rtol * scale) ++add;
        add = std::min<int>(add, static_cast<int>(n) - out.basis.rank);
        if (add > 0) {
          MatrixXd next(n, out.basis.rank + add);
          next << V, svd.matrixU().leftCols(add);
          // Re-orthonormalize the union to keep the basis clean over sweeps.
          Eigen::HouseholderQR<MatrixXd> qr(next);
          out.basis.basis = qr.householderQ() * MatrixXd::Identity(n, next.cols());
          out.basis.rank = static_cast<int>(next.cols());
          out.basis.values = VectorXd::Ones(out.basis.rank);
          grew = true;
        }
      }
    }
    if (!grew) {
      out.saturated = true;
      break;
    }
  }
  return out;
}

namespace {

MatrixXd hstack(const std::vector<MatrixXd>& blocks, Eigen::Index rows) {
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  MatrixXd out(rows, cols);
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    out.middleCols(c, b.cols()) = b;
    c += b.cols();
  }
  return out;
}

}  // namespace

ClosureResult reachable_space_bruteforce(const LssModel& model, int max_sweeps) {
  require_consistent(model);
  std::vector<MatrixXd> gens, inputs;
  for (const Mode& md : model.modes) {
    gens.push_back(md.A);
    inputs.push_back(md.B);
  }
  return invariant_closure(gens, hstack(inputs, model.n), max_sweeps);
}

ClosureResult observable_space_bruteforce(const LssModel& model, int max_sweeps) {
  return reachable_space_bruteforce(dual_model(model), max_sweeps);
}

ClosureResult embedded_closure(const LssModel& model, int max_sweeps) {
  const BilinearEmbedding emb = bilinear_embed(model);
  std::vector<MatrixXd> gens;
  for (const auto& Dj : emb.D) {
    if (!Dj.isZero(0.0)) gens.push_back(Dj);
  }
  gens.push_back(emb.A);
  return invariant_closure(gens, hstack(emb.B, model.n), max_sweeps);
}

}  // namespace swibal
