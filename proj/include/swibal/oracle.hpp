#pragma once

#include "swibal/gramians.hpp"
#include "swibal/model.hpp"

#include <span>

namespace swibal {

/// Gramian-free reachable/observable subspaces, used as ground truth for the
/// range characterization of the generalized Gramians.
///
/// The reachable space is the smallest subspace that contains every range(B_j)
/// and is invariant under every A_j. It is built by sweeps
///   V_0     = orth([B_1 ... B_M])
///   V_{s+1} = orth([V_s, A_1 V_s, ..., A_M V_s])
/// until the dimension stops growing. Powers A_j^k never appear explicitly;
/// each sweep adds one more factor to every word in the generators.
struct ClosureResult {
  SubspaceBasis basis;
  int sweeps = 0;
  bool saturated = false;
};

/// Closure of span(seed) under the given generators. max_sweeps < 0 means n.
ClosureResult invariant_closure(std::span<const MatrixXd> generators,
                                const MatrixXd& seed, int max_sweeps = -1,
                                double rtol = kRankTol);

ClosureResult reachable_space_bruteforce(const LssModel& model, int max_sweeps = -1);

/// Closure of range(C_j^T) under every A_j^T.
ClosureResult observable_space_bruteforce(const LssModel& model, int max_sweeps = -1);

/// Reachable closure over the bilinear generators {D_1, ..., D_M, A}. Spans
/// the same space as reachable_space_bruteforce since every A_j = A + D_j and
/// every D_j = A_j - A_1.
ClosureResult embedded_closure(const LssModel& model, int max_sweeps = -1);

}  // namespace swibal
