#include "support.hpp"

#include "swibal/builtin.hpp"
#include "swibal/gramians.hpp"
#include "swibal/oracle.hpp"
#include "swibal/random_models.hpp"

#include <doctest.h>

using namespace swibal;
using testing::gaussian;
using testing::krylov_matrix;
using testing::numeric_rank;
using testing::unit_vector;

namespace {

// Companion matrix of (s + 1)^n, controllable from e_n.
LssModel companion(int n) {
  MatrixXd A = MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  double c = 1.0;  // binomial(n, k)
  for (int k = 0; k < n; ++k) {
    A(n - 1, k) = -c;
    c = c * (n - k) / (k + 1);
  }
  return LssModel::from_modes({{A, unit_vector(n, n - 1), unit_vector(n, 0).transpose()}});
}

SubspaceBasis e_span(std::initializer_list<int> idx, int n) {
  MatrixXd E(n, static_cast<Eigen::Index>(idx.size()));
  int c = 0;
  for (int i : idx) E.col(c++) = unit_vector(n, i);
  return orth(E);
}

}  // namespace

TEST_CASE("reachable_space_bruteforce: example1") {
  const ClosureResult r = reachable_space_bruteforce(example1());
  CHECK(r.basis.rank == 5);
  CHECK(r.saturated);
  CHECK(r.sweeps <= 4);
  CHECK(max_principal_angle(r.basis, e_span({0, 1, 2, 3, 7}, 8)) < 1e-12);
}

TEST_CASE("closures of degenerate inputs are empty") {
  LssModel m = example1();
  for (auto& md : m.modes) {
    md.B.setZero();
    md.C.setZero();
  }
  CHECK(reachable_space_bruteforce(m).basis.rank == 0);
  CHECK(observable_space_bruteforce(m).basis.rank == 0);
}

TEST_CASE("single-mode closures match the Krylov matrix rank") {
  for (int n : {2, 4, 6}) {
    const LssModel m = companion(n);
    CHECK(numeric_rank(krylov_matrix(m.modes[0].A, m.modes[0].B)) == n);
    CHECK(reachable_space_bruteforce(m).basis.rank == n);
    CHECK(observable_space_bruteforce(m).basis.rank ==
          numeric_rank(krylov_matrix(m.modes[0].A.transpose(), m.modes[0].C.transpose())));
  }
}

TEST_CASE("observable closure of the transposed example1 is its reachable space") {
  const LssModel d = dual_model(example1());
  const ClosureResult o = observable_space_bruteforce(d);
  CHECK(o.basis.rank == 5);
  CHECK(max_principal_angle(o.basis, e_span({0, 1, 2, 3, 7}, 8)) < 1e-12);
}

TEST_CASE("embedded closure matches the mode closure") {
  const ClosureResult a = reachable_space_bruteforce(example1());
  const ClosureResult b = embedded_closure(example1());
  CHECK(b.basis.rank == a.basis.rank);
  CHECK(max_principal_angle(a.basis, b.basis) < 1e-10);

  const LssModel c = companion(5);
  CHECK(embedded_closure(c).basis.rank == 5);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    RandomModelSpec spec;
    spec.n = 2 + trial % 5;
    spec.modes = 1 + trial % 3;
    spec.kalman_structure = trial % 2 == 0;
    const LssModel m = random_model(rng, spec);
    const ClosureResult x = reachable_space_bruteforce(m);
    const ClosureResult y = embedded_closure(m);
    CHECK(x.basis.rank == y.basis.rank);
    CHECK(max_principal_angle(x.basis, y.basis) < 1e-10);
  }
}

TEST_CASE("closure rank grows monotonically and saturates within n sweeps") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    RandomModelSpec spec;
    spec.n = 3 + trial % 6;
    spec.modes = 2;
    spec.kalman_structure = true;
    const LssModel m = random_model(rng, spec);
    int prev = 0;
    for (int s = 0; s <= m.n; ++s) {
      const ClosureResult c = reachable_space_bruteforce(m, s);
      CHECK(c.basis.rank >= prev);
      prev = c.basis.rank;
    }
    const ClosureResult full = reachable_space_bruteforce(m);
    CHECK(full.saturated);
    CHECK(full.sweeps <= m.n);
  }
}

TEST_CASE("Kalman-structured random models have the planted reachable dimension") {
  std::mt19937_64 rng(33);
  int proper = 0;
  for (int trial = 0; trial < 30; ++trial) {
    RandomModelSpec spec;
    spec.n = 6;
    spec.modes = 2;
    spec.kalman_structure = true;
    const LssModel m = random_model(rng, spec);
    MatrixXd words(m.n, 0);
    // Words of length < n in A_1, A_2 applied to every B_j, enumerated
    // breadth-first without any orthogonalization.
    std::vector<MatrixXd> layer;
    for (const Mode& md : m.modes) layer.push_back(md.B);
    for (int len = 0; len < m.n; ++len) {
      std::vector<MatrixXd> next;
      for (const MatrixXd& w : layer) {
        words.conservativeResize(Eigen::NoChange, words.cols() + w.cols());
        words.rightCols(w.cols()) = w / std::max(1.0, w.norm());
        if (len + 1 < 4) {
          for (const Mode& md : m.modes) next.push_back(md.A * w);
        }
      }
      layer = std::move(next);
      if (layer.empty()) break;
    }
    const int rank = reachable_space_bruteforce(m).basis.rank;
    CHECK(rank >= numeric_rank(words, 1e-9));
    if (rank < m.n) ++proper;
  }
  CHECK(proper > 0);
}
