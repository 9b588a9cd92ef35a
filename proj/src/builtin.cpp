#include "swibal/builtin.hpp"

#include "swibal/error.hpp"

namespace swibal {

namespace {

MatrixXd tridiag(int n, double sub, double diag, double super) {
  MatrixXd A = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = diag;
    if (i > 0) A(i, i - 1) = sub;
    if (i + 1 < n) A(i, i + 1) = super;
  }
  return A;
}

MatrixXd unit(int n, int k) {
  MatrixXd e = MatrixXd::Zero(n, 1);
  e(k, 0) = 1.0;
  return e;
}

}  // namespace

LssModel example1() {
  const int n = 8;
  const MatrixXd A1 = -MatrixXd::Identity(n, n);
  MatrixXd D = MatrixXd::Zero(n, n);
  D(1, 0) = D(2, 1) = D(3, 2) = 1.0;
  const MatrixXd B1 = unit(n, 0);
  const MatrixXd B2 = unit(n, n - 1);
  return LssModel::from_modes({{A1, B1, B1.transpose()}, {A1 + D, B2, B2.transpose()}},
                              "example1");
}

LssModel example2(int n) {
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "example2 needs n >= 4");
  return LssModel::from_modes(
      {{tridiag(n, 0.1, -2.0, 1.0), unit(n, 0), unit(n, 1).transpose()},
       {tridiag(n, 1.0, -2.0, 0.5), unit(n, n - 1), unit(n, n - 2).transpose()}},
      "example2 (n = " + std::to_string(n) + ")");
}

Scenario example2_scenario() {
  Scenario s;
  s.signal = SwitchingSignal(
      {{0.5, 1}, {2.0, 2}, {2.5, 1}, {4.0, 2}, {5.0, 1}, {5.5, 2}, {6.0, 1}});
  s.input = SineDecayInput{10.0, 30.0, 1.0, {}};
  s.horizon = 6.0;
  return s;
}

}  // namespace swibal
