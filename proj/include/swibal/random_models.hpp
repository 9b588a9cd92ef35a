#pragma once

#include "swibal/model.hpp"

#include <random>

namespace swibal {

struct RandomModelSpec {
  int n = 4;
  int m = 1;
  int p = 1;
  int modes = 2;
  // ||D_j||_2 relative to the decay rate of A_1, before any back-off.
  double coupling = 0.3;
  double shift = 0.5;
  // When set, the state splits into three blocks (reachable and unobservable,
  // reachable and observable, unreachable and observable) hidden behind a
  // random orthogonal change of basis, so neither space is all of R^n.
  bool kalman_structure = false;
};

/// Random stable switched system. A_1 = (G - G^T)/2 - (shift + rho(G)) I and
/// A_j = A_1 + D_j with D_j random of small norm; the coupling is halved until
/// every A_j is Hurwitz and ||sum D_j D_j^T|| < 2 alpha / beta^2.
LssModel random_model(std::mt19937_64& rng, const RandomModelSpec& spec);

MatrixXd random_gaussian(std::mt19937_64& rng, int rows, int cols);

/// Haar-ish orthogonal matrix from the QR factor of a Gaussian matrix.
MatrixXd random_orthogonal(std::mt19937_64& rng, int n);

/// `segments` pieces on [0, horizon] with random lengths and modes; adjacent
/// pieces use different modes when num_modes > 1.
SwitchingSignal random_switching(std::mt19937_64& rng, int num_modes, double horizon,
                                 int segments);

}  // namespace swibal
