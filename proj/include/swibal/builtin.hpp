#pragma once

#include "swibal/model.hpp"

namespace swibal {

/// Two-mode, eight-state example: A_1 = -I, A_2 = A_1 + D with a chain
/// x_1 -> x_2 -> x_3 -> x_4 in D. B_1 = e_1, B_2 = e_8, C_j = B_j^T.
/// Its reachable space is span{e_1, e_2, e_3, e_4, e_8}.
LssModel example1();

/// Tridiagonal two-mode family of order n (n >= 4):
///   A_1 = tridiag(0.1, -2, 1),  A_2 = tridiag(1, -2, 0.5)   (sub, diag, super)
///   B_1 = e_1, B_2 = e_n, C_1 = e_2^T, C_2 = e_{n-1}^T.
LssModel example2(int n);

/// Seven-segment schedule on [0, 6] alternating between the two modes, driven
/// by u(t) = 10 sin(30 t) e^{-t}.
Scenario example2_scenario();

}  // namespace swibal
