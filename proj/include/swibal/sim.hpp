#pragma once

#include "swibal/model.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace swibal {

/// Sampled solution of the switched dynamics. Column k of x and y belongs to
/// t[k]; `mode[k]` is the mode active at t[k] (the incoming one at a switch).
struct Trajectory {
  std::vector<double> t;
  std::vector<int> mode;
  MatrixXd x;  // n x N, empty when states were not kept
  MatrixXd y;  // p x N
  // Left limits of y at switch instants, where C changes: y_left.col(s) is
  // C_old x(t[switch_index[s]]).
  std::vector<Eigen::Index> switch_index;
  MatrixXd y_left;
};

struct SimOptions {
  double h = 1e-3;
  bool keep_state = true;
};

/// Switch-aligned time grid on [0, horizon]: each segment of the switching
/// signal (clipped to the horizon) is split into ceil(len / h) equal steps.
std::vector<double> simulation_grid(const SwitchingSignal& signal, double horizon,
                                    double h);

/// Classical fourth-order Runge-Kutta on the switched system. The state is
/// continuous across switches; the right-hand side never straddles one.
Trajectory simulate_switched(const LssModel& model, const Scenario& scenario,
                             const SimOptions& opts = {});

/// Same integration scheme on the bilinear form
///   dx/dt = A x + sum_j q_j(t) (D_j x + B_j u),  y = sum_j q_j(t) C_j x.
Trajectory simulate_bilinear(const BilinearEmbedding& embedding,
                             const Scenario& scenario, const SimOptions& opts = {});

inline constexpr double kInfiniteHorizon = std::numeric_limits<double>::infinity();

/// ||u||_{L2[0, horizon]}. Zero and sine-decay inputs use closed forms,
/// constant inputs the exact product, sampled inputs the trapezoid rule on
/// their own grid (holding the last sample past it).
/// Throws Error(InvalidArgument) if the integral diverges.
double l2_norm_input(const InputSignal& input, int m, double horizon);

/// Trapezoid rule of ||y(t)||^2 over the trajectory grid, square-rooted.
double l2_norm_output(const Trajectory& traj);

struct ErrorSummary {
  double l2_error = 0.0;
  double linf_error = 0.0;
  std::optional<double> bound;
  bool bound_satisfied = false;
};

/// Simulates both models on the same grid and integrates ||y - y_r||^2. When
/// `hsv` is given the bound 2 sum_{k>r} sigma_k ||u|| is evaluated with
/// r = reduced.n and ||u|| over the scenario horizon.
ErrorSummary output_error(const LssModel& model, const LssModel& reduced,
                          const Scenario& scenario, double h = 1e-3,
                          const std::optional<VectorXd>& hsv = std::nullopt);

}  // namespace swibal
