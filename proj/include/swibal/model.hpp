#pragma once

#include <Eigen/Dense>

#include <string>
#include <variant>
#include <vector>

namespace swibal {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// One linear mode of a switched system: dx/dt = A x + B u, y = C x.
struct Mode {
  MatrixXd A;
  MatrixXd B;
  MatrixXd C;
};

/// Continuous-time linear switched system with M modes sharing one state
/// space of dimension n, m inputs and p outputs.
///
/// Mode numbers are 1-based everywhere they cross the public interface
/// (switching signals, files, diagnostics); `modes` itself is a plain vector.
struct LssModel {
  int n = 0;
  int m = 0;
  int p = 0;
  std::vector<Mode> modes;
  std::string label;

  int num_modes() const { return static_cast<int>(modes.size()); }

  /// Builds a model and takes n, m, p from the first mode.
  static LssModel from_modes(std::vector<Mode> modes, std::string label = {});
};

struct Diagnostic {
  enum class Kind { Dimension, NotHurwitz, NoModes };
  Kind kind;
  int mode = 0;  // 1-based, 0 when not tied to a mode
  double spectral_abscissa = 0.0;
  std::string message;
};

double spectral_abscissa(const MatrixXd& A);

/// Empty iff every mode has consistent shapes and a Hurwitz A.
std::vector<Diagnostic> validate_model(const LssModel& model);

/// Throws Error(ShapeMismatch) carrying the first dimension diagnostic.
void require_consistent(const LssModel& model);

/// Bilinear form of the switched system: A = A_1, D_j = A_j - A_1.
/// D[0] is kept even though it is identically zero. Each D_j entry is chosen
/// so that A + D_j rounds back to A_j exactly when any double allows it.
struct BilinearEmbedding {
  MatrixXd A;
  std::vector<MatrixXd> D;
  std::vector<MatrixXd> B;
  std::vector<MatrixXd> C;

  int num_modes() const { return static_cast<int>(D.size()); }
};

BilinearEmbedding bilinear_embed(const LssModel& model);

/// Same model with every mode transposed: (A_j^T, C_j^T, B_j^T).
/// The observability data of `model` is the reachability data of the dual.
LssModel dual_model(const LssModel& model);

// ---------------------------------------------------------------------------
// Signals

/// Piecewise-constant, right-continuous mode schedule. Segment k covers
/// [t_end[k-1], t_end[k]) with t_end[-1] = 0; past the last boundary the last
/// mode is held.
class SwitchingSignal {
 public:
  struct Segment {
    double t_end;
    int mode;  // 1-based
  };

  SwitchingSignal() = default;
  /// Throws Error(InvalidArgument) unless boundaries are positive and strictly
  /// increasing and every mode is >= 1.
  explicit SwitchingSignal(std::vector<Segment> segments);

  /// Constant schedule with a single mode.
  static SwitchingSignal constant(int mode, double t_end = 1.0);

  const std::vector<Segment>& segments() const { return segments_; }
  int max_mode() const;
  bool empty() const { return segments_.empty(); }

  /// Active mode at time t; a switching instant belongs to the incoming mode.
  int mode_at(double t) const;

 private:
  std::vector<Segment> segments_;
};

struct ZeroInput {};

struct ConstantInput {
  VectorXd value;
};

/// u_i(t) = mask_i * a * sin(omega t) * exp(-lambda t). An empty mask drives
/// every channel.
struct SineDecayInput {
  double amplitude = 1.0;
  double omega = 1.0;
  double lambda = 1.0;
  VectorXd mask;
};

/// Linear interpolation between samples, held constant outside the grid.
struct SampledInput {
  std::vector<double> t;
  MatrixXd values;  // m x N, column k is u(t[k])
};

using InputSignal =
    std::variant<ZeroInput, ConstantInput, SineDecayInput, SampledInput>;

/// Throws Error(InvalidArgument) if the input cannot drive m channels.
void validate_input(const InputSignal& input, int m);

VectorXd input_value(const InputSignal& input, int m, double t);

/// u(t) followed by the M mode indicators q_1(t) .. q_M(t).
VectorXd extended_input(const InputSignal& input, const SwitchingSignal& signal,
                        int m, int num_modes, double t);

struct Scenario {
  SwitchingSignal signal;
  InputSignal input = ZeroInput{};
  double horizon = 1.0;
  VectorXd x0;  // empty means zero initial state
};

}  // namespace swibal
