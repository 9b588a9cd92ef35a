#include "swibal/sim.hpp"

#include "swibal/balred.hpp"
#include "swibal/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swibal {

std::vector<double> simulation_grid(const SwitchingSignal& signal, double horizon,
                                    double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidArgument, "step size must be positive");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be positive and finite");
  }
  std::vector<double> bounds{0.0};
  for (const auto& seg : signal.segments()) {
    if (seg.t_end < horizon) bounds.push_back(seg.t_end);
  }
  bounds.push_back(horizon);

  std::vector<double> grid{0.0};
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    const double a = bounds[k];
    const double b = bounds[k + 1];
    const double len = b - a;
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil(len / h - 1e-9)));
    for (long i = 1; i < steps; ++i) grid.push_back(a + len * static_cast<double>(i) / steps);
    grid.push_back(b);
  }
  return grid;
}

namespace {

void check_scenario(int n, int m, int num_modes, const Scenario& scenario) {
  if (scenario.signal.empty()) {
    throw Error(ErrorCode::InvalidArgument, "scenario has no switching segments");
  }
  if (scenario.signal.max_mode() > num_modes) {
    throw Error(ErrorCode::ShapeMismatch,
                "switching signal selects mode " +
                    std::to_string(scenario.signal.max_mode()) + " but the model has " +
                    std::to_string(num_modes));
  }
  if (scenario.x0.size() != 0 && scenario.x0.size() != n) {
    throw Error(ErrorCode::ShapeMismatch, "x0 has " + std::to_string(scenario.x0.size()) +
                                              " entries, model has n = " +
                                              std::to_string(n));
  }
  validate_input(scenario.input, m);
}

/// Fixed-step RK4 over a switch-aligned grid. `Field` provides
///   VectorXd rhs(int mode, double t_mode, double t, const VectorXd& x) const;
///   VectorXd output(int mode, double t_mode, const VectorXd& x) const;
/// where t_mode is a time at which the switching signal selects `mode`.
template <class Field>
Trajectory integrate(const Field& field, int n, int p, const Scenario& scenario,
                     const SimOptions& opts) {
  Trajectory traj;
  traj.y_left.resize(p, 0);
  traj.t = simulation_grid(scenario.signal, scenario.horizon, opts.h);
  const auto N = static_cast<Eigen::Index>(traj.t.size());
  traj.mode.resize(N);
  traj.y.resize(p, N);
  if (opts.keep_state) traj.x.resize(n, N);

  VectorXd x = scenario.x0.size() == n ? scenario.x0 : VectorXd::Zero(n);
  double prev_mid = 0.0;
  for (Eigen::Index k = 0; k < N; ++k) {
    const double t = traj.t[k];
    const int q = scenario.signal.mode_at(t);
    traj.mode[k] = q;
    if (k > 0 && traj.mode[k - 1] != q) {
      traj.switch_index.push_back(k);
      traj.y_left.conservativeResize(p, traj.y_left.cols() + 1);
      traj.y_left.rightCols(1) = field.output(scenario.signal.mode_at(prev_mid), prev_mid, x);
    }
    traj.y.col(k) = field.output(q, t, x);
    if (opts.keep_state) traj.x.col(k) = x;
    if (k + 1 == N) break;

    const double h = traj.t[k + 1] - t;
    // The mode is constant on the open step; sample it in the middle.
    const double mid = t + 0.5 * h;
    const int qs = scenario.signal.mode_at(mid);
    const VectorXd k1 = field.rhs(qs, mid, t, x);
    const VectorXd k2 = field.rhs(qs, mid, mid, x + 0.5 * h * k1);
    const VectorXd k3 = field.rhs(qs, mid, mid, x + 0.5 * h * k2);
    const VectorXd k4 = field.rhs(qs, mid, t + h, x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    prev_mid = mid;
    if (!x.allFinite()) {
      std::ostringstream os;
      os << "state became non-finite at t = " << traj.t[k + 1];
      throw Error(ErrorCode::NonFiniteState, os.str());
    }
  }
  return traj;
}

struct SwitchedField {
  const LssModel& model;
  const InputSignal& input;
  VectorXd rhs(int q, double, double t, const VectorXd& x) const {
    const Mode& md = model.modes[q - 1];
    VectorXd dx = md.A * x;
    if (model.m > 0) dx.noalias() += md.B * input_value(input, model.m, t);
    return dx;
  }
  VectorXd output(int q, double, const VectorXd& x) const {
    return model.modes[q - 1].C * x;
  }
};

struct BilinearField {
  const BilinearEmbedding& emb;
  const Scenario& scenario;
  int m;
  // Indicator entries of the extended input, read at t_mode so they stay
  // constant over the RK stages of one step.
  VectorXd indicators(double t_mode) const {
    return extended_input(scenario.input, scenario.signal, m, emb.num_modes(), t_mode)
        .tail(emb.num_modes());
  }
  VectorXd rhs(int, double t_mode, double t, const VectorXd& x) const {
    const VectorXd q = indicators(t_mode);
    const VectorXd u = input_value(scenario.input, m, t);
    VectorXd dx = emb.A * x;
    for (int j = 0; j < emb.num_modes(); ++j) {
      if (q(j) == 0.0) continue;
      dx.noalias() += q(j) * (emb.D[j] * x);
      if (m > 0) dx.noalias() += q(j) * (emb.B[j] * u);
    }
    return dx;
  }
  VectorXd output(int, double t_mode, const VectorXd& x) const {
    const VectorXd q = indicators(t_mode);
    VectorXd y = VectorXd::Zero(emb.C.front().rows());
    for (int j = 0; j < emb.num_modes(); ++j) {
      if (q(j) != 0.0) y.noalias() += q(j) * (emb.C[j] * x);
    }
    return y;
  }
};

}  // namespace

Trajectory simulate_switched(const LssModel& model, const Scenario& scenario,
                             const SimOptions& opts) {
  require_consistent(model);
  check_scenario(model.n, model.m, model.num_modes(), scenario);
  return integrate(SwitchedField{model, scenario.input}, model.n, model.p, scenario,
                   opts);
}

Trajectory simulate_bilinear(const BilinearEmbedding& emb, const Scenario& scenario,
                             const SimOptions& opts) {
  if (emb.D.empty()) throw Error(ErrorCode::InvalidArgument, "embedding has no modes");
  const int n = static_cast<int>(emb.A.rows());
  const int m = static_cast<int>(emb.B.front().cols());
  const int p = static_cast<int>(emb.C.front().rows());
  check_scenario(n, m, emb.num_modes(), scenario);
  return integrate(BilinearField{emb, scenario, m}, n, p, scenario, opts);
}

// ---------------------------------------------------------------------------

namespace {

// Integral of sin^2(omega t) exp(-2 lambda t) over [0, T].
double sine_decay_energy(double omega, double lambda, double T) {
  if (omega == 0.0) return 0.0;
  if (std::isinf(T)) return omega * omega / (4.0 * lambda * (lambda * lambda + omega * omega));
  if (lambda == 0.0) return 0.5 * T - std::sin(2.0 * omega * T) / (4.0 * omega);
  const double c = 2.0 * lambda;
  const double b = 2.0 * omega;
  const double e = std::exp(-c * T);
  const double plain = (1.0 - e) / (2.0 * c);
  const double cosine =
      (c + e * (-c * std::cos(b * T) + b * std::sin(b * T))) / (c * c + b * b);
  return plain - 0.5 * cosine;
}

}  // namespace

double l2_norm_input(const InputSignal& input, int m, double horizon) {
  validate_input(input, m);
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  const bool infinite = std::isinf(horizon);
  auto divergent = [] {
    return Error(ErrorCode::InvalidArgument, "input has infinite L2 norm on [0, inf)");
  };

  if (std::holds_alternative<ZeroInput>(input)) return 0.0;
  if (const auto* c = std::get_if<ConstantInput>(&input)) {
    const double sq = c->value.squaredNorm();
    if (sq == 0.0) return 0.0;
    if (infinite) throw divergent();
    return std::sqrt(sq * horizon);
  }
  if (const auto* s = std::get_if<SineDecayInput>(&input)) {
    const double weight = s->mask.size() == 0 ? m : s->mask.squaredNorm();
    const double scale = s->amplitude * s->amplitude * weight;
    if (scale == 0.0 || s->omega == 0.0) return 0.0;
    if (infinite && !(s->lambda > 0.0)) throw divergent();
    return std::sqrt(scale * sine_decay_energy(s->omega, s->lambda, horizon));
  }
  const auto& sampled = std::get<SampledInput>(input);
  const double last = sampled.values.col(sampled.values.cols() - 1).squaredNorm();
  double end = horizon;
  if (infinite) {
    if (last != 0.0) throw divergent();
    end = std::max(0.0, sampled.t.back());
  }
  std::vector<double> pts{0.0};
  for (double tk : sampled.t) {
    if (tk > 0.0 && tk < end) pts.push_back(tk);
  }
  if (end > 0.0) pts.push_back(end);
  double acc = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double f0 = input_value(input, m, pts[k - 1]).squaredNorm();
    const double f1 = input_value(input, m, pts[k]).squaredNorm();
    acc += 0.5 * (pts[k] - pts[k - 1]) * (f0 + f1);
  }
  return std::sqrt(acc);
}

namespace {

// Trapezoid rule of ||Y_k||^2 using one-sided values at switch instants.
double trapezoid_energy(const std::vector<double>& t, const MatrixXd& Y,
                        const std::vector<Eigen::Index>& switch_index,
                        const MatrixXd& Y_left) {
  double acc = 0.0;
  std::size_t s = 0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    double right = Y.col(k).squaredNorm();
    if (s < switch_index.size() && switch_index[s] == static_cast<Eigen::Index>(k)) {
      right = Y_left.col(s).squaredNorm();
      ++s;
    }
    acc += 0.5 * (t[k] - t[k - 1]) * (Y.col(k - 1).squaredNorm() + right);
  }
  return acc;
}

}  // namespace

double l2_norm_output(const Trajectory& traj) {
  if (traj.t.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
  return std::sqrt(trapezoid_energy(traj.t, traj.y, traj.switch_index, traj.y_left));
}

ErrorSummary output_error(const LssModel& model, const LssModel& reduced,
                          const Scenario& scenario, double h,
                          const std::optional<VectorXd>& hsv) {
  if (model.m != reduced.m || model.p != reduced.p ||
      model.num_modes() != reduced.num_modes()) {
    throw Error(ErrorCode::ShapeMismatch,
                "reduced model must share inputs, outputs and modes with the original");
  }
  SimOptions opts{h, false};
  if (scenario.x0.size() != 0 && !scenario.x0.isZero(0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "output comparison assumes a zero initial state");
  }
  const Trajectory full = simulate_switched(model, scenario, opts);
  Scenario reduced_scenario = scenario;
  reduced_scenario.x0.resize(0);
  const Trajectory red = simulate_switched(reduced, reduced_scenario, opts);

  const MatrixXd diff = full.y - red.y;
  const MatrixXd diff_left = full.y_left - red.y_left;
  ErrorSummary out;
  out.l2_error = std::sqrt(trapezoid_energy(full.t, diff, full.switch_index, diff_left));
  out.linf_error = diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0;
  if (diff_left.size()) out.linf_error = std::max(out.linf_error, diff_left.cwiseAbs().maxCoeff());
  if (hsv) {
    const double u_l2 = l2_norm_input(scenario.input, model.m, scenario.horizon);
    const int r = std::min<int>(reduced.n, static_cast<int>(hsv->size()));
    out.bound = error_bound(*hsv, r, u_l2);
    out.bound_satisfied = out.l2_error <= *out.bound * (1.0 + 1e-6) + 1e-12;
  }
  return out;
}

}  // namespace swibal
