#include "swibal/model.hpp"

#include "swibal/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace swibal {

LssModel LssModel::from_modes(std::vector<Mode> modes, std::string label) {
  LssModel model;
  if (!modes.empty()) {
    model.n = static_cast<int>(modes.front().A.rows());
    model.m = static_cast<int>(modes.front().B.cols());
    model.p = static_cast<int>(modes.front().C.rows());
  }
  model.modes = std::move(modes);
  model.label = std::move(label);
  return model;
}

double spectral_abscissa(const MatrixXd& A) {
  if (A.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<MatrixXd> es(A, false);
  return es.eigenvalues().real().maxCoeff();
}

namespace {

std::string shape(const MatrixXd& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

}  // namespace

std::vector<Diagnostic> validate_model(const LssModel& model) {
  std::vector<Diagnostic> out;
  if (model.modes.empty()) {
    out.push_back({Diagnostic::Kind::NoModes, 0, 0.0, "model has no modes"});
    return out;
  }
  for (int j = 0; j < model.num_modes(); ++j) {
    const Mode& md = model.modes[j];
    const int id = j + 1;
    auto bad = [&](const char* which, const MatrixXd& M, int rows, int cols) {
      if (M.rows() == rows && M.cols() == cols) return false;
      std::ostringstream os;
      os << "mode " << id << ": " << which << " is " << shape(M) << ", expected "
         << rows << "x" << cols;
      out.push_back({Diagnostic::Kind::Dimension, id, 0.0, os.str()});
      return true;
    };
    const bool a_bad = bad("A", md.A, model.n, model.n);
    bad("B", md.B, model.n, model.m);
    bad("C", md.C, model.p, model.n);
    if (a_bad) continue;
    const double alpha = spectral_abscissa(md.A);
    if (!(alpha < 0.0)) {
      std::ostringstream os;
      os << "mode " << id << " not Hurwitz (spectral abscissa " << alpha << ")";
      out.push_back({Diagnostic::Kind::NotHurwitz, id, alpha, os.str()});
    }
  }
  return out;
}

void require_consistent(const LssModel& model) {
  for (const auto& d : validate_model(model)) {
    if (d.kind != Diagnostic::Kind::NotHurwitz) {
      throw Error(ErrorCode::ShapeMismatch, d.message);
    }
  }
}

namespace {

// fl(a + (b - a)) can miss b by an ulp; step d until a + d lands on b.
double exact_difference(double a, double b) {
  double d = b - a;
  for (int k = 0; k < 4 && a + d != b; ++k) {
    d = std::nextafter(d, a + d < b ? HUGE_VAL : -HUGE_VAL);
  }
  return d;
}

}  // namespace

BilinearEmbedding bilinear_embed(const LssModel& model) {
  require_consistent(model);
  BilinearEmbedding emb;
  emb.A = model.modes.front().A;
  for (const Mode& md : model.modes) {
    MatrixXd D = md.A - emb.A;
    for (Eigen::Index j = 0; j < D.cols(); ++j)
      for (Eigen::Index i = 0; i < D.rows(); ++i)
        if (emb.A(i, j) + D(i, j) != md.A(i, j)) D(i, j) = exact_difference(emb.A(i, j), md.A(i, j));
    emb.D.push_back(std::move(D));
    emb.B.push_back(md.B);
    emb.C.push_back(md.C);
  }
  return emb;
}

LssModel dual_model(const LssModel& model) {
  LssModel dual;
  dual.n = model.n;
  dual.m = model.p;
  dual.p = model.m;
  dual.label = model.label;
  for (const Mode& md : model.modes) {
    dual.modes.push_back({md.A.transpose(), md.C.transpose(), md.B.transpose()});
  }
  return dual;
}

// ---------------------------------------------------------------------------

SwitchingSignal::SwitchingSignal(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  double prev = 0.0;
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& s = segments_[k];
    if (!(s.t_end > prev) || !std::isfinite(s.t_end)) {
      std::ostringstream os;
      os << "switching segment " << k + 1 << ": t_end " << s.t_end
         << " must be finite and greater than " << prev;
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
    if (s.mode < 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "switching segment " + std::to_string(k + 1) +
                      ": mode must be >= 1");
    }
    prev = s.t_end;
  }
}

SwitchingSignal SwitchingSignal::constant(int mode, double t_end) {
  return SwitchingSignal({{t_end, mode}});
}

int SwitchingSignal::max_mode() const {
  int mx = 0;
  for (const auto& s : segments_) mx = std::max(mx, s.mode);
  return mx;
}

int SwitchingSignal::mode_at(double t) const {
  if (t < 0.0 || std::isnan(t)) {
    throw Error(ErrorCode::InvalidArgument, "mode_at: negative time");
  }
  if (segments_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "mode_at: empty switching signal");
  }
  // First segment whose end lies strictly after t.
  auto it = std::upper_bound(
      segments_.begin(), segments_.end(), t,
      [](double value, const Segment& s) { return value < s.t_end; });
  if (it == segments_.end()) return segments_.back().mode;
  return it->mode;
}

// ---------------------------------------------------------------------------

namespace {

struct InputValidator {
  int m;
  void operator()(const ZeroInput&) const {}
  void operator()(const ConstantInput& c) const {
    if (c.value.size() != m) {
      throw Error(ErrorCode::InvalidArgument,
                  "constant input has " + std::to_string(c.value.size()) +
                      " entries, model has m = " + std::to_string(m));
    }
  }
  void operator()(const SineDecayInput& s) const {
    if (s.mask.size() != 0 && s.mask.size() != m) {
      throw Error(ErrorCode::InvalidArgument,
                  "sine_decay mask length does not match m");
    }
    if (!std::isfinite(s.amplitude) || !std::isfinite(s.omega) ||
        !std::isfinite(s.lambda)) {
      throw Error(ErrorCode::InvalidArgument, "sine_decay parameters must be finite");
    }
  }
  void operator()(const SampledInput& s) const {
    if (s.t.empty()) {
      throw Error(ErrorCode::InvalidArgument, "sampled input has no samples");
    }
    if (s.values.rows() != m || s.values.cols() != static_cast<int>(s.t.size())) {
      throw Error(ErrorCode::InvalidArgument,
                  "sampled input values must be m x (number of samples)");
    }
    for (std::size_t k = 1; k < s.t.size(); ++k) {
      if (!(s.t[k] > s.t[k - 1])) {
        throw Error(ErrorCode::InvalidArgument,
                    "sampled input grid must be strictly increasing");
      }
    }
  }
};

}  // namespace

void validate_input(const InputSignal& input, int m) {
  std::visit(InputValidator{m}, input);
}

VectorXd input_value(const InputSignal& input, int m, double t) {
  struct Eval {
    int m;
    double t;
    VectorXd operator()(const ZeroInput&) const { return VectorXd::Zero(m); }
    VectorXd operator()(const ConstantInput& c) const { return c.value; }
    VectorXd operator()(const SineDecayInput& s) const {
      const double v = s.amplitude * std::sin(s.omega * t) * std::exp(-s.lambda * t);
      if (s.mask.size() == 0) return VectorXd::Constant(m, v);
      return s.mask * v;
    }
    VectorXd operator()(const SampledInput& s) const {
      if (t <= s.t.front()) return s.values.col(0);
      if (t >= s.t.back()) return s.values.col(s.values.cols() - 1);
      const auto hi = std::upper_bound(s.t.begin(), s.t.end(), t) - s.t.begin();
      const auto lo = hi - 1;
      const double w = (t - s.t[lo]) / (s.t[hi] - s.t[lo]);
      return (1.0 - w) * s.values.col(lo) + w * s.values.col(hi);
    }
  };
  return std::visit(Eval{m, t}, input);
}

VectorXd extended_input(const InputSignal& input, const SwitchingSignal& signal,
                        int m, int num_modes, double t) {
  const int q = signal.mode_at(t);
  if (q > num_modes) {
    throw Error(ErrorCode::InvalidArgument,
                "switching signal selects mode " + std::to_string(q) +
                    " but the model has " + std::to_string(num_modes));
  }
  VectorXd out = VectorXd::Zero(m + num_modes);
  out.head(m) = input_value(input, m, t);
  out(m + q - 1) = 1.0;
  return out;
}

}  // namespace swibal
