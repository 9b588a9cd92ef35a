#include "cli.hpp"

#include "swibal/balred.hpp"
#include "swibal/builtin.hpp"
#include "swibal/error.hpp"
#include "swibal/gramians.hpp"
#include "swibal/io.hpp"
#include "swibal/oracle.hpp"
#include "swibal/random_models.hpp"
#include "swibal/sim.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>

namespace swibal::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string out_dir = ".";
  double rtol = kRankTol;
  std::string method = "auto";
  int kron_cap = 64;
  double h = 1e-3;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("swibal", sink);
  log->set_pattern("[%l] %v");
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("SWIBAL_LOG")) {
    const std::string v = env;
    level = spdlog::level::from_str(v);
    if (level == spdlog::level::off && v != "off") level = spdlog::level::warn;
  }
  log->set_level(level);
  return log;
}

GenSolveOptions solve_options(const Common& c) {
  GenSolveOptions o;
  if (c.method == "kron") {
    o.method = GenMethod::Kronecker;
  } else if (c.method == "fixedpoint") {
    o.method = GenMethod::FixedPoint;
  } else {
    o.method = GenMethod::Auto;
  }
  o.kron_cap = c.kron_cap;
  return o;
}

LssModel load_model(const std::string& path) {
  LssModel model = model_from_json(read_json(path));
  require_consistent(model);
  return model;
}

void check_scenario(const LssModel& model, const Scenario& s) {
  if (s.signal.empty()) throw UsageError("scenario has no switching segments");
  if (s.signal.max_mode() > model.num_modes()) {
    throw UsageError(fmt::format("scenario uses mode {} but the model has {} modes",
                                 s.signal.max_mode(), model.num_modes()));
  }
  validate_input(s.input, model.m);
  if (s.x0.size() != 0 && s.x0.size() != model.n) {
    throw UsageError(fmt::format("x0 has {} entries, expected {}", s.x0.size(), model.n));
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string rank_phrase(bool verdict, const char* what, int rank, int n) {
  return fmt::format("{}completely {} (rank {}/{})", verdict ? "" : "not ", what, rank, n);
}

Json report_json(const GenSolveReport& r) {
  return {{"method", std::string(method_name(r.method))},
          {"iterations", r.iterations},
          {"residual", r.residual},
          {"converged", r.converged}};
}

// ---------------------------------------------------------------------------

int cmd_analyze(const Common& c, const std::string& path, std::ostream& out,
                spdlog::logger& log) {
  const LssModel model = load_model(path);
  for (const Diagnostic& d : validate_model(model)) log.warn("{}", d.message);
  const GenSolveOptions opts = solve_options(c);

  const GramianResult P = reach_gramian(model, opts);
  log.info("reachability Gramian: {} after {} iterations", method_name(P.report.method),
           P.report.iterations);
  const GramianResult Q = obs_gramian(model, opts);
  const SubspaceBasis rp = reachable_subspace(model, opts, c.rtol);
  const SubspaceBasis rq = observable_subspace(model, opts, c.rtol);
  const BilinearEmbedding emb = bilinear_embed(model);
  const ExistenceDiagnostic ex = existence_margin(emb.A, emb.D);

  Json j;
  j["label"] = model.label;
  j["n"] = model.n;
  j["modes"] = model.num_modes();
  j["reachability"] = {{"rank", rp.rank},
                       {"completely_reachable", rp.rank == model.n},
                       {"solver", report_json(P.report)}};
  j["observability"] = {{"rank", rq.rank},
                        {"completely_observable", rq.rank == model.n},
                        {"solver", report_json(Q.report)}};
  j["existence"] = {{"alpha", ex.alpha}, {"beta", ex.beta},   {"lhs", ex.lhs},
                    {"rhs", ex.rhs},     {"satisfied", ex.satisfied},
                    {"heuristic", ex.heuristic}};

  out << fmt::format("model {} (n = {}, m = {}, p = {}, M = {})\n", model.label, model.n,
                     model.m, model.p, model.num_modes());
  out << fmt::format("reachability Gramian: {} iterations ({}), residual {:.3g}\n",
                     P.report.iterations, method_name(P.report.method), P.report.residual);
  out << fmt::format("observability Gramian: {} iterations ({}), residual {:.3g}\n",
                     Q.report.iterations, method_name(Q.report.method), Q.report.residual);
  out << "reachability: " << rank_phrase(rp.rank == model.n, "reachable", rp.rank, model.n)
      << "\n";
  out << "observability: "
      << rank_phrase(rq.rank == model.n, "observable", rq.rank, model.n) << "\n";
  out << fmt::format("existence margin: ||sum D_j D_j^T|| = {:.4g} {} 2 alpha / beta^2 = {:.4g}"
                     " (alpha {:.4g}, beta {:.4g}{})\n",
                     ex.lhs, ex.satisfied ? "<" : ">=", ex.rhs, ex.alpha, ex.beta,
                     ex.heuristic ? ", sampled" : "");

  try {
    const AveragedGramians avg = averaged_gramians(model);
    const SubspaceBasis ap = range_basis(avg.P, c.rtol);
    const SubspaceBasis aq = range_basis(avg.Q, c.rtol);
    const bool pin = subspace_contains(ap, rp);
    const bool qin = subspace_contains(aq, rq);
    j["averaged"] = {{"reach_rank", ap.rank},
                     {"obs_rank", aq.rank},
                     {"reach_contained", pin},
                     {"obs_contained", qin}};
    out << fmt::format("averaged Gramians: rank {} / {}; range(P_avg) in range(P): {};"
                       " range(Q_avg) in range(Q): {}\n",
                       ap.rank, aq.rank, pin ? "yes" : "no", qin ? "yes" : "no");
  } catch (const Error& e) {
    j["averaged"] = {{"error", e.what()}};
    out << "averaged Gramians: unavailable (" << e.what() << ")\n";
  }
  write_text_atomic(fs::path(c.out_dir) / "analysis.json", dump(j));
  return kOk;
}

int cmd_reduce(const Common& c, const std::string& path, std::optional<int> r,
               std::optional<double> tol, const std::string& baseline, std::ostream& out,
               spdlog::logger& log) {
  if (r.has_value() == tol.has_value()) throw UsageError("give exactly one of --r and --tol");
  if (!baseline.empty() && baseline != "averaged") {
    throw UsageError("--baseline only accepts \"averaged\"");
  }
  const LssModel model = load_model(path);
  const Truncation trunc = r ? Truncation{TruncationOrder{*r}} : Truncation{EnergyTolerance{*tol}};

  BalancedReduction red;
  std::string source;
  if (baseline == "averaged") {
    source = "averaged";
    const AveragedFactors f = averaged_factors(model);
    red = balance_truncate_factors(model, f.S, f.R, trunc, c.rtol);
  } else {
    source = "generalized";
    const GenSolveOptions opts = solve_options(c);
    const GramianResult P = reach_gramian(model, opts);
    const GramianResult Q = obs_gramian(model, opts);
    red = balance_truncate(model, P.matrix, Q.matrix, trunc, c.rtol);
  }
  for (const auto& w : red.warnings) log.warn("{}", w);
  for (const Diagnostic& d : validate_model(red.reduced)) log.warn("reduced model: {}", d.message);

  const fs::path dir(c.out_dir);
  write_text_atomic(dir / "reduced.json",
                    dump(model_to_json(red.reduced, ReductionInfo{source, red.r, red.hsv})));
  write_text_atomic(dir / "hsv.csv", hsv_csv(red.hsv));
  std::string bound = fmt::format("gramians {}\nr {}\ntail_sum {}\nbound_coefficient {}\n",
                                  source, red.r, format_double(0.5 * red.bound_coefficient),
                                  format_double(red.bound_coefficient));
  bound += "# ||y - y_r||_L2 <= bound_coefficient * ||u||_L2\n";
  for (const auto& w : red.warnings) bound += "warning " + w + "\n";
  write_text_atomic(dir / "bound.txt", bound);

  out << fmt::format("reduced {} -> {} states ({} Gramians), bound coefficient {:.4g}\n",
                     model.n, red.r, source, red.bound_coefficient);
  return kOk;
}

int cmd_simulate(const Common& c, const std::string& model_path,
                 const std::string& scenario_path, bool states, std::ostream& out) {
  const LssModel model = load_model(model_path);
  const Scenario s = scenario_from_json(read_json(scenario_path));
  check_scenario(model, s);
  const Trajectory traj = simulate_switched(model, s, {c.h, states});
  write_text_atomic(fs::path(c.out_dir) / "trajectory.csv", trajectory_csv(traj, states));
  out << fmt::format("{} samples on [0, {}], ||y||_L2 = {:.6g}\n", traj.t.size(), s.horizon,
                     l2_norm_output(traj));
  return kOk;
}

int cmd_compare(const Common& c, const std::vector<std::string>& files, std::ostream& out) {
  if (files.size() < 3 || files.size() > 4) {
    throw UsageError("compare takes MODEL REDUCED [REDUCED2] SCENARIO");
  }
  const LssModel model = load_model(files.front());
  const Scenario s = scenario_from_json(read_json(files.back()));
  check_scenario(model, s);
  const double u_l2 = l2_norm_input(s.input, model.m, s.horizon);

  std::string csv = "reduced,r,gramians,l2_error,linf_error,bound,bound_satisfied\n";
  out << fmt::format("||u||_L2[0,{}] = {:.6g}\n", s.horizon, u_l2);
  for (std::size_t k = 1; k + 1 < files.size(); ++k) {
    const Json j = read_json(files[k]);
    LssModel reduced = model_from_json(j);
    require_consistent(reduced);
    const auto info = reduction_from_json(j);
    std::optional<VectorXd> hsv;
    if (info && info->hsv.size() > 0 && info->r == reduced.n) hsv = info->hsv;
    const ErrorSummary e = output_error(model, reduced, s, c.h, hsv);
    const std::string gram = info ? info->gramians : "";
    csv += fmt::format("{},{},{},{},{},{},{}\n", fs::path(files[k]).filename().string(),
                       reduced.n, gram, format_double(e.l2_error), format_double(e.linf_error),
                       e.bound ? format_double(*e.bound) : "",
                       e.bound ? (e.bound_satisfied ? "true" : "false") : "");
    out << fmt::format("{}: r = {}, ||y - y_r||_L2 = {:.4g}", files[k], reduced.n, e.l2_error);
    if (e.bound) {
      out << fmt::format(", bound {:.4g} {}", *e.bound,
                         e.bound_satisfied ? "satisfied" : "VIOLATED");
    }
    out << "\n";
  }
  write_text_atomic(fs::path(c.out_dir) / "comparison.csv", csv);
  return kOk;
}

struct OracleCheck {
  int rank = 0;
  int oracle_rank = 0;
  double angle = 0.0;
  bool match = false;
};

OracleCheck check_space(const SubspaceBasis& gram, const ClosureResult& closure) {
  OracleCheck o;
  o.rank = gram.rank;
  o.oracle_rank = closure.basis.rank;
  o.angle = max_principal_angle(gram, closure.basis);
  o.match = o.rank == o.oracle_rank && o.angle < 1e-8;
  return o;
}

std::pair<OracleCheck, OracleCheck> oracle_pair(const LssModel& model, const Common& c) {
  const GenSolveOptions opts = solve_options(c);
  const SubspaceBasis rp = reachable_subspace(model, opts, c.rtol);
  const SubspaceBasis rq = observable_subspace(model, opts, c.rtol);
  return {check_space(rp, reachable_space_bruteforce(model)),
          check_space(rq, observable_space_bruteforce(model))};
}

std::string describe(const OracleCheck& o) {
  if (o.match) {
    return fmt::format("MATCH: rank {}, max principal angle {:.2g} < 1e-8", o.rank, o.angle);
  }
  return fmt::format("MISMATCH: Gramian rank {}, closure rank {}, max principal angle {:.2g}",
                     o.rank, o.oracle_rank, o.angle);
}

int cmd_oracle(const Common& c, const std::string& path, int sweep, std::uint64_t seed,
               std::ostream& out, spdlog::logger& log) {
  if (!path.empty()) {
    const auto [reach, obs] = oracle_pair(load_model(path), c);
    out << "reachable: " << describe(reach) << "\n";
    out << "observable: " << describe(obs) << "\n";
    return reach.match && obs.match ? kOk : kNumerical;
  }
  if (sweep < 1) throw UsageError("oracle needs a MODEL file or --sweep N");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dn(2, 8), dM(1, 3), dio(1, 2);
  std::string csv =
      "instance,n,modes,structured,reach_rank,reach_oracle_rank,reach_angle,"
      "obs_rank,obs_oracle_rank,obs_angle,match\n";
  int mismatches = 0;
  for (int k = 0; k < sweep; ++k) {
    RandomModelSpec spec;
    spec.n = dn(rng);
    spec.modes = dM(rng);
    spec.m = dio(rng);
    spec.p = dio(rng);
    spec.kalman_structure = k % 2 == 1;
    const LssModel model = random_model(rng, spec);
    const auto [reach, obs] = oracle_pair(model, c);
    const bool match = reach.match && obs.match;
    if (!match) {
      ++mismatches;
      log.warn("instance {}: reachable {}; observable {}", k, describe(reach), describe(obs));
    }
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", k, spec.n, spec.modes,
                       spec.kalman_structure ? 1 : 0, reach.rank, reach.oracle_rank,
                       format_double(reach.angle), obs.rank, obs.oracle_rank,
                       format_double(obs.angle), match ? "true" : "false");
  }
  write_text_atomic(fs::path(c.out_dir) / "oracle_sweep.csv", csv);
  out << fmt::format("{} instances, {} mismatches (seed {})\n", sweep, mismatches, seed);
  return mismatches == 0 ? kOk : kNumerical;
}

int cmd_example(const Common& c, const std::string& name, int n, std::ostream& out) {
  const fs::path dir(c.out_dir);
  if (name == "example1") {
    write_text_atomic(dir / "model.json", dump(model_to_json(example1())));
    out << "wrote " << (dir / "model.json").string() << "\n";
  } else if (name == "example2") {
    write_text_atomic(dir / "model.json", dump(model_to_json(example2(n))));
    write_text_atomic(dir / "scenario.json", dump(scenario_to_json(example2_scenario())));
    out << "wrote " << (dir / "model.json").string() << " and "
        << (dir / "scenario.json").string() << "\n";
  } else {
    throw UsageError("unknown example \"" + name + "\" (example1 | example2)");
  }
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool solver, bool step) {
  sub->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
  if (solver) {
    sub->add_option("--rtol", c.rtol, "Relative rank tolerance")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sub->add_option("--method", c.method, "Generalized Lyapunov solver")
        ->check(CLI::IsMember({"kron", "fixedpoint", "auto"}))
        ->capture_default_str();
    sub->add_option("--kron-cap", c.kron_cap, "Largest n for the Kronecker solve")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  if (step) {
    sub->set_help_flag("--help", "Print this help message and exit");
    sub->add_option("--h", c.h, "Integrator step (s)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);

  CLI::App app{"Gramians, reachability and balanced truncation for linear switched systems",
               "swibal"};
  app.require_subcommand(1);
  Common c;

  std::string model_path, scenario_path, name = "example1", baseline;
  std::vector<std::string> files;
  std::optional<int> r;
  std::optional<double> tol;
  bool states = false;
  int sweep = 0, n = 100;
  std::uint64_t seed = 1;

  auto* analyze = app.add_subcommand("analyze", "Gramians, ranks and reachability verdicts");
  analyze->add_option("model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  add_common(analyze, c, true, false);

  auto* reduce = app.add_subcommand("reduce", "Balanced truncation");
  reduce->add_option("model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  reduce->add_option("--r", r, "Reduced order");
  reduce->add_option("--tol", tol, "Relative tail-sum tolerance for choosing r");
  reduce->add_option("--baseline", baseline, "Use averaged per-mode Gramians")
      ->check(CLI::IsMember({"averaged"}));
  add_common(reduce, c, true, false);

  auto* simulate = app.add_subcommand("simulate", "Time-domain simulation");
  simulate->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  simulate->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);
  simulate->add_flag("--states", states, "Include x_1..x_n columns");
  add_common(simulate, c, false, true);

  auto* compare = app.add_subcommand("compare", "Output error of reduced models");
  compare->add_option("files", files, "MODEL REDUCED [REDUCED2] SCENARIO")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(compare, c, false, true);

  auto* oracle = app.add_subcommand("oracle", "Gramian ranges against subspace closures");
  oracle->add_option("model", model_path)->check(CLI::ExistingFile);
  oracle->add_option("--sweep", sweep, "Number of random instances");
  oracle->add_option("--seed", seed, "Seed for --sweep")->capture_default_str();
  add_common(oracle, c, true, false);

  auto* example = app.add_subcommand("example", "Write a built-in model");
  example->add_option("name", name, "example1 | example2")
      ->required()
      ->check(CLI::IsMember({"example1", "example2"}));
  example->add_option("--n", n, "State dimension of example2")
      ->check(CLI::Range(4, 100000))
      ->capture_default_str();
  add_common(example, c, false, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) return cmd_analyze(c, model_path, out, *log);
    if (*reduce) return cmd_reduce(c, model_path, r, tol, baseline, out, *log);
    if (*simulate) return cmd_simulate(c, model_path, scenario_path, states, out);
    if (*compare) return cmd_compare(c, files, out);
    if (*oracle) return cmd_oracle(c, model_path, sweep, seed, out, *log);
    if (*example) return cmd_example(c, name, n, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << "\n";
    return e.numerical() ? kNumerical : kUsage;
  } catch (const Json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace swibal::cli
