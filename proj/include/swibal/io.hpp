#pragma once

#include "swibal/model.hpp"
#include "swibal/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace swibal {

using Json = nlohmann::json;

/// Optional metadata stored next to a reduced model under "reduction".
struct ReductionInfo {
  std::string gramians;  // "generalized" or "averaged"
  int r = 0;
  VectorXd hsv;
};

// Model JSON:
//   {"n":..,"m":..,"p":..,"modes":[{"A":[[..]],"B":[[..]],"C":[[..]]},..],"label":".."}
// Matrices are row-major nested arrays. Doubles are written in shortest
// round-trip form, so write-then-read is lossless.
Json model_to_json(const LssModel& model, const std::optional<ReductionInfo>& info = {});
LssModel model_from_json(const Json& j);
std::optional<ReductionInfo> reduction_from_json(const Json& j);

// Scenario JSON:
//   {"horizon":..,"x0":[..],"switching":[{"t_end":..,"mode":..},..],
//    "input":{"type":"zero"|"constant"|"sine_decay"|"sampled", ...}}
Json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string hsv_csv(const VectorXd& hsv);
VectorXd hsv_from_csv(const std::string& text);

/// Header `t,mode,y_1..y_p` and, with include_state, `x_1..x_n`.
std::string trajectory_csv(const Trajectory& traj, bool include_state = false);

}  // namespace swibal
