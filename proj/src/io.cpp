#include "swibal/io.hpp"

#include "swibal/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace swibal {

namespace {

Json matrix_to_json(const MatrixXd& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, what);
}

// `rows` x `cols` matrix; an empty array is accepted for zero rows.
MatrixXd matrix_from_json(const Json& j, int rows, int cols, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected a nested array");
  if (static_cast<int>(j.size()) != rows) {
    bad(where + ": expected " + std::to_string(rows) + " rows, got " +
        std::to_string(j.size()));
  }
  MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      bad(where + ": row " + std::to_string(i + 1) + " must have " +
          std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) {
      if (!row[c].is_number()) bad(where + ": non-numeric entry");
      M(i, c) = row[c].get<double>();
    }
  }
  return M;
}

VectorXd vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where + ": expected an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad(where + ": non-numeric entry");
    v(i) = j[i].get<double>();
  }
  return v;
}

int positive_int(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<int>() < 0) {
    bad(std::string("model: \"") + key + "\" must be a non-negative integer");
  }
  return j[key].get<int>();
}

}  // namespace

Json model_to_json(const LssModel& model, const std::optional<ReductionInfo>& info) {
  Json j;
  j["n"] = model.n;
  j["m"] = model.m;
  j["p"] = model.p;
  j["label"] = model.label;
  Json modes = Json::array();
  for (const Mode& md : model.modes) {
    modes.push_back({{"A", matrix_to_json(md.A)},
                     {"B", matrix_to_json(md.B)},
                     {"C", matrix_to_json(md.C)}});
  }
  j["modes"] = std::move(modes);
  if (info) {
    j["reduction"] = {{"gramians", info->gramians},
                      {"r", info->r},
                      {"hsv", vector_to_json(info->hsv)}};
  }
  return j;
}

LssModel model_from_json(const Json& j) {
  if (!j.is_object()) bad("model: expected a JSON object");
  LssModel model;
  model.n = positive_int(j, "n");
  model.m = positive_int(j, "m");
  model.p = positive_int(j, "p");
  if (model.n < 1 || model.m < 1 || model.p < 1) bad("model: n, m, p must be positive");
  if (j.contains("label") && j["label"].is_string()) model.label = j["label"];
  if (!j.contains("modes") || !j["modes"].is_array() || j["modes"].empty()) {
    bad("model: \"modes\" must be a non-empty array");
  }
  int id = 0;
  for (const Json& mj : j["modes"]) {
    ++id;
    const std::string where = "mode " + std::to_string(id);
    for (const char* key : {"A", "B", "C"}) {
      if (!mj.contains(key)) bad(where + ": missing \"" + key + "\"");
    }
    // Shapes come from the file so validate_model can name a mismatch.
    auto read = [&](const char* key) {
      const Json& mat = mj[key];
      if (!mat.is_array()) bad(where + "." + key + ": expected a nested array");
      const int rows = static_cast<int>(mat.size());
      const int cols = rows > 0 && mat[0].is_array() ? static_cast<int>(mat[0].size()) : 0;
      return matrix_from_json(mat, rows, cols, where + "." + key);
    };
    model.modes.push_back({read("A"), read("B"), read("C")});
  }
  return model;
}

std::optional<ReductionInfo> reduction_from_json(const Json& j) {
  if (!j.contains("reduction")) return std::nullopt;
  const Json& r = j["reduction"];
  ReductionInfo info;
  info.gramians = r.value("gramians", std::string{});
  info.r = r.value("r", 0);
  if (r.contains("hsv")) info.hsv = vector_from_json(r["hsv"], "reduction.hsv");
  return info;
}

// ---------------------------------------------------------------------------

Json scenario_to_json(const Scenario& s) {
  Json j;
  j["horizon"] = s.horizon;
  j["x0"] = vector_to_json(s.x0);
  Json sw = Json::array();
  for (const auto& seg : s.signal.segments()) {
    sw.push_back({{"t_end", seg.t_end}, {"mode", seg.mode}});
  }
  j["switching"] = std::move(sw);

  struct ToJson {
    Json operator()(const ZeroInput&) const { return {{"type", "zero"}}; }
    Json operator()(const ConstantInput& c) const {
      return {{"type", "constant"}, {"value", vector_to_json(c.value)}};
    }
    Json operator()(const SineDecayInput& sd) const {
      Json out = {{"type", "sine_decay"},
                  {"amplitude", sd.amplitude},
                  {"omega", sd.omega},
                  {"lambda", sd.lambda}};
      if (sd.mask.size() > 0) out["mask"] = vector_to_json(sd.mask);
      return out;
    }
    Json operator()(const SampledInput& sm) const {
      Json t = Json::array();
      for (double v : sm.t) t.push_back(v);
      return {{"type", "sampled"},
              {"t", std::move(t)},
              {"values", matrix_to_json(sm.values.transpose())}};
    }
  };
  j["input"] = std::visit(ToJson{}, s.input);
  return j;
}

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) bad("scenario: expected a JSON object");
  Scenario s;
  if (!j.contains("horizon") || !j["horizon"].is_number()) {
    bad("scenario: \"horizon\" is required");
  }
  s.horizon = j["horizon"].get<double>();
  if (!(s.horizon > 0.0)) bad("scenario: horizon must be positive");
  if (j.contains("x0")) s.x0 = vector_from_json(j["x0"], "scenario.x0");

  if (!j.contains("switching") || !j["switching"].is_array()) {
    bad("scenario: \"switching\" must be an array");
  }
  std::vector<SwitchingSignal::Segment> segs;
  for (const Json& seg : j["switching"]) {
    if (!seg.contains("t_end") || !seg.contains("mode") || !seg["mode"].is_number_integer()) {
      bad("scenario: switching entries need \"t_end\" and integer \"mode\"");
    }
    segs.push_back({seg["t_end"].get<double>(), seg["mode"].get<int>()});
  }
  s.signal = SwitchingSignal(std::move(segs));

  const Json in = j.value("input", Json{{"type", "zero"}});
  const std::string type = in.value("type", std::string{"zero"});
  if (type == "zero") {
    s.input = ZeroInput{};
  } else if (type == "constant") {
    s.input = ConstantInput{vector_from_json(in.at("value"), "input.value")};
  } else if (type == "sine_decay") {
    SineDecayInput sd;
    sd.amplitude = in.value("amplitude", 1.0);
    sd.omega = in.value("omega", 1.0);
    sd.lambda = in.value("lambda", 1.0);
    if (in.contains("mask")) sd.mask = vector_from_json(in["mask"], "input.mask");
    s.input = sd;
  } else if (type == "sampled") {
    SampledInput sm;
    if (!in.contains("t") || !in.contains("values")) {
      bad("input: sampled needs \"t\" and \"values\"");
    }
    for (const Json& v : in["t"]) sm.t.push_back(v.get<double>());
    const Json& vals = in["values"];
    const int rows = static_cast<int>(vals.size());
    const int cols = rows > 0 && vals[0].is_array() ? static_cast<int>(vals[0].size()) : 0;
    sm.values = matrix_from_json(vals, rows, cols, "input.values").transpose();
    s.input = sm;
  } else {
    bad("input: unknown type \"" + type + "\"");
  }
  return s;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string hsv_csv(const VectorXd& hsv) {
  std::string out = "index,sigma\n";
  for (Eigen::Index i = 0; i < hsv.size(); ++i) {
    out += std::to_string(i + 1) + "," + format_double(hsv(i)) + "\n";
  }
  return out;
}

VectorXd hsv_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) bad("hsv csv: malformed line \"" + line + "\"");
    vals.push_back(std::stod(line.substr(comma + 1)));
  }
  return Eigen::Map<VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::string trajectory_csv(const Trajectory& traj, bool include_state) {
  const bool with_x = include_state && traj.x.cols() == static_cast<Eigen::Index>(traj.t.size());
  std::string out = "t,mode";
  for (Eigen::Index i = 0; i < traj.y.rows(); ++i) out += ",y_" + std::to_string(i + 1);
  if (with_x) {
    for (Eigen::Index i = 0; i < traj.x.rows(); ++i) out += ",x_" + std::to_string(i + 1);
  }
  out += '\n';
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    out += format_double(traj.t[k]);
    out += ',';
    out += std::to_string(traj.mode[k]);
    for (Eigen::Index i = 0; i < traj.y.rows(); ++i) {
      out += ',';
      out += format_double(traj.y(i, k));
    }
    if (with_x) {
      for (Eigen::Index i = 0; i < traj.x.rows(); ++i) {
        out += ',';
        out += format_double(traj.x(i, k));
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace swibal
