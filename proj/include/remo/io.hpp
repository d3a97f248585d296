#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "remo/identification.hpp"

namespace remo {

using ordered_json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const ordered_json& require(const ordered_json& j, const std::string& key,
                                   const std::string& context) {
  if (!j.contains(key))
    throw ParseError(context + ": missing field '" + key + "'");
  return j.at(key);
}

inline Vector3d vec3_from_json(const ordered_json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError(context + ": expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline ordered_json vec3_to_json(const Vector3d& v) {
  return ordered_json::array({v[0], v[1], v[2]});
}

inline VectorXd vector_from_json(const ordered_json& j, const std::string& context) {
  if (!j.is_array()) throw ParseError(context + ": expected an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

inline ordered_json vector_to_json(const VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// Full-precision formatting; parses back to the identical double.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

// Writes via a temporary file and renames into place, so a failed run
// never leaves a partial output.
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Robot description

inline ordered_json robot_to_json(const RobotDescription& robot) {
  ordered_json j;
  j["name"] = robot.name;
  j["convention"] =
      robot.convention == DhConvention::Traditional ? "traditional" : "modified";
  j["sensor"] = robot.sensor_kind == SensorKind::Current ? "current" : "torque";
  j["gravity"] = detail::vec3_to_json(robot.gravity.g_vector);
  ordered_json links = ordered_json::array();
  for (int r = 0; r < robot.link_count(); ++r) {
    const DhRow& row = robot.dh_rows[r];
    ordered_json link;
    link["d"] = row.d;
    link["a"] = row.a;
    link["alpha"] = row.alpha;
    link["theta_offset"] = row.theta_offset;
    link["static"] = row.is_static;
    link["mass"] = robot.link_masses[r];
    link["com"] = detail::vec3_to_json(robot.link_coms[r]);
    links.push_back(std::move(link));
  }
  j["links"] = std::move(links);
  ordered_json payload;
  payload["mass"] = robot.payload.mass;
  payload["force"] = detail::vec3_to_json(robot.payload.force);
  payload["moment"] = detail::vec3_to_json(robot.payload.moment);
  j["payload"] = std::move(payload);
  if (robot.motor_constants)
    j["motor_constants"] = detail::vector_to_json(robot.motor_constants->k_m);
  return j;
}

inline RobotDescription robot_from_json(const ordered_json& j) {
  RobotDescription robot;
  robot.name = detail::require(j, "name", "robot").get<std::string>();
  const std::string conv =
      detail::require(j, "convention", "robot").get<std::string>();
  if (conv == "traditional")
    robot.convention = DhConvention::Traditional;
  else if (conv == "modified")
    robot.convention = DhConvention::Modified;
  else
    throw ParseError("robot: convention must be 'traditional' or 'modified'");
  const std::string sensor =
      detail::require(j, "sensor", "robot").get<std::string>();
  if (sensor == "current")
    robot.sensor_kind = SensorKind::Current;
  else if (sensor == "torque")
    robot.sensor_kind = SensorKind::Torque;
  else
    throw ParseError("robot: sensor must be 'current' or 'torque'");
  robot.gravity.g_vector =
      detail::vec3_from_json(detail::require(j, "gravity", "robot"), "gravity");
  const ordered_json& links = detail::require(j, "links", "robot");
  if (!links.is_array() || links.empty())
    throw ParseError("robot: 'links' must be a non-empty array");
  int idx = 0;
  for (const auto& link : links) {
    const std::string ctx = "links[" + std::to_string(idx) + "]";
    DhRow row;
    row.d = detail::require(link, "d", ctx).get<double>();
    row.a = detail::require(link, "a", ctx).get<double>();
    row.alpha = detail::require(link, "alpha", ctx).get<double>();
    row.theta_offset = link.value("theta_offset", 0.0);
    row.is_static = link.value("static", false);
    robot.dh_rows.push_back(row);
    robot.link_masses.push_back(detail::require(link, "mass", ctx).get<double>());
    robot.link_coms.push_back(
        detail::vec3_from_json(detail::require(link, "com", ctx), ctx + ".com"));
    ++idx;
  }
  if (j.contains("payload")) {
    const ordered_json& p = j.at("payload");
    robot.payload.mass = p.value("mass", 0.0);
    if (p.contains("force"))
      robot.payload.force = detail::vec3_from_json(p.at("force"), "payload.force");
    if (p.contains("moment"))
      robot.payload.moment =
          detail::vec3_from_json(p.at("moment"), "payload.moment");
  }
  if (j.contains("motor_constants"))
    robot.motor_constants = MotorConstants{
        detail::vector_from_json(j.at("motor_constants"), "motor_constants")};
  robot.validate();
  return robot;
}

inline RobotDescription load_robot_description(const std::filesystem::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return robot_from_json(j);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void save_robot_description(const RobotDescription& robot,
                                   const std::filesystem::path& path) {
  atomic_write(path, robot_to_json(robot).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Operational dataset: delimited text with a declared header. Columns
// are t, q_1..q_n, dq_1..dq_n, ddq_1..ddq_n, then optional meas_1..meas_n
// and power.

inline void save_dataset(const OperationalDataset& ds,
                         const std::filesystem::path& path) {
  const int n = ds.samples();
  const int dof = ds.width();
  std::string out;
  out.reserve(static_cast<std::size_t>(n) * (dof * 4 + 2) * 20);
  out += "t";
  for (const char* name : {"q", "dq", "ddq"})
    for (int j = 1; j <= dof; ++j)
      out += "," + std::string(name) + "_" + std::to_string(j);
  if (ds.has_meas())
    for (int j = 1; j <= dof; ++j) out += ",meas_" + std::to_string(j);
  if (ds.has_power()) out += ",power";
  out += "\n";
  for (int k = 0; k < n; ++k) {
    out += detail::fmt(ds.t[k]);
    for (int j = 0; j < dof; ++j) out += "," + detail::fmt(ds.q(k, j));
    for (int j = 0; j < dof; ++j) out += "," + detail::fmt(ds.dq(k, j));
    for (int j = 0; j < dof; ++j) out += "," + detail::fmt(ds.ddq(k, j));
    if (ds.has_meas())
      for (int j = 0; j < dof; ++j) out += "," + detail::fmt(ds.meas(k, j));
    if (ds.has_power()) out += "," + detail::fmt(ds.power[k]);
    out += "\n";
  }
  atomic_write(path, out);
}

inline OperationalDataset load_dataset(const std::filesystem::path& path,
                                       int dof) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto expect = [&](std::size_t pos, const std::string& name) {
    if (pos >= header.size() || header[pos] != name)
      throw ParseError(path.string() + ": expected column '" + name +
                       "' at position " + std::to_string(pos));
  };
  expect(0, "t");
  std::size_t pos = 1;
  for (const char* name : {"q", "dq", "ddq"})
    for (int j = 1; j <= dof; ++j)
      expect(pos++, std::string(name) + "_" + std::to_string(j));
  bool has_meas = pos < header.size() && header[pos] == "meas_1";
  if (has_meas)
    for (int j = 1; j <= dof; ++j) expect(pos++, "meas_" + std::to_string(j));
  bool has_power = pos < header.size() && header[pos] == "power";
  if (has_power) ++pos;
  if (pos != header.size())
    throw ParseError(path.string() + ": unexpected column '" + header[pos] + "'");

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(header.size());
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t consumed = 0;
        const double v = std::stod(cell, &consumed);
        if (consumed != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) +
                         ": bad numeric cell '" + cell + "'");
      }
    }
    if (row.size() != header.size())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected " + std::to_string(header.size()) +
                       " cells, got " + std::to_string(row.size()));
    for (double v : row)
      if (!std::isfinite(v))
        throw ParseError(path.string() + ":" + std::to_string(lineno) +
                         ": non-finite value");
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw ParseError(path.string() + ": no data rows");

  OperationalDataset ds;
  ds.t.resize(n);
  ds.q.resize(n, dof);
  ds.dq.resize(n, dof);
  ds.ddq.resize(n, dof);
  if (has_meas) ds.meas.resize(n, dof);
  if (has_power) ds.power.resize(n);
  for (int k = 0; k < n; ++k) {
    const auto& row = rows[k];
    std::size_t c = 0;
    ds.t[k] = row[c++];
    for (int j = 0; j < dof; ++j) ds.q(k, j) = row[c++];
    for (int j = 0; j < dof; ++j) ds.dq(k, j) = row[c++];
    for (int j = 0; j < dof; ++j) ds.ddq(k, j) = row[c++];
    if (has_meas)
      for (int j = 0; j < dof; ++j) ds.meas(k, j) = row[c++];
    if (has_power) ds.power[k] = row[c++];
  }
  for (int k = 1; k < n; ++k)
    if (!(ds.t[k] > ds.t[k - 1]))
      throw ParseError(path.string() + ": timestamps not strictly increasing at data row " +
                       std::to_string(k + 1));
  return ds;
}

// ---------------------------------------------------------------------------
// Sinusoid excitation spec

inline ordered_json sinusoid_spec_to_json(const SinusoidSpec& spec) {
  ordered_json j;
  j["duration"] = spec.duration;
  j["sample_rate"] = spec.sample_rate;
  ordered_json joints = ordered_json::array();
  for (int i = 0; i < spec.joints(); ++i) {
    ordered_json joint;
    joint["theta0"] = spec.theta0[i];
    joint["amplitude"] = spec.amplitude[i];
    joint["frequency"] = spec.frequency[i];
    joint["phase"] = spec.phase[i];
    joints.push_back(std::move(joint));
  }
  j["joints"] = std::move(joints);
  return j;
}

inline SinusoidSpec sinusoid_spec_from_json(const ordered_json& j) {
  SinusoidSpec spec;
  spec.duration = detail::require(j, "duration", "spec").get<double>();
  spec.sample_rate = detail::require(j, "sample_rate", "spec").get<double>();
  const ordered_json& joints = detail::require(j, "joints", "spec");
  const int n = static_cast<int>(joints.size());
  spec.theta0.resize(n);
  spec.amplitude.resize(n);
  spec.frequency.resize(n);
  spec.phase.resize(n);
  for (int i = 0; i < n; ++i) {
    const std::string ctx = "joints[" + std::to_string(i) + "]";
    spec.theta0[i] = detail::require(joints[i], "theta0", ctx).get<double>();
    spec.amplitude[i] = detail::require(joints[i], "amplitude", ctx).get<double>();
    spec.frequency[i] = detail::require(joints[i], "frequency", ctx).get<double>();
    spec.phase[i] = detail::require(joints[i], "phase", ctx).get<double>();
  }
  spec.validate();
  return spec;
}

inline SinusoidSpec load_sinusoid_spec(const std::filesystem::path& path) {
  try {
    return sinusoid_spec_from_json(ordered_json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void save_sinusoid_spec(const SinusoidSpec& spec,
                               const std::filesystem::path& path) {
  atomic_write(path, sinusoid_spec_to_json(spec).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Ground-truth parameters for the synthetic generator

struct TruthParameters {
  std::vector<std::array<double, 6>> inertia;  // xx,yy,zz,xy,xz,yz per link
  VectorXd viscous;
  VectorXd coulomb;
  PowerParameters power;

  // Layout-ordered global vector (payload entries, when present in the
  // layout, are zero).
  VectorXd dynamic_vector(const ParameterLayout& layout) const {
    VectorXd v = VectorXd::Zero(layout.total_count());
    for (int k = 0; k < layout.total_count(); ++k) {
      const ParamDescriptor& d = layout.entries[k];
      switch (d.kind) {
        case ParamKind::Inertia: v[k] = inertia[d.index][d.component]; break;
        case ParamKind::Viscous: v[k] = viscous[d.index]; break;
        case ParamKind::Coulomb: v[k] = coulomb[d.index]; break;
        default: break;
      }
    }
    return v;
  }
};

inline ordered_json truth_to_json(const TruthParameters& truth) {
  ordered_json j;
  ordered_json inertia = ordered_json::array();
  for (const auto& I : truth.inertia)
    inertia.push_back(ordered_json::array({I[0], I[1], I[2], I[3], I[4], I[5]}));
  j["inertia"] = std::move(inertia);
  j["viscous"] = detail::vector_to_json(truth.viscous);
  j["coulomb"] = detail::vector_to_json(truth.coulomb);
  ordered_json power;
  power["constant"] = truth.power.k[0];
  ordered_json joints = ordered_json::array();
  for (int i = 0; i < truth.power.dof(); ++i) {
    ordered_json joint;
    joint["inductance"] = truth.power.k[1 + 4 * i + 0];
    joint["resistance"] = truth.power.k[1 + 4 * i + 1];
    joint["back_emf"] = truth.power.k[1 + 4 * i + 2];
    joint["driver"] = truth.power.k[1 + 4 * i + 3];
    joints.push_back(std::move(joint));
  }
  power["joints"] = std::move(joints);
  j["power"] = std::move(power);
  return j;
}

inline TruthParameters truth_from_json(const ordered_json& j) {
  TruthParameters truth;
  const ordered_json& inertia = detail::require(j, "inertia", "truth");
  for (const auto& row : inertia) {
    if (!row.is_array() || row.size() != 6)
      throw ParseError("truth: each inertia entry needs 6 components");
    std::array<double, 6> I;
    for (int c = 0; c < 6; ++c) I[c] = row[c].get<double>();
    truth.inertia.push_back(I);
  }
  truth.viscous =
      detail::vector_from_json(detail::require(j, "viscous", "truth"), "viscous");
  truth.coulomb =
      detail::vector_from_json(detail::require(j, "coulomb", "truth"), "coulomb");
  const ordered_json& power = detail::require(j, "power", "truth");
  const ordered_json& joints = detail::require(power, "joints", "truth.power");
  const int dof = static_cast<int>(joints.size());
  truth.power.k.resize(1 + 4 * dof);
  truth.power.k[0] = detail::require(power, "constant", "truth.power").get<double>();
  for (int i = 0; i < dof; ++i) {
    const std::string ctx = "power.joints[" + std::to_string(i) + "]";
    truth.power.k[1 + 4 * i + 0] =
        detail::require(joints[i], "inductance", ctx).get<double>();
    truth.power.k[1 + 4 * i + 1] =
        detail::require(joints[i], "resistance", ctx).get<double>();
    truth.power.k[1 + 4 * i + 2] =
        detail::require(joints[i], "back_emf", ctx).get<double>();
    truth.power.k[1 + 4 * i + 3] =
        detail::require(joints[i], "driver", ctx).get<double>();
  }
  return truth;
}

inline TruthParameters load_truth(const std::filesystem::path& path) {
  try {
    return truth_from_json(ordered_json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void save_truth(const TruthParameters& truth,
                       const std::filesystem::path& path) {
  atomic_write(path, truth_to_json(truth).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Trained model file, versioned. Unknown top-level fields are rejected
// rather than ignored so a newer format cannot be half-read.

inline constexpr int kModelFormatVersion = 1;

inline ordered_json layout_to_json(const ParameterLayout& layout) {
  ordered_json j;
  j["estimate_payload"] = layout.estimate_payload;
  ordered_json entries = ordered_json::array();
  for (const auto& e : layout.entries) entries.push_back(e.label());
  j["entries"] = std::move(entries);
  return j;
}

inline ordered_json fit_report_to_json(const LeastSquaresReport& r) {
  ordered_json j;
  j["residual_rms"] = r.residual_rms;
  j["rank"] = r.rank;
  j["condition_estimate"] = r.condition_estimate;
  j["underdetermined"] = r.underdetermined;
  return j;
}

inline LeastSquaresReport fit_report_from_json(const ordered_json& j) {
  LeastSquaresReport r;
  r.residual_rms = j.value("residual_rms", 0.0);
  r.rank = j.value("rank", 0);
  r.condition_estimate = j.value("condition_estimate", 0.0);
  r.underdetermined = j.value("underdetermined", false);
  return r;
}

inline ordered_json model_to_json(const TrainedModel& model) {
  ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["name"] = model.name;
  j["robot"] = robot_to_json(model.robot);
  j["layout"] = layout_to_json(model.layout);
  ordered_json dyn = ordered_json::array();
  for (const auto& k : model.dynamic_params.per_joint)
    dyn.push_back(detail::vector_to_json(k));
  j["dynamic_params"] = std::move(dyn);
  j["power_params"] = detail::vector_to_json(model.power_params.k);
  j["back_emf_form"] =
      model.emf_form == BackEmfForm::Signed ? "signed" : "abs";
  ordered_json training;
  training["sample_count"] = model.meta.sample_count;
  training["t_begin"] = model.meta.t_begin;
  training["t_end"] = model.meta.t_end;
  ordered_json fits = ordered_json::array();
  for (const auto& r : model.joint_reports) fits.push_back(fit_report_to_json(r));
  training["joint_fits"] = std::move(fits);
  training["power_fit"] = fit_report_to_json(model.power_report);
  j["training"] = std::move(training);
  return j;
}

inline TrainedModel model_from_json(const ordered_json& j) {
  static const std::vector<std::string> known = {
      "format_version", "name",         "robot",        "layout",
      "dynamic_params", "power_params", "back_emf_form", "training"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ParseError("model: unknown field '" + it.key() + "'");
  const int version = detail::require(j, "format_version", "model").get<int>();
  if (version != kModelFormatVersion)
    throw ParseError("model: unsupported format version " +
                     std::to_string(version));

  TrainedModel model;
  model.name = detail::require(j, "name", "model").get<std::string>();
  model.robot = robot_from_json(detail::require(j, "robot", "model"));
  const ordered_json& jl = detail::require(j, "layout", "model");
  model.layout = build_layout(model.robot, jl.value("estimate_payload", false));
  // Column ordering is part of the format: verify the stored labels.
  const ordered_json& entries = detail::require(jl, "entries", "model.layout");
  if (static_cast<int>(entries.size()) != model.layout.total_count())
    throw ParseError("model: layout entry count mismatch");
  for (int k = 0; k < model.layout.total_count(); ++k)
    if (entries[k].get<std::string>() != model.layout.entries[k].label())
      throw ParseError("model: layout entry " + std::to_string(k) +
                       " is '" + entries[k].get<std::string>() + "', expected '" +
                       model.layout.entries[k].label() + "'");

  const ordered_json& dyn = detail::require(j, "dynamic_params", "model");
  if (static_cast<int>(dyn.size()) != model.robot.dof())
    throw ParseError("model: dynamic_params joint count mismatch");
  model.dynamic_params.layout = model.layout;
  for (const auto& kj : dyn) {
    VectorXd k = detail::vector_from_json(kj, "dynamic_params");
    if (k.size() != model.layout.total_count())
      throw ParseError("model: dynamic parameter vector length mismatch");
    model.dynamic_params.per_joint.push_back(std::move(k));
  }
  model.power_params.k = detail::vector_from_json(
      detail::require(j, "power_params", "model"), "power_params");
  model.power_params.validate(model.robot.dof());
  const std::string emf =
      detail::require(j, "back_emf_form", "model").get<std::string>();
  if (emf == "signed")
    model.emf_form = BackEmfForm::Signed;
  else if (emf == "abs")
    model.emf_form = BackEmfForm::Abs;
  else
    throw ParseError("model: back_emf_form must be 'signed' or 'abs'");
  const ordered_json& training = detail::require(j, "training", "model");
  model.meta.sample_count = training.value("sample_count", std::size_t{0});
  model.meta.t_begin = training.value("t_begin", 0.0);
  model.meta.t_end = training.value("t_end", 0.0);
  if (training.contains("joint_fits"))
    for (const auto& r : training.at("joint_fits"))
      model.joint_reports.push_back(fit_report_from_json(r));
  if (training.contains("power_fit"))
    model.power_report = fit_report_from_json(training.at("power_fit"));
  return model;
}

inline TrainedModel load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(ordered_json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void save_model(const TrainedModel& model,
                       const std::filesystem::path& path) {
  atomic_write(path, model_to_json(model).dump(2) + "\n");
}

}  // namespace remo
