#pragma once

#include "remo/dynamics.hpp"

namespace remo {

enum class ParamKind { Inertia, Viscous, Coulomb, PayloadForce, PayloadMoment };

// Symmetric-tensor component order for the six inertia unknowns.
inline constexpr const char* kInertiaComponents[6] = {"xx", "yy", "zz",
                                                      "xy", "xz", "yz"};

struct ParamDescriptor {
  ParamKind kind;
  int index;      // DH row for Inertia, joint for friction, axis for payload
  int component;  // 0..5 for Inertia, 0..2 for payload, unused otherwise

  std::string label() const {
    switch (kind) {
      case ParamKind::Inertia:
        return "I" + std::string(kInertiaComponents[component]) + "_" +
               std::to_string(index + 1);
      case ParamKind::Viscous:
        return "kv_" + std::to_string(index + 1);
      case ParamKind::Coulomb:
        return "ks_" + std::to_string(index + 1);
      case ParamKind::PayloadForce:
        return std::string("f_payload_") + "xyz"[component];
      case ParamKind::PayloadMoment:
        return std::string("m_payload_") + "xyz"[component];
    }
    return "?";
  }

  bool operator==(const ParamDescriptor&) const = default;
};

// Ordered global unknown vector: 6 inertia components per link, then
// k_v and k_s per actuated joint, then the optional payload wrench.
// The order is a deterministic function of the robot description and
// the payload flag; it is part of the model file format.
struct ParameterLayout {
  std::vector<ParamDescriptor> entries;
  bool estimate_payload = false;

  int total_count() const { return static_cast<int>(entries.size()); }

  bool operator==(const ParameterLayout&) const = default;
};

inline ParameterLayout build_layout(const RobotDescription& robot,
                                    bool estimate_payload = false) {
  ParameterLayout layout;
  layout.estimate_payload = estimate_payload;
  for (int r = 0; r < robot.link_count(); ++r)
    for (int c = 0; c < 6; ++c)
      layout.entries.push_back({ParamKind::Inertia, r, c});
  for (int j = 0; j < robot.dof(); ++j) {
    layout.entries.push_back({ParamKind::Viscous, j, 0});
    layout.entries.push_back({ParamKind::Coulomb, j, 0});
  }
  if (estimate_payload) {
    for (int c = 0; c < 3; ++c)
      layout.entries.push_back({ParamKind::PayloadForce, c, c});
    for (int c = 0; c < 3; ++c)
      layout.entries.push_back({ParamKind::PayloadMoment, c, c});
  }
  return layout;
}

inline Matrix3d symmetric_inertia(double xx, double yy, double zz, double xy,
                                  double xz, double yz) {
  Matrix3d I;
  I << xx, xy, xz,
       xy, yy, yz,
       xz, yz, zz;
  return I;
}

// Materialize the physical quantities described by a layout-ordered
// parameter vector. With payload estimation the wrench unknowns replace
// the description's wrench; the payload mass stays known either way.
inline PhysicalParameters unpack_parameters(const RobotDescription& robot,
                                            const ParameterLayout& layout,
                                            const VectorXd& params) {
  if (params.size() != layout.total_count())
    throw std::invalid_argument("parameter vector length " +
                                std::to_string(params.size()) +
                                " does not match layout count " +
                                std::to_string(layout.total_count()));
  PhysicalParameters phys;
  phys.inertias.assign(robot.link_count(), Matrix3d::Zero());
  phys.friction.k_v = VectorXd::Zero(robot.dof());
  phys.friction.k_s = VectorXd::Zero(robot.dof());
  phys.payload = robot.payload;
  if (layout.estimate_payload) {
    phys.payload.force.setZero();
    phys.payload.moment.setZero();
  }
  for (int k = 0; k < layout.total_count(); ++k) {
    const ParamDescriptor& d = layout.entries[k];
    const double v = params[k];
    switch (d.kind) {
      case ParamKind::Inertia: {
        Matrix3d& I = phys.inertias[d.index];
        switch (d.component) {
          case 0: I(0, 0) = v; break;
          case 1: I(1, 1) = v; break;
          case 2: I(2, 2) = v; break;
          case 3: I(0, 1) = I(1, 0) = v; break;
          case 4: I(0, 2) = I(2, 0) = v; break;
          case 5: I(1, 2) = I(2, 1) = v; break;
        }
        break;
      }
      case ParamKind::Viscous: phys.friction.k_v[d.index] = v; break;
      case ParamKind::Coulomb: phys.friction.k_s[d.index] = v; break;
      case ParamKind::PayloadForce: phys.payload.force[d.component] += v; break;
      case ParamKind::PayloadMoment: phys.payload.moment[d.component] += v; break;
    }
  }
  return phys;
}

inline VectorXd inverse_dynamics(const RobotDescription& robot,
                                 const ParameterLayout& layout,
                                 const VectorXd& params,
                                 const JointState& state) {
  return inverse_dynamics(robot, unpack_parameters(robot, layout, params),
                          state);
}

// All joints' regressor rows for one sample. offset[j] is the model
// output with every unknown zeroed (the mass/geometry term); column k
// of coeffs is the output change under a unit value of unknown k.
struct RegressorBatch {
  VectorXd offset;
  MatrixXd coeffs;  // DoF x total_count
};

struct RegressorRow {
  double known_offset = 0.0;
  VectorXd coefficients;
};

namespace detail {

// Torque/current evaluation reusing a precomputed forward recursion.
inline VectorXd eval_with_kinematics(const RobotDescription& robot,
                                     const std::vector<LinkKinematics>& kin,
                                     const PhysicalParameters& phys,
                                     const VectorXd& dq) {
  const auto chain = backward_recursion(robot, kin, phys.payload, phys.inertias);
  VectorXd tau = joint_torques(chain, kin, phys.friction, dq);
  if (robot.sensor_kind == SensorKind::Current)
    return joint_currents(tau, *robot.motor_constants);
  return tau;
}

}  // namespace detail

// Basis-vector probing: the model is affine in the unknowns, so one
// evaluation per parameter column reconstructs the regressor exactly.
// The forward recursion does not depend on the unknowns and is shared.
inline RegressorBatch dynamic_regressor(const RobotDescription& robot,
                                        const JointState& state,
                                        const ParameterLayout& layout) {
  const auto kin = forward_recursion(robot, state);
  const int w = layout.total_count();
  const int dof = robot.dof();

  VectorXd probe = VectorXd::Zero(w);
  RegressorBatch batch;
  batch.offset =
      detail::eval_with_kinematics(robot, kin,
                                   unpack_parameters(robot, layout, probe),
                                   state.dq);
  batch.coeffs.resize(dof, w);
  for (int k = 0; k < w; ++k) {
    probe[k] = 1.0;
    const VectorXd out = detail::eval_with_kinematics(
        robot, kin, unpack_parameters(robot, layout, probe), state.dq);
    batch.coeffs.col(k) = out - batch.offset;
    probe[k] = 0.0;
  }
  return batch;
}

inline RegressorRow dynamic_regressor_row(const RobotDescription& robot,
                                          const JointState& state, int joint,
                                          const ParameterLayout& layout) {
  if (joint < 0 || joint >= robot.dof())
    throw std::invalid_argument("joint index " + std::to_string(joint) +
                                " out of range");
  const RegressorBatch batch = dynamic_regressor(robot, state, layout);
  return {batch.offset[joint], batch.coeffs.row(joint).transpose()};
}

// Identified dynamic model: one layout-ordered vector per joint. Joints
// are trained independently, so each carries its own copy of the shared
// physical unknowns.
struct DynamicParameters {
  ParameterLayout layout;
  std::vector<VectorXd> per_joint;

  bool is_uniform() const {
    for (std::size_t j = 1; j < per_joint.size(); ++j)
      if (per_joint[j] != per_joint[0]) return false;
    return true;
  }

  static DynamicParameters uniform(const ParameterLayout& layout,
                                   const VectorXd& params, int dof) {
    DynamicParameters dp;
    dp.layout = layout;
    dp.per_joint.assign(dof, params);
    return dp;
  }
};

// Per-joint torque/current prediction with each joint's own parameter
// vector. Collapses to a single physical recursion when the vectors
// agree.
inline VectorXd predict_meas(const RobotDescription& robot,
                             const DynamicParameters& params,
                             const JointState& state) {
  const int dof = robot.dof();
  if (static_cast<int>(params.per_joint.size()) != dof)
    throw std::invalid_argument("dynamic parameters do not match robot DoF");
  if (params.is_uniform())
    return inverse_dynamics(robot, params.layout, params.per_joint[0], state);
  const RegressorBatch batch = dynamic_regressor(robot, state, params.layout);
  VectorXd out(dof);
  for (int j = 0; j < dof; ++j)
    out[j] = batch.offset[j] + batch.coeffs.row(j).dot(params.per_joint[j]);
  return out;
}

// Which regressor term carries the back-EMF power: signed velocity *
// current (the physical signed power) or velocity * |current|.
enum class BackEmfForm { Signed, Abs };

// Power-model basis row ordered [1, then per joint (L, R, k_t, k_MD)
// terms]. x is the per-joint current or torque depending on the sensor
// kind; the torque form folds the 1/k_m factors into the entries.
inline VectorXd power_regressor_row(const VectorXd& x, const VectorXd& dxdt,
                                    const VectorXd& dq, SensorKind kind,
                                    const std::optional<MotorConstants>& motors,
                                    BackEmfForm form = BackEmfForm::Signed) {
  const int dof = static_cast<int>(x.size());
  if (dxdt.size() != dof || dq.size() != dof)
    throw std::invalid_argument("power_regressor_row: dimension mismatch");
  if (kind == SensorKind::Torque && !motors)
    throw std::invalid_argument(
        "power_regressor_row: torque sensor kind requires motor constants");
  if (kind == SensorKind::Torque) motors->validate(dof);

  VectorXd row(1 + 4 * dof);
  row[0] = 1.0;
  for (int j = 0; j < dof; ++j) {
    const double km = kind == SensorKind::Torque ? motors->k_m[j] : 1.0;
    const double i = x[j] / km;
    const double di = dxdt[j] / km;
    row[1 + 4 * j + 0] = i * di;
    row[1 + 4 * j + 1] = i * i;
    row[1 + 4 * j + 2] =
        form == BackEmfForm::Signed ? dq[j] * i : dq[j] * std::abs(i);
    row[1 + 4 * j + 3] = std::abs(i);
  }
  return row;
}

// Identified power vector [P_c, then per joint (L, R, k_t, k_MD)].
struct PowerParameters {
  VectorXd k;

  int dof() const { return (static_cast<int>(k.size()) - 1) / 4; }

  void validate(int expected_dof) const {
    if (k.size() != 1 + 4 * expected_dof)
      throw std::invalid_argument("power parameter vector length " +
                                  std::to_string(k.size()) + " expected " +
                                  std::to_string(1 + 4 * expected_dof));
  }
};

}  // namespace remo
