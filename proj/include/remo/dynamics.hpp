#pragma once

#include "remo/kinematics.hpp"

namespace remo {

// Tip-to-base force chain and the moment split. n_k holds the terms
// built only from known masses/geometry/motion; n_u holds the
// inertia-tensor terms that carry the unknowns. One entry per DH row.
struct WrenchChain {
  std::vector<Vector3d> f;
  std::vector<Vector3d> n_k;
  std::vector<Vector3d> n_u;
};

// Backward Newton-Euler pass. `inertias` are COM inertia tensors in
// link-local axes, one per DH row; they are rotated to the base frame
// per sample. Moments are referenced to each joint's anchor point so
// the axial projection is the joint torque.
inline WrenchChain backward_recursion(const RobotDescription& robot,
                                      const std::vector<LinkKinematics>& kin,
                                      const PayloadWrench& payload,
                                      const std::vector<Matrix3d>& inertias) {
  const int rows = robot.link_count();
  if (static_cast<int>(kin.size()) != rows)
    throw std::invalid_argument("backward_recursion: kinematics length " +
                                std::to_string(kin.size()) +
                                " does not match link count");
  if (static_cast<int>(inertias.size()) != rows)
    throw std::invalid_argument("backward_recursion: inertia list length " +
                                std::to_string(inertias.size()) +
                                " does not match link count");

  WrenchChain chain;
  chain.f.assign(rows, Vector3d::Zero());
  chain.n_k.assign(rows, Vector3d::Zero());
  chain.n_u.assign(rows, Vector3d::Zero());

  const Vector3d p_tcp = kin.back().T_world.translation;
  const Vector3d f_payload =
      payload.force + payload.mass * kin.back().pdd;

  // World-frame inertial wrenches per link.
  std::vector<Vector3d> f_link(rows), tau_rot(rows), p_com(rows);
  for (int r = 0; r < rows; ++r) {
    f_link[r] = robot.link_masses[r] * kin[r].pdd_c;
    const Matrix3d Iw = kin[r].T_world.rotation * inertias[r] *
                        kin[r].T_world.rotation.transpose();
    tau_rot[r] = Iw * kin[r].dw + kin[r].w.cross(Iw * kin[r].w);
    p_com[r] = kin[r].T_world.translation + kin[r].r_com;
  }

  Vector3d f_next = f_payload;
  for (int r = rows - 1; r >= 0; --r) {
    chain.f[r] = f_next + f_link[r];
    f_next = chain.f[r];

    const Vector3d& anchor = kin[r].anchor;
    Vector3d nk = payload.moment + (p_tcp - anchor).cross(f_payload);
    Vector3d nu = Vector3d::Zero();
    for (int s = r; s < rows; ++s) {
      nk += (p_com[s] - anchor).cross(f_link[s]);
      nu += tau_rot[s];
    }
    chain.n_k[r] = nk;
    chain.n_u[r] = nu;
  }
  return chain;
}

// Axial moment projection plus viscous and Coulomb friction. sgn(0) = 0
// so data at rest injects no Coulomb torque.
inline VectorXd joint_torques(const WrenchChain& chain,
                              const std::vector<LinkKinematics>& kin,
                              const FrictionParameters& friction,
                              const VectorXd& dq) {
  if (chain.f.size() != kin.size())
    throw std::invalid_argument("joint_torques: chain/kinematics mismatch");
  const int dof = static_cast<int>(dq.size());
  if (friction.k_v.size() != dof || friction.k_s.size() != dof)
    throw std::invalid_argument("joint_torques: friction dimension mismatch");
  VectorXd tau = VectorXd::Zero(dof);
  for (std::size_t r = 0; r < kin.size(); ++r) {
    if (!kin[r].actuated) continue;
    const int j = kin[r].joint_index;
    tau[j] = (chain.n_k[r] + chain.n_u[r]).dot(kin[r].u) +
             friction.k_v[j] * dq[j] + friction.k_s[j] * sgn(dq[j]);
  }
  return tau;
}

inline VectorXd joint_currents(const VectorXd& torques,
                               const MotorConstants& motors) {
  motors.validate(static_cast<int>(torques.size()));
  return torques.cwiseQuotient(motors.k_m);
}

// Full physical parameter set for one inverse-dynamics evaluation.
struct PhysicalParameters {
  std::vector<Matrix3d> inertias;  // one per DH row, link-local about COM
  FrictionParameters friction;
  PayloadWrench payload;
};

// Forward + backward pass; returns torques, or currents when the robot
// senses current.
inline VectorXd inverse_dynamics(const RobotDescription& robot,
                                 const PhysicalParameters& params,
                                 const JointState& state) {
  const auto kin = forward_recursion(robot, state);
  const auto chain =
      backward_recursion(robot, kin, params.payload, params.inertias);
  VectorXd tau = joint_torques(chain, kin, params.friction, state.dq);
  if (robot.sensor_kind == SensorKind::Current)
    return joint_currents(tau, *robot.motor_constants);
  return tau;
}

}  // namespace remo
