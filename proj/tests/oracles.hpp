// Test-only independent oracles: closed-form planar-arm dynamics,
// static gravity torques, and energy bookkeeping. These must stay
// independent of the recursion they are checking.
#pragma once

#include "remo/dynamics.hpp"

namespace oracles {

using remo::Matrix3d;
using remo::Vector3d;
using remo::VectorXd;

struct PlanarArm {
  double l1, l2;    // link lengths
  double lc1, lc2;  // COM distance from each joint along the link
  double m1, m2;
  double izz1, izz2;  // COM inertia about z
  double g;           // gravity magnitude, pulling along -y
};

// Textbook Lagrangian dynamics of the planar elbow arm.
inline Eigen::Vector2d planar_torques(const PlanarArm& arm,
                                      const Eigen::Vector2d& q,
                                      const Eigen::Vector2d& dq,
                                      const Eigen::Vector2d& ddq) {
  const double c2 = std::cos(q[1]), s2 = std::sin(q[1]);
  const double c1 = std::cos(q[0]), c12 = std::cos(q[0] + q[1]);
  const double h = arm.m2 * arm.l1 * arm.lc2;

  const double d11 = arm.izz1 + arm.izz2 + arm.m1 * arm.lc1 * arm.lc1 +
                     arm.m2 * (arm.l1 * arm.l1 + arm.lc2 * arm.lc2 +
                               2.0 * arm.l1 * arm.lc2 * c2);
  const double d12 =
      arm.izz2 + arm.m2 * (arm.lc2 * arm.lc2 + arm.l1 * arm.lc2 * c2);
  const double d22 = arm.izz2 + arm.m2 * arm.lc2 * arm.lc2;

  const double g1 = (arm.m1 * arm.lc1 + arm.m2 * arm.l1) * arm.g * c1 +
                    arm.m2 * arm.lc2 * arm.g * c12;
  const double g2 = arm.m2 * arm.lc2 * arm.g * c12;

  Eigen::Vector2d tau;
  tau[0] = d11 * ddq[0] + d12 * ddq[1] -
           h * s2 * (2.0 * dq[0] * dq[1] + dq[1] * dq[1]) + g1;
  tau[1] = d12 * ddq[0] + d22 * ddq[1] + h * s2 * dq[0] * dq[0] + g2;
  return tau;
}

// The same arm described as a DH chain for the implementation under
// test. Frame i sits at the distal end of link i, so the COM is behind
// the frame origin along local x.
inline remo::RobotDescription planar_robot(const PlanarArm& arm) {
  remo::RobotDescription robot;
  robot.name = "planar-2dof";
  robot.dh_rows = {remo::DhRow{0, arm.l1, 0}, remo::DhRow{0, arm.l2, 0}};
  robot.link_masses = {arm.m1, arm.m2};
  robot.link_coms = {Vector3d(arm.lc1 - arm.l1, 0, 0),
                     Vector3d(arm.lc2 - arm.l2, 0, 0)};
  robot.sensor_kind = remo::SensorKind::Torque;
  robot.gravity.g_vector = Vector3d(0, arm.g, 0);
  return robot;
}

inline remo::PhysicalParameters planar_params(const PlanarArm& arm) {
  remo::PhysicalParameters phys;
  Matrix3d i1 = Matrix3d::Zero(), i2 = Matrix3d::Zero();
  i1(2, 2) = arm.izz1;
  i2(2, 2) = arm.izz2;
  phys.inertias = {i1, i2};
  phys.friction.k_v = VectorXd::Zero(2);
  phys.friction.k_s = VectorXd::Zero(2);
  return phys;
}

// Static joint torques from first principles: each joint must hold the
// weight of every distal link about its own axis.
inline VectorXd static_gravity_torques(const remo::RobotDescription& robot,
                                       const remo::JointState& state) {
  const auto kin = remo::forward_recursion(robot, state);
  const int rows = robot.link_count();
  VectorXd tau = VectorXd::Zero(robot.dof());
  for (int r = 0; r < rows; ++r) {
    if (!kin[r].actuated) continue;
    Vector3d moment = Vector3d::Zero();
    for (int s = r; s < rows; ++s) {
      const Vector3d p_com = kin[s].T_world.translation + kin[s].r_com;
      const Vector3d weight = robot.link_masses[s] * robot.gravity.g_vector;
      moment += (p_com - kin[r].anchor).cross(weight);
    }
    tau[kin[r].joint_index] = moment.dot(kin[r].u);
  }
  return tau;
}

// Mechanical energy (kinetic + potential) of a point-mass/inertia chain
// at one sample, computed from link-origin velocities propagated
// independently of the acceleration recursion.
inline double mechanical_energy(const remo::RobotDescription& robot,
                                const std::vector<remo::LinkKinematics>& kin,
                                const std::vector<Matrix3d>& inertias) {
  double energy = 0.0;
  Vector3d v_prev = Vector3d::Zero();
  for (std::size_t r = 0; r < kin.size(); ++r) {
    const Vector3d v_origin = v_prev + kin[r].w.cross(kin[r].r_link);
    const Vector3d v_com = v_origin + kin[r].w.cross(kin[r].r_com);
    const Matrix3d iw = kin[r].T_world.rotation * inertias[r] *
                        kin[r].T_world.rotation.transpose();
    const Vector3d p_com = kin[r].T_world.translation + kin[r].r_com;
    energy += 0.5 * robot.link_masses[r] * v_com.squaredNorm();
    energy += 0.5 * kin[r].w.dot(iw * kin[r].w);
    // The injected base acceleration is the negative of the physical
    // gravity field, so PE = m * (g_vector . p).
    energy += robot.link_masses[r] * robot.gravity.g_vector.dot(p_com);
    v_prev = v_origin;
  }
  return energy;
}

}  // namespace oracles
