#pragma once

#include <cmath>

#include "remo/robot.hpp"

namespace remo {

struct HomogeneousTransform {
  Matrix3d rotation = Matrix3d::Identity();
  Vector3d translation = Vector3d::Zero();

  HomogeneousTransform operator*(const HomogeneousTransform& o) const {
    return {rotation * o.rotation, rotation * o.translation + translation};
  }
};

struct JointState {
  VectorXd q;
  VectorXd dq;
  VectorXd ddq;

  void validate(int dof) const {
    if (q.size() != dof || dq.size() != dof || ddq.size() != dof)
      throw std::invalid_argument("joint state dimension does not match DoF " +
                                  std::to_string(dof));
    if (!q.allFinite() || !dq.allFinite() || !ddq.allFinite())
      throw std::invalid_argument("non-finite joint state");
  }
};

// Per-row output of the forward recursion, all vectors in the base frame.
struct LinkKinematics {
  Vector3d w = Vector3d::Zero();      // angular velocity
  Vector3d dw = Vector3d::Zero();     // angular acceleration
  Vector3d pdd = Vector3d::Zero();    // frame-origin linear acceleration
  Vector3d pdd_c = Vector3d::Zero();  // COM linear acceleration
  Vector3d u = Vector3d::UnitZ();     // joint rotation axis
  Vector3d r_link = Vector3d::Zero(); // previous frame origin -> this frame origin
  Vector3d r_com = Vector3d::Zero();  // this frame origin -> link COM
  Vector3d anchor = Vector3d::Zero(); // point on the joint axis (moment reference)
  HomogeneousTransform T_world;       // base -> this frame
  bool actuated = true;
  int joint_index = -1;               // -1 for static rows
};

// Single-row DH transform. theta used in the matrix is q + theta_offset.
inline HomogeneousTransform dh_transform(const DhRow& row, double q,
                                         DhConvention convention) {
  if (!std::isfinite(q) || !std::isfinite(row.d) || !std::isfinite(row.a) ||
      !std::isfinite(row.alpha) || !std::isfinite(row.theta_offset))
    throw std::invalid_argument("dh_transform: non-finite input");
  const double th = q + row.theta_offset;
  const double ct = std::cos(th), st = std::sin(th);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  HomogeneousTransform T;
  if (convention == DhConvention::Traditional) {
    T.rotation << ct, -st * ca, st * sa,
                  st, ct * ca, -ct * sa,
                  0.0, sa, ca;
    T.translation << row.a * ct, row.a * st, row.d;
  } else {
    // Modified rows store the preceding a and alpha.
    T.rotation << ct, -st, 0.0,
                  st * ca, ct * ca, -sa,
                  st * sa, ct * sa, ca;
    T.translation << row.a, -row.d * sa, -row.d * ca;
  }
  return T;
}

// Joint rotation axis: third column of the world rotation of the frame
// the joint variable turns about.
inline Vector3d joint_axis(const Matrix3d& world_rotation) {
  return world_rotation.col(2);
}

// Base-to-tip propagation of angular velocity/acceleration and linear
// accelerations. Gravity is injected as the base linear acceleration so
// it reaches every link; with zero joint motion every pdd_c equals the
// gravity vector.
inline std::vector<LinkKinematics> forward_recursion(
    const RobotDescription& robot, const JointState& state,
    const GravityConvention& gravity) {
  state.validate(robot.dof());
  const int rows = robot.link_count();
  std::vector<LinkKinematics> out(rows);

  HomogeneousTransform T_prev;  // identity: base frame
  Vector3d w_prev = Vector3d::Zero();
  Vector3d dw_prev = Vector3d::Zero();
  Vector3d pdd_prev = gravity.g_vector;

  int joint = 0;
  for (int r = 0; r < rows; ++r) {
    const DhRow& row = robot.dh_rows[r];
    LinkKinematics& lk = out[r];
    lk.actuated = !row.is_static;
    const double q = lk.actuated ? state.q[joint] : 0.0;

    const HomogeneousTransform T_local = dh_transform(row, q, robot.convention);
    lk.T_world = T_prev * T_local;

    // Traditional turns about the previous frame's z, Modified about
    // this frame's z; the translation along z is axis-parallel either
    // way, so the previous/this origin both sit on the axis.
    if (robot.convention == DhConvention::Traditional) {
      lk.u = joint_axis(T_prev.rotation);
      lk.anchor = T_prev.translation;
    } else {
      lk.u = joint_axis(lk.T_world.rotation);
      lk.anchor = lk.T_world.translation;
    }

    if (lk.actuated) {
      lk.joint_index = joint;
      const double dq = state.dq[joint];
      const double ddq = state.ddq[joint];
      lk.w = w_prev + dq * lk.u;
      lk.dw = dw_prev + ddq * lk.u + dq * w_prev.cross(lk.u);
      ++joint;
    } else {
      lk.w = w_prev;
      lk.dw = dw_prev;
    }

    lk.r_link = lk.T_world.translation - T_prev.translation;
    lk.pdd = pdd_prev + lk.dw.cross(lk.r_link) +
             lk.w.cross(lk.w.cross(lk.r_link));
    lk.r_com = lk.T_world.rotation * robot.link_coms[r];
    lk.pdd_c = lk.pdd + lk.dw.cross(lk.r_com) +
               lk.w.cross(lk.w.cross(lk.r_com));

    T_prev = lk.T_world;
    w_prev = lk.w;
    dw_prev = lk.dw;
    pdd_prev = lk.pdd;
  }
  return out;
}

inline std::vector<LinkKinematics> forward_recursion(
    const RobotDescription& robot, const JointState& state) {
  return forward_recursion(robot, state, robot.gravity);
}

}  // namespace remo
