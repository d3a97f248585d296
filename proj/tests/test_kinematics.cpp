#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "remo/fixtures.hpp"
#include "remo/kinematics.hpp"

#include <random>

using namespace remo;

namespace {

JointState zero_state(int dof) {
  return {VectorXd::Zero(dof), VectorXd::Zero(dof), VectorXd::Zero(dof)};
}

// Single revolute joint about the base z-axis.
RobotDescription one_joint_robot() {
  RobotDescription robot;
  robot.name = "one-joint";
  robot.dh_rows = {DhRow{}};
  robot.link_masses = {1.0};
  robot.link_coms = {Vector3d::Zero()};
  robot.sensor_kind = SensorKind::Torque;
  return robot;
}

}  // namespace

TEST_CASE("dh_transform traditional with all offsets zero is identity") {
  const auto T = dh_transform(DhRow{}, 0.0, DhConvention::Traditional);
  CHECK(T.rotation.isApprox(Matrix3d::Identity(), 1e-15));
  CHECK(T.translation.norm() == doctest::Approx(0.0));
}

TEST_CASE("dh_transform traditional matches hand substitution (UR3e joint 1)") {
  const auto T = dh_transform(DhRow{0.151, 0.0, M_PI / 2.0}, 0.0,
                              DhConvention::Traditional);
  Matrix3d expected;
  expected << 1, 0, 0,
              0, 0, -1,
              0, 1, 0;
  CHECK((T.rotation - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(T.translation.isApprox(Vector3d(0, 0, 0.151), 1e-15));
}

TEST_CASE("dh_transform modified matches hand substitution (FR3 joint 1)") {
  const auto T =
      dh_transform(DhRow{0.333, 0.0, 0.0}, 0.0, DhConvention::Modified);
  CHECK(T.rotation.isApprox(Matrix3d::Identity(), 1e-15));
  // The translation carries the -d*cos(alpha) entry of the modified row.
  CHECK(T.translation.isApprox(Vector3d(0, 0, -0.333), 1e-15));
}

TEST_CASE("dh_transform rejects non-finite input") {
  CHECK_THROWS_AS(dh_transform(DhRow{std::nan(""), 0, 0}, 0.0,
                               DhConvention::Traditional),
                  std::invalid_argument);
  CHECK_THROWS_AS(dh_transform(DhRow{}, std::numeric_limits<double>::infinity(),
                               DhConvention::Traditional),
                  std::invalid_argument);
}

TEST_CASE("dh_transform rotation block is orthonormal with det 1") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const DhRow row{u(rng), u(rng), u(rng), u(rng)};
    const auto conv =
        i % 2 ? DhConvention::Traditional : DhConvention::Modified;
    const auto T = dh_transform(row, u(rng), conv);
    CHECK((T.rotation * T.rotation.transpose() - Matrix3d::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-9);
    CHECK(T.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("transform composition is associative") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const auto A = dh_transform(DhRow{u(rng), u(rng), u(rng)}, u(rng),
                                DhConvention::Traditional);
    const auto B = dh_transform(DhRow{u(rng), u(rng), u(rng)}, u(rng),
                                DhConvention::Modified);
    const auto C = dh_transform(DhRow{u(rng), u(rng), u(rng)}, u(rng),
                                DhConvention::Traditional);
    const auto left = (A * B) * C;
    const auto right = A * (B * C);
    CHECK((left.rotation - right.rotation).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((left.translation - right.translation).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("joint_axis picks the third column") {
  CHECK(joint_axis(Matrix3d::Identity()).isApprox(Vector3d(0, 0, 1)));
  Matrix3d rx;  // rotation by pi/2 about x
  rx << 1, 0, 0,
        0, 0, -1,
        0, 1, 0;
  CHECK(joint_axis(rx).isApprox(Vector3d(0, -1, 0), 1e-15));
  Matrix3d rz;  // rotation by pi about z
  rz << -1, 0, 0,
        0, -1, 0,
        0, 0, 1;
  CHECK(joint_axis(rz).isApprox(Vector3d(0, 0, 1), 1e-15));
}

TEST_CASE("forward_recursion zero motion gives zero angular rates") {
  const auto robot = one_joint_robot();
  const auto kin = forward_recursion(robot, zero_state(1));
  CHECK(kin[0].w.norm() == doctest::Approx(0.0));
  CHECK(kin[0].dw.norm() == doctest::Approx(0.0));
}

TEST_CASE("forward_recursion single joint velocity about z") {
  const auto robot = one_joint_robot();
  JointState state = zero_state(1);
  state.dq[0] = 1.0;
  const auto kin = forward_recursion(robot, state);
  CHECK(kin[0].w.isApprox(Vector3d(0, 0, 1), 1e-15));
}

TEST_CASE("forward_recursion rejects dimension mismatch") {
  const auto robot = one_joint_robot();
  CHECK_THROWS_AS(forward_recursion(robot, zero_state(2)),
                  std::invalid_argument);
}

TEST_CASE("at rest every link COM acceleration equals the gravity vector") {
  for (const auto& robot : all_fixtures()) {
    const auto kin = forward_recursion(robot, zero_state(robot.dof()));
    for (const auto& lk : kin) {
      CHECK(lk.w.norm() == doctest::Approx(0.0));
      CHECK(lk.dw.norm() == doctest::Approx(0.0));
      CHECK(std::abs(lk.pdd_c.norm() - robot.gravity.g_vector.norm()) < 1e-9);
    }
  }
}

TEST_CASE("joint axes are unit length on all fixtures") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const auto& robot : all_fixtures()) {
    const int dof = robot.dof();
    for (int trial = 0; trial < 20; ++trial) {
      JointState state = zero_state(dof);
      for (int j = 0; j < dof; ++j) {
        state.q[j] = u(rng);
        state.dq[j] = u(rng);
        state.ddq[j] = u(rng);
      }
      for (const auto& lk : forward_recursion(robot, state))
        CHECK(std::abs(lk.u.norm() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("forward_recursion is deterministic") {
  const auto robot = fixture_ur3e();
  JointState state = zero_state(6);
  state.q << 0.3, -0.4, 0.5, 0.2, -0.3, 0.4;
  state.dq << 1.0, -0.5, 0.7, 0.2, 0.1, -0.9;
  state.ddq << 0.4, 0.8, -0.2, 0.5, -0.6, 0.3;
  const auto a = forward_recursion(robot, state);
  const auto b = forward_recursion(robot, state);
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK((a[r].w - b[r].w).norm() == 0.0);
    CHECK((a[r].dw - b[r].dw).norm() == 0.0);
    CHECK((a[r].pdd_c - b[r].pdd_c).norm() == 0.0);
    CHECK((a[r].T_world.translation - b[r].T_world.translation).norm() == 0.0);
  }
}

TEST_CASE("two-link planar arm matches closed-form kinematics") {
  // Independent oracle: planar elbow arm with joints about z, symbolic
  // velocity/acceleration formulas evaluated directly.
  const double l1 = 0.5, l2 = 0.35;
  RobotDescription robot;
  robot.name = "planar";
  robot.dh_rows = {DhRow{0, l1, 0}, DhRow{0, l2, 0}};
  robot.link_masses = {1.0, 1.0};
  robot.link_coms = {Vector3d::Zero(), Vector3d::Zero()};  // COM at frame origin
  robot.sensor_kind = SensorKind::Torque;
  robot.gravity.g_vector = Vector3d::Zero();  // pure motion check

  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    JointState state = zero_state(2);
    for (int j = 0; j < 2; ++j) {
      state.q[j] = u(rng);
      state.dq[j] = u(rng);
      state.ddq[j] = u(rng);
    }
    const double q1 = state.q[0], q2 = state.q[1];
    const double dq1 = state.dq[0], dq2 = state.dq[1];
    const double ddq1 = state.ddq[0], ddq2 = state.ddq[1];

    const auto kin = forward_recursion(robot, state);

    CHECK(kin[0].w.isApprox(Vector3d(0, 0, dq1), 1e-12));
    CHECK(kin[1].w.isApprox(Vector3d(0, 0, dq1 + dq2), 1e-12));
    CHECK(kin[0].dw.isApprox(Vector3d(0, 0, ddq1), 1e-12));
    CHECK(kin[1].dw.isApprox(Vector3d(0, 0, ddq1 + ddq2), 1e-12));

    // Elbow position and acceleration.
    const double c1 = std::cos(q1), s1 = std::sin(q1);
    CHECK(kin[0].T_world.translation.isApprox(Vector3d(l1 * c1, l1 * s1, 0),
                                              1e-12));
    const Vector3d elbow_acc(-l1 * (ddq1 * s1 + dq1 * dq1 * c1),
                             l1 * (ddq1 * c1 - dq1 * dq1 * s1), 0.0);
    CHECK((kin[0].pdd - elbow_acc).cwiseAbs().maxCoeff() < 1e-9);

    // Tip position and acceleration.
    const double c12 = std::cos(q1 + q2), s12 = std::sin(q1 + q2);
    const double w2 = dq1 + dq2, a2 = ddq1 + ddq2;
    CHECK(kin[1].T_world.translation.isApprox(
        Vector3d(l1 * c1 + l2 * c12, l1 * s1 + l2 * s12, 0), 1e-12));
    const Vector3d tip_acc =
        elbow_acc + Vector3d(-l2 * (a2 * s12 + w2 * w2 * c12),
                             l2 * (a2 * c12 - w2 * w2 * s12), 0.0);
    CHECK((kin[1].pdd - tip_acc).cwiseAbs().maxCoeff() < 1e-9);
  }
}
