#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace remo {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

// Two ways of numbering the four DH offsets. Traditional applies
// Rz(theta) Tz(d) Tx(a) Rx(alpha); Modified stores the previous row's
// a and alpha and applies Rx(alpha) Tx(a) Rz(theta) Tz(d).
enum class DhConvention { Traditional = 0, Modified = 1 };

enum class SensorKind { Current, Torque };

// One row of the DH table. For a static row the joint variable is
// absent: the transform is fixed and the row does not contribute a
// column to the joint state.
struct DhRow {
  double d = 0.0;
  double a = 0.0;
  double alpha = 0.0;
  double theta_offset = 0.0;  // added to the joint variable
  bool is_static = false;
};

// Base linear acceleration injected into the forward recursion so
// gravity propagates through the chain. The value is the fictitious
// upward acceleration, i.e. the negative of the physical gravity
// field. Default follows the convention used by the bundled fixtures.
struct GravityConvention {
  Vector3d g_vector{0.0, 9.8, 0.0};
};

// Constant wrench applied at the tool center point plus an attached
// point mass.
struct PayloadWrench {
  Vector3d force = Vector3d::Zero();
  Vector3d moment = Vector3d::Zero();
  double mass = 0.0;
};

struct FrictionParameters {
  VectorXd k_v;  // viscous, N*m*s/rad, one per actuated joint
  VectorXd k_s;  // Coulomb, N*m, one per actuated joint
};

struct MotorConstants {
  VectorXd k_m;  // torque constant, N*m/A, one per actuated joint

  void validate(int dof) const {
    if (k_m.size() != dof)
      throw std::invalid_argument("motor constants: expected " +
                                  std::to_string(dof) + " entries, got " +
                                  std::to_string(k_m.size()));
    for (int i = 0; i < k_m.size(); ++i)
      if (!(k_m[i] > 0.0))
        throw std::invalid_argument("motor constant k_m[" + std::to_string(i) +
                                    "] must be positive");
  }
};

struct LinkMassProperties {
  double mass = 0.0;
  Vector3d com = Vector3d::Zero();      // link-local, relative to the link's DH frame
  Matrix3d inertia = Matrix3d::Zero();  // about the COM, link-local axes
};

struct RobotDescription {
  std::string name;
  std::vector<DhRow> dh_rows;        // includes static rows
  DhConvention convention = DhConvention::Traditional;
  std::vector<double> link_masses;   // one per DH row
  std::vector<Vector3d> link_coms;   // link-local, one per DH row
  PayloadWrench payload;
  SensorKind sensor_kind = SensorKind::Torque;
  std::optional<MotorConstants> motor_constants;
  GravityConvention gravity;

  int link_count() const { return static_cast<int>(dh_rows.size()); }

  // Number of actuated joints (static rows excluded).
  int dof() const {
    int n = 0;
    for (const auto& row : dh_rows)
      if (!row.is_static) ++n;
    return n;
  }

  void validate() const {
    if (dh_rows.empty()) throw std::invalid_argument("robot has no DH rows");
    if (link_masses.size() != dh_rows.size())
      throw std::invalid_argument(
          "link_masses length " + std::to_string(link_masses.size()) +
          " does not match DH row count " + std::to_string(dh_rows.size()));
    if (link_coms.size() != dh_rows.size())
      throw std::invalid_argument(
          "link_coms length " + std::to_string(link_coms.size()) +
          " does not match DH row count " + std::to_string(dh_rows.size()));
    if (dof() == 0) throw std::invalid_argument("robot has no actuated joints");
    for (std::size_t i = 0; i < link_masses.size(); ++i)
      if (!(link_masses[i] >= 0.0) || !std::isfinite(link_masses[i]))
        throw std::invalid_argument("link mass " + std::to_string(i) +
                                    " must be finite and non-negative");
    for (const auto& row : dh_rows)
      if (!std::isfinite(row.d) || !std::isfinite(row.a) ||
          !std::isfinite(row.alpha) || !std::isfinite(row.theta_offset))
        throw std::invalid_argument("non-finite DH parameter");
    for (const auto& c : link_coms)
      if (!c.allFinite()) throw std::invalid_argument("non-finite link COM");
    if (!(gravity.g_vector.norm() > 0.0))
      throw std::invalid_argument("gravity vector must be nonzero");
    if (sensor_kind == SensorKind::Current) {
      if (!motor_constants)
        throw std::invalid_argument(
            "current-sensor robot requires motor constants");
      motor_constants->validate(dof());
    }
    if (motor_constants) motor_constants->validate(dof());
  }
};

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace remo
