#pragma once

#include "remo/io.hpp"

namespace remo {

// Bundled robot descriptions for UR3e, UR10e, Gen3, and FR3, plus
// default excitation specs and synthetic ground-truth parameters so the
// whole pipeline can run without external data. The DH tables, masses,
// and COM vectors follow the manufacturers' datasheet values; the motor
// constants, friction, inertia, and electrical values are plausible
// synthetic defaults, not measured quantities.

namespace detail {

inline RobotDescription make_robot(std::string name, DhConvention conv,
                                   SensorKind sensor,
                                   std::vector<double> d, std::vector<double> a,
                                   std::vector<double> alpha,
                                   std::vector<double> m,
                                   std::vector<Vector3d> rc,
                                   std::optional<VectorXd> k_m,
                                   int static_row = -1) {
  RobotDescription robot;
  robot.name = std::move(name);
  robot.convention = conv;
  robot.sensor_kind = sensor;
  for (std::size_t i = 0; i < d.size(); ++i) {
    DhRow row;
    row.d = d[i];
    row.a = a[i];
    row.alpha = alpha[i];
    row.is_static = static_cast<int>(i) == static_row;
    robot.dh_rows.push_back(row);
  }
  robot.link_masses = std::move(m);
  robot.link_coms = std::move(rc);
  if (k_m) robot.motor_constants = MotorConstants{*k_m};
  robot.validate();
  return robot;
}

inline VectorXd const_vec(int n, double v) {
  return VectorXd::Constant(n, v);
}

}  // namespace detail

inline RobotDescription fixture_ur3e() {
  const double pi2 = M_PI / 2.0;
  VectorXd km(6);
  km << 8.0, 8.0, 7.0, 4.5, 4.5, 4.5;
  return detail::make_robot(
      "UR3e", DhConvention::Traditional, SensorKind::Current,
      {0.151, 0, 0, 0.131, 0.085, 0.092}, {0, -0.244, -0.213, 0, 0, 0},
      {pi2, 0, 0, pi2, -pi2, 0}, {1.98, 3.44, 1.44, 0.87, 0.81, 0.26},
      {{0, -0.02, 0}, {0.13, 0, 0.12}, {0.05, 0, 0.02},
       {0, 0, 0.01}, {0, 0, 0.01}, {0, 0, -0.02}},
      km);
}

inline RobotDescription fixture_ur10e() {
  const double pi2 = M_PI / 2.0;
  VectorXd km(6);
  km << 15.0, 15.0, 12.0, 6.0, 6.0, 6.0;
  return detail::make_robot(
      "UR10e", DhConvention::Traditional, SensorKind::Current,
      {0.181, 0, 0, 0.174, 0.120, 0.112}, {0, -0.613, -0.572, 0, 0, 0},
      {pi2, 0, 0, pi2, -pi2, 0}, {7.37, 13.05, 3.99, 2.10, 1.98, 0.62},
      {{0.021, 0, 0.27}, {0.38, 0, 0.16}, {0.24, 0, 0.07},
       {0, 0.01, 0.02}, {0, 0.01, 0.02}, {0, 0, -0.03}},
      km);
}

// Eight DH rows with a static first articulation: seven actuated
// joints. The alpha chain is carried verbatim from the datasheet table.
inline RobotDescription fixture_gen3() {
  const double pi = M_PI, pi2 = M_PI / 2.0;
  return detail::make_robot(
      "Gen3", DhConvention::Traditional, SensorKind::Torque,
      {0, -0.18, -0.01, -0.42, 0.02, -0.31, 0, -0.17},
      {0, 0, 0, 0, 0, 0, 0, 0}, {pi, pi2, pi2, pi2, pi2, pi2, pi2, pi},
      {1.70, 1.38, 1.16, 1.16, 0.93, 0.68, 0.68, 0.50},
      {{0, 0, 0.08}, {0, -0.01, 0.21}, {0, 0.03, -0.01}, {0, 0, 0.30},
       {0, 0.13, -0.02}, {0, -0.01, 0.25}, {0, 0.10, -0.02}, {0, -0.01, 0.04}},
      std::nullopt, /*static_row=*/0);
}

inline RobotDescription fixture_fr3() {
  const double pi2 = M_PI / 2.0;
  return detail::make_robot(
      "FR3", DhConvention::Modified, SensorKind::Torque,
      {0.333, 0, 0.316, 0, 0.384, 0, 0.107},
      {0, 0, 0, 0.0825, -0.0825, 0, 0.088},
      {0, -pi2, pi2, pi2, -pi2, pi2, pi2},
      {4.97, 0.65, 3.23, 3.59, 1.23, 1.67, 0.74},
      {{0.003, 0.002, 0}, {-0.003, -0.02, 0.003}, {0.02, 0.04, -0.06},
       {-0.05, 0.10, 0.02}, {-0.01, 0.04, -0.04}, {0.06, -0.01, -0.01},
       {0.01, -0.04, 0.06}},
      detail::const_vec(7, 4.0));
}

inline std::vector<RobotDescription> all_fixtures() {
  return {fixture_ur3e(), fixture_ur10e(), fixture_gen3(), fixture_fr3()};
}

// Pairwise non-commensurate frequencies keep the regressor well
// conditioned; 100 s at 500 Hz gives 50,000 samples.
inline SinusoidSpec default_sinusoid_spec(const RobotDescription& robot) {
  static const double freq[] = {0.11, 0.17, 0.23, 0.31, 0.37, 0.41, 0.47, 0.53};
  static const double amp[] = {0.9, 0.7, 0.8, 1.0, 1.1, 0.9, 0.8, 0.7};
  static const double th0[] = {0.3, -0.4, 0.5, 0.2, -0.3, 0.4, -0.2, 0.3};
  static const double ph[] = {0.0, 0.7, 1.3, 2.1, 2.9, 3.7, 4.3, 5.1};
  const int dof = robot.dof();
  SinusoidSpec spec;
  spec.theta0.resize(dof);
  spec.amplitude.resize(dof);
  spec.frequency.resize(dof);
  spec.phase.resize(dof);
  for (int j = 0; j < dof; ++j) {
    spec.theta0[j] = th0[j];
    spec.amplitude[j] = amp[j];
    spec.frequency[j] = freq[j];
    spec.phase[j] = ph[j];
  }
  spec.duration = 100.0;
  spec.sample_rate = 500.0;
  return spec;
}

// Synthetic ground truth scaled off each link's mass so magnitudes stay
// physically plausible across the four robots.
inline TruthParameters default_truth(const RobotDescription& robot) {
  TruthParameters truth;
  const int links = robot.link_count();
  const int dof = robot.dof();
  for (int r = 0; r < links; ++r) {
    const double base = 0.015 * (robot.link_masses[r] + 0.5);
    truth.inertia.push_back({1.1 * base, 0.9 * base, base,
                             0.08 * base, -0.05 * base, 0.06 * base});
  }
  truth.viscous.resize(dof);
  truth.coulomb.resize(dof);
  for (int j = 0; j < dof; ++j) {
    truth.viscous[j] = 0.18 + 0.03 * j;
    truth.coulomb[j] = 0.08 + 0.02 * j;
  }
  truth.power.k.resize(1 + 4 * dof);
  truth.power.k[0] = 42.0;  // P_c
  for (int j = 0; j < dof; ++j) {
    truth.power.k[1 + 4 * j + 0] = 0.002;         // L
    truth.power.k[1 + 4 * j + 1] = 1.1 + 0.1 * j; // R
    truth.power.k[1 + 4 * j + 2] = 0.35 + 0.05 * j;  // k_t
    truth.power.k[1 + 4 * j + 3] = 0.6 + 0.05 * j;   // k_MD
  }
  return truth;
}

}  // namespace remo
