#pragma once

#include <random>

#include "remo/regressor.hpp"

namespace remo {

// Time-stamped operational data. meas and power are optional channels;
// empty means not recorded.
struct OperationalDataset {
  VectorXd t;
  MatrixXd q, dq, ddq;  // samples x dof
  MatrixXd meas;        // torque or current, samples x dof; may be empty
  VectorXd power;       // total electrical power, W; may be empty

  int samples() const { return static_cast<int>(t.size()); }
  int width() const { return static_cast<int>(q.cols()); }
  bool has_meas() const { return meas.size() > 0; }
  bool has_power() const { return power.size() > 0; }

  JointState state_at(int k) const {
    return {q.row(k).transpose(), dq.row(k).transpose(),
            ddq.row(k).transpose()};
  }

  void validate(int dof) const {
    const int n = samples();
    if (n == 0) throw std::invalid_argument("dataset is empty");
    if (q.rows() != n || dq.rows() != n || ddq.rows() != n)
      throw std::invalid_argument("dataset channels disagree on sample count");
    if (q.cols() != dof || dq.cols() != dof || ddq.cols() != dof)
      throw std::invalid_argument("dataset channel width " +
                                  std::to_string(q.cols()) +
                                  " does not match robot DoF " +
                                  std::to_string(dof));
    if (has_meas() && (meas.rows() != n || meas.cols() != dof))
      throw std::invalid_argument("meas channel shape mismatch");
    if (has_power() && power.size() != n)
      throw std::invalid_argument("power channel length mismatch");
    for (int k = 1; k < n; ++k)
      if (!(t[k] > t[k - 1]))
        throw std::invalid_argument("timestamps not strictly increasing at row " +
                                    std::to_string(k));
    if (!t.allFinite() || !q.allFinite() || !dq.allFinite() ||
        !ddq.allFinite() || (has_meas() && !meas.allFinite()) ||
        (has_power() && !power.allFinite()))
      throw std::invalid_argument("dataset contains non-finite values");
  }

  OperationalDataset slice(int begin, int count) const {
    OperationalDataset out;
    out.t = t.segment(begin, count);
    out.q = q.middleRows(begin, count);
    out.dq = dq.middleRows(begin, count);
    out.ddq = ddq.middleRows(begin, count);
    if (has_meas()) out.meas = meas.middleRows(begin, count);
    if (has_power()) out.power = power.segment(begin, count);
    return out;
  }
};

// Per-joint sinusoid excitation. Non-commensurate frequencies keep the
// identification well conditioned.
struct SinusoidSpec {
  VectorXd theta0;     // rad
  VectorXd amplitude;  // rad
  VectorXd frequency;  // Hz
  VectorXd phase;      // rad
  double duration = 100.0;     // s
  double sample_rate = 500.0;  // Hz

  int joints() const { return static_cast<int>(theta0.size()); }

  void validate() const {
    const int n = joints();
    if (amplitude.size() != n || frequency.size() != n || phase.size() != n)
      throw std::invalid_argument("sinusoid spec: per-joint vectors disagree");
    if (!(duration > 0.0) || !(sample_rate > 0.0))
      throw std::invalid_argument(
          "sinusoid spec: duration and sample_rate must be positive");
  }

  bool violates_nyquist() const {
    return frequency.size() > 0 && sample_rate <= 2.0 * frequency.maxCoeff();
  }
};

struct TrajectoryData {
  VectorXd t;
  MatrixXd q, dq, ddq;
};

// theta(t) = theta0 + A sin(2 pi f t + phi); derivatives are analytic.
inline TrajectoryData generate_sinusoid(const SinusoidSpec& spec) {
  spec.validate();
  const int dof = spec.joints();
  const int n = static_cast<int>(std::llround(spec.duration * spec.sample_rate));
  if (n < 1) throw std::invalid_argument("sinusoid spec produces no samples");
  TrajectoryData traj;
  traj.t.resize(n);
  traj.q.resize(n, dof);
  traj.dq.resize(n, dof);
  traj.ddq.resize(n, dof);
  for (int k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / spec.sample_rate;
    traj.t[k] = t;
    for (int j = 0; j < dof; ++j) {
      const double om = 2.0 * M_PI * spec.frequency[j];
      const double ph = om * t + spec.phase[j];
      traj.q(k, j) = spec.theta0[j] + spec.amplitude[j] * std::sin(ph);
      traj.dq(k, j) = spec.amplitude[j] * om * std::cos(ph);
      traj.ddq(k, j) = -spec.amplitude[j] * om * om * std::sin(ph);
    }
  }
  return traj;
}

// Central divided differences on the interior, one-sided at the ends.
// Handles non-uniform timestamps.
inline VectorXd differentiate(const VectorXd& values, const VectorXd& t) {
  const int n = static_cast<int>(values.size());
  if (n < 2) throw std::invalid_argument("differentiate: need >= 2 samples");
  if (t.size() != n)
    throw std::invalid_argument("differentiate: timestamp length mismatch");
  VectorXd d(n);
  d[0] = (values[1] - values[0]) / (t[1] - t[0]);
  d[n - 1] = (values[n - 1] - values[n - 2]) / (t[n - 1] - t[n - 2]);
  for (int k = 1; k < n - 1; ++k) {
    const double h0 = t[k] - t[k - 1];
    const double h1 = t[k + 1] - t[k];
    // Three-point formula, exact on quadratics for any spacing.
    d[k] = (values[k + 1] * h0 * h0 - values[k - 1] * h1 * h1 +
            values[k] * (h1 * h1 - h0 * h0)) /
           (h0 * h1 * (h0 + h1));
  }
  return d;
}

inline MatrixXd differentiate_columns(const MatrixXd& values, const VectorXd& t) {
  MatrixXd d(values.rows(), values.cols());
  for (int c = 0; c < values.cols(); ++c)
    d.col(c) = differentiate(values.col(c), t);
  return d;
}

// Unit torque constants used when a torque-sensor robot does not supply
// k_m; the identified power coefficients then absorb the factors.
inline MotorConstants effective_motors(const RobotDescription& robot) {
  if (robot.motor_constants) return *robot.motor_constants;
  return MotorConstants{VectorXd::Ones(robot.dof())};
}

struct NoiseSpec {
  double meas_std = 0.0;   // absolute std dev per meas channel
  double power_std = 0.0;  // absolute std dev on the power channel
};

// Desk-scale ground-truth generator: sinusoidal excitation, meas from
// the inverse dynamics with the truth parameters, power from the
// electrical model (clamp off), optional seeded Gaussian noise.
inline OperationalDataset synth_generate(const RobotDescription& robot,
                                         const DynamicParameters& truth_dynamic,
                                         const PowerParameters& truth_power,
                                         const SinusoidSpec& spec,
                                         const NoiseSpec& noise = {},
                                         std::uint64_t seed = 0,
                                         BackEmfForm emf_form = BackEmfForm::Signed) {
  robot.validate();
  const int dof = robot.dof();
  if (spec.joints() != dof)
    throw std::invalid_argument("sinusoid spec joint count does not match robot");
  if (static_cast<int>(truth_dynamic.per_joint.size()) != dof)
    throw std::invalid_argument("truth dynamic parameters do not match robot DoF");
  truth_power.validate(dof);

  const TrajectoryData traj = generate_sinusoid(spec);
  const int n = static_cast<int>(traj.t.size());

  OperationalDataset ds;
  ds.t = traj.t;
  ds.q = traj.q;
  ds.dq = traj.dq;
  ds.ddq = traj.ddq;
  ds.meas.resize(n, dof);
  for (int k = 0; k < n; ++k)
    ds.meas.row(k) = predict_meas(robot, truth_dynamic, ds.state_at(k)).transpose();

  const MatrixXd dmeas = differentiate_columns(ds.meas, ds.t);
  const auto motors = effective_motors(robot);
  ds.power.resize(n);
  for (int k = 0; k < n; ++k) {
    const VectorXd row = power_regressor_row(
        ds.meas.row(k).transpose(), dmeas.row(k).transpose(),
        ds.dq.row(k).transpose(), robot.sensor_kind, motors, emf_form);
    ds.power[k] = row.dot(truth_power.k);
  }

  if (noise.meas_std > 0.0 || noise.power_std > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (noise.meas_std > 0.0)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < dof; ++j)
          ds.meas(k, j) += noise.meas_std * gauss(rng);
    if (noise.power_std > 0.0)
      for (int k = 0; k < n; ++k) ds.power[k] += noise.power_std * gauss(rng);
  }
  return ds;
}

}  // namespace remo
