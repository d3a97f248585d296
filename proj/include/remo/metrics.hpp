#pragma once

#include <optional>

#include "remo/power.hpp"

namespace remo {

inline double rmse(const VectorXd& real, const VectorXd& est) {
  if (real.size() == 0 || real.size() != est.size())
    throw std::invalid_argument("rmse: empty or mismatched series");
  return std::sqrt((real - est).squaredNorm() /
                   static_cast<double>(real.size()));
}

// RMSE normalized by the range of the real series, in percent.
inline double rmse_pct(const VectorXd& real, const VectorXd& est) {
  const double range = real.maxCoeff() - real.minCoeff();
  if (!(range > 0.0))
    throw std::invalid_argument(
        "rmse_pct: real series has zero range, relative error undefined");
  return rmse(real, est) / range * 100.0;
}

// Coefficient of determination, 1 - SS_res/SS_tot about the mean of the
// real series. Values below zero are reported as-is.
inline double r_squared(const VectorXd& real, const VectorXd& est) {
  if (real.size() == 0 || real.size() != est.size())
    throw std::invalid_argument("r_squared: empty or mismatched series");
  const double mean = real.mean();
  const double ss_tot = (real.array() - mean).matrix().squaredNorm();
  if (!(ss_tot > 0.0))
    throw std::invalid_argument("r_squared: real series has zero variance");
  const double ss_res = (real - est).squaredNorm();
  return 1.0 - ss_res / ss_tot;
}

// Pooled RMSE over all joints and samples, and the average of per-joint
// percentage RMSEs. The two aggregate differently on purpose.
inline std::pair<double, double> rmse_dynamic(const MatrixXd& real,
                                              const MatrixXd& est) {
  if (real.rows() == 0 || real.rows() != est.rows() ||
      real.cols() != est.cols())
    throw std::invalid_argument("rmse_dynamic: shape mismatch");
  const double pooled = std::sqrt(
      (real - est).squaredNorm() / static_cast<double>(real.size()));
  double pct_sum = 0.0;
  for (int j = 0; j < real.cols(); ++j) {
    try {
      pct_sum += rmse_pct(real.col(j), est.col(j));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("rmse_dynamic: joint " + std::to_string(j) +
                                  " has zero range");
    }
  }
  return {pooled, pct_sum / static_cast<double>(real.cols())};
}

struct EvaluationReport {
  std::optional<double> power_rmse;      // W
  std::optional<double> power_rmse_pct;  // %
  std::optional<double> r2;
  std::optional<double> dynamic_rmse;      // A or N*m
  std::optional<double> dynamic_rmse_pct;  // %
  VectorXd per_joint_rmse;
  VectorXd per_joint_rmse_pct;
  int sample_count = 0;
};

struct TestResult {
  EvaluationReport report;
  VectorXd power_pred;
  MatrixXd meas_pred;
  std::vector<PowerPrediction> power_series;
};

// Evaluates a trained model on a dataset: per-joint torque/current
// prediction, power prediction, and the headline metrics. Power and
// dynamic metrics are produced only when the dataset carries the
// corresponding measured channel.
inline TestResult test_model(const TrainedModel& model,
                             const OperationalDataset& dataset,
                             bool clamp = true) {
  const int dof = model.robot.dof();
  dataset.validate(dof);
  const int n = dataset.samples();

  TestResult result;
  result.report.sample_count = n;

  result.meas_pred.resize(n, dof);
  detail::parallel_for(n, [&](int k) {
    result.meas_pred.row(k) =
        predict_meas(model.robot, model.dynamic_params, dataset.state_at(k))
            .transpose();
  });

  result.power_series = predict_power_series(model, dataset, clamp);
  result.power_pred = power_totals(result.power_series);

  if (dataset.has_meas()) {
    const auto [pooled, pct] = rmse_dynamic(dataset.meas, result.meas_pred);
    result.report.dynamic_rmse = pooled;
    result.report.dynamic_rmse_pct = pct;
    result.report.per_joint_rmse.resize(dof);
    result.report.per_joint_rmse_pct.resize(dof);
    for (int j = 0; j < dof; ++j) {
      result.report.per_joint_rmse[j] =
          rmse(dataset.meas.col(j), result.meas_pred.col(j));
      result.report.per_joint_rmse_pct[j] =
          rmse_pct(dataset.meas.col(j), result.meas_pred.col(j));
    }
  }
  if (dataset.has_power()) {
    result.report.power_rmse = rmse(dataset.power, result.power_pred);
    result.report.power_rmse_pct = rmse_pct(dataset.power, result.power_pred);
    result.report.r2 = r_squared(dataset.power, result.power_pred);
  }
  return result;
}

struct PointPrediction {
  double power = 0.0;
  VectorXd meas;
  PowerPrediction breakdown;
};

// Single-point prediction. An isolated sample has no derivative, so
// di/dt is taken as zero here; the series path differs by that term.
inline PointPrediction pc_model(const TrainedModel& model,
                                const JointState& state, bool clamp = true) {
  state.validate(model.robot.dof());
  PointPrediction out;
  out.meas = predict_meas(model.robot, model.dynamic_params, state);
  const VectorXd zero = VectorXd::Zero(model.robot.dof());
  out.breakdown = predict_power(model.power_params, out.meas, zero, state.dq,
                                model.robot.sensor_kind,
                                effective_motors(model.robot), model.emf_form,
                                clamp);
  out.power = out.breakdown.total;
  return out;
}

}  // namespace remo
