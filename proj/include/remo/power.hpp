#pragma once

#include "remo/identification.hpp"

namespace remo {

// One sample of the electrical power model with the per-component
// breakdown. total is post-clamp; total_raw is the plain sum.
struct PowerPrediction {
  double total = 0.0;
  double total_raw = 0.0;
  double constant = 0.0;
  VectorXd inductive;  // L i di/dt per joint
  VectorXd resistive;  // R i^2 per joint
  VectorXd back_emf;   // k_t dq i per joint
  VectorXd driver;     // k_MD |i| per joint
  bool clamped = false;
};

// Termwise evaluation of the power model. The clamp models the braking
// resistor that keeps consumption non-negative; it must stay off during
// identification since it breaks linearity.
inline PowerPrediction predict_power(const PowerParameters& params,
                                     const VectorXd& x, const VectorXd& dxdt,
                                     const VectorXd& dq, SensorKind kind,
                                     const std::optional<MotorConstants>& motors,
                                     BackEmfForm emf_form = BackEmfForm::Signed,
                                     bool clamp = true) {
  const int dof = static_cast<int>(x.size());
  params.validate(dof);
  const VectorXd row = power_regressor_row(x, dxdt, dq, kind, motors, emf_form);

  PowerPrediction pred;
  pred.constant = params.k[0];
  pred.inductive.resize(dof);
  pred.resistive.resize(dof);
  pred.back_emf.resize(dof);
  pred.driver.resize(dof);
  for (int j = 0; j < dof; ++j) {
    pred.inductive[j] = params.k[1 + 4 * j + 0] * row[1 + 4 * j + 0];
    pred.resistive[j] = params.k[1 + 4 * j + 1] * row[1 + 4 * j + 1];
    pred.back_emf[j] = params.k[1 + 4 * j + 2] * row[1 + 4 * j + 2];
    pred.driver[j] = params.k[1 + 4 * j + 3] * row[1 + 4 * j + 3];
  }
  pred.total_raw = row.dot(params.k);
  if (clamp && pred.total_raw < 0.0) {
    pred.total = 0.0;
    pred.clamped = true;
  } else {
    pred.total = pred.total_raw;
  }
  return pred;
}

// Per-sample power prediction over a dataset. Uses the dataset's
// measured currents/torques when present, otherwise the ones predicted
// by the dynamic model. Derivatives come from divided differences on
// the timestamps.
inline std::vector<PowerPrediction> predict_power_series(
    const TrainedModel& model, const OperationalDataset& dataset,
    bool clamp = true) {
  const int dof = model.robot.dof();
  if (dataset.samples() == 0) return {};
  dataset.validate(dof);
  const int n = dataset.samples();

  MatrixXd x;
  if (dataset.has_meas()) {
    x = dataset.meas;
  } else {
    x.resize(n, dof);
    detail::parallel_for(n, [&](int k) {
      x.row(k) =
          predict_meas(model.robot, model.dynamic_params, dataset.state_at(k))
              .transpose();
    });
  }
  const MatrixXd dxdt =
      n >= 2 ? differentiate_columns(x, dataset.t) : MatrixXd::Zero(n, dof);
  const auto motors = effective_motors(model.robot);

  std::vector<PowerPrediction> out(n);
  for (int k = 0; k < n; ++k)
    out[k] = predict_power(model.power_params, x.row(k).transpose(),
                           dxdt.row(k).transpose(), dataset.dq.row(k).transpose(),
                           model.robot.sensor_kind, motors, model.emf_form, clamp);
  return out;
}

inline VectorXd power_totals(const std::vector<PowerPrediction>& series) {
  VectorXd totals(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) totals[k] = series[k].total;
  return totals;
}

}  // namespace remo
