#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "remo/remo.hpp"

using namespace remo;

TEST_CASE("rmse by hand") {
  VectorXd real(4), est(4);
  real << 1, 2, 3, 4;
  est << 2, 4, 6, 8;
  // errors 1,2,3,4 -> mean square 30/4 -> sqrt(7.5)
  CHECK(rmse(real, est) == doctest::Approx(std::sqrt(7.5)).epsilon(1e-14));
  CHECK(rmse(real, real) == 0.0);
}

TEST_CASE("rmse of a constant offset is the offset magnitude") {
  VectorXd real(5);
  real << 1, 2, 3, 4, 5;
  const VectorXd est = real.array() - 2.5;
  CHECK(rmse(real, est) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("rmse rejects empty or mismatched series") {
  CHECK_THROWS_AS(rmse(VectorXd(), VectorXd()), std::invalid_argument);
  CHECK_THROWS_AS(rmse(VectorXd::Ones(2), VectorXd::Ones(3)),
                  std::invalid_argument);
}

TEST_CASE("rmse_pct normalizes by the range") {
  VectorXd real(3), est(3);
  real << 0, 5, 10;  // range 10
  est << 1, 6, 11;   // rmse 1
  CHECK(rmse_pct(real, est) == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("rmse_pct errors on a zero-range series") {
  VectorXd real = VectorXd::Constant(4, 3.0);
  CHECK_THROWS_AS(rmse_pct(real, real), std::invalid_argument);
}

TEST_CASE("r_squared by hand") {
  VectorXd real(4), est(4);
  real << 1, 2, 3, 4;  // mean 2.5, ss_tot = 5
  est << 1, 2, 3, 4;
  CHECK(r_squared(real, est) == doctest::Approx(1.0));
  est << 1.5, 2.5, 3.5, 4.5;  // ss_res = 4 * 0.25 = 1
  CHECK(r_squared(real, est) == doctest::Approx(1.0 - 1.0 / 5.0).epsilon(1e-14));
  // Predicting the mean everywhere scores exactly zero.
  est.setConstant(2.5);
  CHECK(r_squared(real, est) == doctest::Approx(0.0));
  // Worse than the mean goes negative and is reported as-is.
  est << 4, 3, 2, 1;
  CHECK(r_squared(real, est) < 0.0);
  CHECK(r_squared(real, est) == doctest::Approx(1.0 - 20.0 / 5.0).epsilon(1e-14));
}

TEST_CASE("r_squared errors on zero variance") {
  VectorXd real = VectorXd::Constant(3, 1.0);
  CHECK_THROWS_AS(r_squared(real, real), std::invalid_argument);
}

TEST_CASE("rmse_dynamic pools over joints and averages percentages") {
  MatrixXd real(2, 2), est(2, 2);
  real << 0, 0,
          1, 2;
  est = real;
  est(0, 0) += 1.0;  // single error of 1 over 4 entries
  const auto [pooled, pct] = rmse_dynamic(real, est);
  CHECK(pooled == doctest::Approx(std::sqrt(0.25)).epsilon(1e-14));
  // joint 1: rmse sqrt(1/2), range 1 -> 70.71%; joint 2: 0%
  const double pct1 = std::sqrt(0.5) * 100.0;
  CHECK(pct == doctest::Approx(pct1 / 2.0).epsilon(1e-12));
}

TEST_CASE("rmse_dynamic rejects shape mismatch and zero-range joints") {
  CHECK_THROWS_AS(rmse_dynamic(MatrixXd::Zero(2, 2), MatrixXd::Zero(3, 2)),
                  std::invalid_argument);
  MatrixXd real(2, 2), est(2, 2);
  real << 1, 0,
          2, 0;  // second joint has zero range
  est = real;
  CHECK_THROWS_AS(rmse_dynamic(real, est), std::invalid_argument);
}

TEST_CASE("rmse is symmetric in its arguments") {
  VectorXd a(3), b(3);
  a << 1, 4, 9;
  b << 2, 2, 7;
  CHECK(rmse(a, b) == doctest::Approx(rmse(b, a)).epsilon(1e-15));
}

TEST_CASE("test_model reports metrics only for present channels") {
  const auto robot = fixture_ur3e();
  const auto layout = build_layout(robot);
  const auto truth = default_truth(robot);
  auto spec = default_sinusoid_spec(robot);
  spec.duration = 0.5;
  const auto dataset = synth_generate(
      robot, DynamicParameters::uniform(layout, truth.dynamic_vector(layout), 6),
      truth.power, spec);
  const auto model = gen_train_model(robot, dataset, "ur3e");

  const auto full = test_model(model, dataset);
  REQUIRE(full.report.dynamic_rmse.has_value());
  REQUIRE(full.report.power_rmse.has_value());
  REQUIRE(full.report.r2.has_value());
  CHECK(*full.report.dynamic_rmse < 1e-9);
  CHECK(*full.report.power_rmse < 1e-7);
  CHECK(*full.report.r2 == doctest::Approx(1.0));
  CHECK(full.report.per_joint_rmse.size() == 6);
  CHECK(full.report.sample_count == dataset.samples());

  auto stripped = dataset;
  stripped.meas.resize(0, 0);
  stripped.power.resize(0);
  const auto bare = test_model(model, stripped);
  CHECK(!bare.report.dynamic_rmse.has_value());
  CHECK(!bare.report.power_rmse.has_value());
  CHECK(!bare.report.r2.has_value());
  CHECK(bare.meas_pred.rows() == dataset.samples());
  CHECK(bare.power_pred.size() == dataset.samples());
}

TEST_CASE("pc_model matches a manual single-point evaluation") {
  const auto robot = fixture_ur3e();
  const auto layout = build_layout(robot);
  const auto truth = default_truth(robot);
  auto spec = default_sinusoid_spec(robot);
  spec.duration = 0.5;
  const auto dataset = synth_generate(
      robot, DynamicParameters::uniform(layout, truth.dynamic_vector(layout), 6),
      truth.power, spec);
  const auto model = gen_train_model(robot, dataset, "ur3e");

  JointState state = dataset.state_at(17);
  const auto point = pc_model(model, state);
  const VectorXd meas = predict_meas(robot, model.dynamic_params, state);
  CHECK((point.meas - meas).cwiseAbs().maxCoeff() < 1e-12);
  const auto manual = predict_power(
      model.power_params, meas, VectorXd::Zero(6), state.dq,
      robot.sensor_kind, effective_motors(robot), model.emf_form);
  CHECK(point.power == doctest::Approx(manual.total).epsilon(1e-12));
  CHECK_THROWS_AS(
      pc_model(model, JointState{VectorXd::Zero(5), VectorXd::Zero(5),
                                 VectorXd::Zero(5)}),
      std::invalid_argument);
}
