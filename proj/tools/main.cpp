#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "remo/remo.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitNumeric = 4;

// 4 significant digits for human summaries; files carry full precision.
std::string short4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

remo::VectorXd parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t consumed = 0;
      values.push_back(std::stod(cell, &consumed));
      if (consumed != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw remo::ParseError(what + ": bad numeric value '" + cell + "'");
    }
  }
  remo::VectorXd v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i];
  return v;
}

remo::BackEmfForm parse_emf(const std::string& s) {
  if (s == "signed") return remo::BackEmfForm::Signed;
  if (s == "abs") return remo::BackEmfForm::Abs;
  throw remo::ParseError("back-EMF form must be 'signed' or 'abs'");
}

void print_fit(const std::string& label, const remo::LeastSquaresReport& r,
               int unknowns) {
  std::cout << label << ": residual_rms=" << short4(r.residual_rms)
            << " rank=" << r.rank << "/" << unknowns
            << " condition=" << short4(r.condition_estimate);
  if (r.underdetermined) std::cout << " [underdetermined]";
  std::cout << "\n";
  if (r.ill_conditioned())
    std::cerr << "warning: " << label << " condition estimate "
              << short4(r.condition_estimate) << " exceeds 1e8\n";
}

int cmd_fixtures(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& robot : remo::all_fixtures()) {
    std::string base = robot.name;
    for (auto& c : base) c = static_cast<char>(std::tolower(c));
    const std::filesystem::path dir(out_dir);
    remo::save_robot_description(robot, dir / (base + ".json"));
    remo::save_sinusoid_spec(remo::default_sinusoid_spec(robot),
                             dir / (base + "_spec.json"));
    remo::save_truth(remo::default_truth(robot), dir / (base + "_truth.json"));
    std::cout << "wrote " << base << ".json, " << base << "_spec.json, "
              << base << "_truth.json\n";
  }
  return 0;
}

int cmd_synth(const std::string& robot_path, const std::string& spec_path,
              const std::string& truth_path, const std::string& out_path,
              std::uint64_t seed, double noise_meas, double noise_power,
              const std::string& emf) {
  const auto robot = remo::load_robot_description(robot_path);
  const auto spec = remo::load_sinusoid_spec(spec_path);
  const auto truth = remo::load_truth(truth_path);
  if (spec.violates_nyquist())
    std::cerr << "warning: sample_rate is not above twice the maximum "
                 "excitation frequency\n";
  const auto layout = remo::build_layout(robot);
  const auto truth_dyn = remo::DynamicParameters::uniform(
      layout, truth.dynamic_vector(layout), robot.dof());
  const auto ds =
      remo::synth_generate(robot, truth_dyn, truth.power, spec,
                           {noise_meas, noise_power}, seed, parse_emf(emf));
  remo::save_dataset(ds, out_path);
  std::cout << "wrote " << out_path << " (" << ds.samples() << " samples, "
            << ds.width() << " joints)\n";
  return 0;
}

int cmd_gen_train(const std::string& robot_path, const std::string& dataset_path,
                  const std::string& model_out, const std::string& name,
                  bool estimate_payload, const std::string& emf) {
  const auto robot = remo::load_robot_description(robot_path);
  const auto dataset = remo::load_dataset(dataset_path, robot.dof());
  remo::TrainingOptions options;
  options.estimate_payload = estimate_payload;
  options.emf_form = parse_emf(emf);
  const auto model = remo::gen_train_model(
      robot, dataset, name.empty() ? robot.name : name, options);
  remo::save_model(model, model_out);

  const int w = model.layout.total_count();
  for (int j = 0; j < robot.dof(); ++j)
    print_fit("joint " + std::to_string(j + 1) + " fit",
              model.joint_reports[j], w);
  print_fit("power fit", model.power_report,
            static_cast<int>(model.power_params.k.size()));
  if (model.meta.underdetermined(w))
    std::cerr << "warning: sample count " << model.meta.sample_count
              << " is below the number of unknowns " << w << "\n";
  std::cout << "wrote " << model_out << "\n";
  return 0;
}

int cmd_test(const std::string& model_path, const std::string& dataset_path,
             const std::string& report_out, const std::string& predictions_out,
             bool clamp) {
  const auto model = remo::load_model(model_path);
  const auto dataset = remo::load_dataset(dataset_path, model.robot.dof());
  const auto result = remo::test_model(model, dataset, clamp);
  const auto& rep = result.report;

  auto cell = [](const std::optional<double>& v) {
    return v ? remo::detail::fmt(*v) : std::string("n/a");
  };
  std::string report;
  report += "dataset\tRMSE_D\t%RMSE_D\tRMSE[W]\tRMSE%\tr2\n";
  report += dataset_path + "\t" + cell(rep.dynamic_rmse) + "\t" +
            cell(rep.dynamic_rmse_pct) + "\t" + cell(rep.power_rmse) + "\t" +
            cell(rep.power_rmse_pct) + "\t" + cell(rep.r2) + "\n";
  remo::atomic_write(report_out, report);

  if (!predictions_out.empty()) {
    const int dof = model.robot.dof();
    std::string out = "t,P_pred";
    if (dataset.has_power()) out += ",P_meas";
    out += ",constant,inductive,resistive,back_emf,driver,clamped";
    for (int j = 1; j <= dof; ++j) out += ",meas_pred_" + std::to_string(j);
    out += "\n";
    for (int k = 0; k < dataset.samples(); ++k) {
      const auto& p = result.power_series[k];
      out += remo::detail::fmt(dataset.t[k]);
      out += "," + remo::detail::fmt(p.total);
      if (dataset.has_power()) out += "," + remo::detail::fmt(dataset.power[k]);
      out += "," + remo::detail::fmt(p.constant);
      out += "," + remo::detail::fmt(p.inductive.sum());
      out += "," + remo::detail::fmt(p.resistive.sum());
      out += "," + remo::detail::fmt(p.back_emf.sum());
      out += "," + remo::detail::fmt(p.driver.sum());
      out += p.clamped ? ",1" : ",0";
      for (int j = 0; j < dof; ++j)
        out += "," + remo::detail::fmt(result.meas_pred(k, j));
      out += "\n";
    }
    remo::atomic_write(predictions_out, out);
  }

  std::cout << "samples: " << rep.sample_count << "\n";
  if (rep.dynamic_rmse)
    std::cout << "RMSE_D: " << short4(*rep.dynamic_rmse)
              << "  %RMSE_D: " << short4(*rep.dynamic_rmse_pct) << "\n";
  if (rep.power_rmse)
    std::cout << "RMSE[W]: " << short4(*rep.power_rmse)
              << "  RMSE%: " << short4(*rep.power_rmse_pct)
              << "  r2: " << short4(*rep.r2) << "\n";
  std::cout << "wrote " << report_out << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& q_text,
                const std::string& dq_text, const std::string& ddq_text) {
  const auto model = remo::load_model(model_path);
  remo::JointState state{parse_vector(q_text, "--q"),
                         parse_vector(dq_text, "--dq"),
                         parse_vector(ddq_text, "--ddq")};
  const auto pred = remo::pc_model(model, state);
  std::printf("power: %.4f W%s\n", pred.power,
              pred.breakdown.clamped ? " (clamped)" : "");
  std::printf("%s:", model.robot.sensor_kind == remo::SensorKind::Current
                         ? "currents"
                         : "torques");
  for (int j = 0; j < pred.meas.size(); ++j) std::printf(" %.4f", pred.meas[j]);
  std::printf("\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven energy-consumption modeling for serial manipulators"};
  app.require_subcommand(1);

  auto* fixtures = app.add_subcommand(
      "fixtures", "Write the bundled robot, excitation, and truth files");
  std::string out_dir = ".";
  fixtures->add_option("--out-dir", out_dir, "Output directory");

  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic operational dataset");
  std::string robot_path, spec_path, truth_path, out_path, emf = "signed";
  std::uint64_t seed = 0;
  double noise_meas = 0.0, noise_power = 0.0;
  synth->add_option("--robot", robot_path, "Robot description file")->required();
  synth->add_option("--spec", spec_path, "Sinusoid excitation spec file")->required();
  synth->add_option("--truth", truth_path, "Ground-truth parameter file")->required();
  synth->add_option("--out", out_path, "Output dataset file")->required();
  synth->add_option("--seed", seed, "Noise RNG seed");
  synth->add_option("--noise-meas", noise_meas, "Gaussian std dev on meas channels");
  synth->add_option("--noise-power", noise_power, "Gaussian std dev on power channel");
  synth->add_option("--emf-form", emf, "Back-EMF regressor form: signed|abs");

  auto* gen_train = app.add_subcommand(
      "gen-train", "Generate and train dynamic and power models");
  std::string dataset_path, model_out, model_name;
  bool estimate_payload = false;
  gen_train->add_option("--robot", robot_path, "Robot description file")->required();
  gen_train->add_option("--dataset", dataset_path, "Training dataset file")->required();
  gen_train->add_option("--model-out", model_out, "Output model file")->required();
  gen_train->add_option("--name", model_name, "Model name (defaults to robot name)");
  gen_train->add_flag("--estimate-payload", estimate_payload,
                      "Include payload wrench in the unknowns");
  gen_train->add_option("--emf-form", emf, "Back-EMF regressor form: signed|abs");

  auto* test = app.add_subcommand("test", "Evaluate a trained model on a dataset");
  std::string model_path, report_out, predictions_out;
  bool no_clamp = false;
  test->add_option("--model", model_path, "Trained model file")->required();
  test->add_option("--dataset", dataset_path, "Test dataset file")->required();
  test->add_option("--report-out", report_out, "Metrics report file")->required();
  test->add_option("--predictions-out", predictions_out,
                   "Per-sample prediction export file");
  test->add_flag("--no-clamp", no_clamp, "Disable the non-negative power clamp");

  auto* predict = app.add_subcommand(
      "predict", "Single-point power and torque/current prediction");
  std::string q_text, dq_text, ddq_text;
  predict->add_option("--model", model_path, "Trained model file")->required();
  predict->add_option("--q", q_text, "Joint positions, comma-separated")->required();
  predict->add_option("--dq", dq_text, "Joint velocities, comma-separated")->required();
  predict->add_option("--ddq", ddq_text, "Joint accelerations, comma-separated")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    std::cerr << "error[usage]: invalid command line\n";
    return kExitUsage;
  }

  try {
    if (*fixtures) return cmd_fixtures(out_dir);
    if (*synth)
      return cmd_synth(robot_path, spec_path, truth_path, out_path, seed,
                       noise_meas, noise_power, emf);
    if (*gen_train)
      return cmd_gen_train(robot_path, dataset_path, model_out, model_name,
                           estimate_payload, emf);
    if (*test)
      return cmd_test(model_path, dataset_path, report_out, predictions_out,
                      !no_clamp);
    if (*predict) return cmd_predict(model_path, q_text, dq_text, ddq_text);
  } catch (const remo::ParseError& e) {
    std::cerr << "error[input]: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error[input]: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error[numeric]: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
