#pragma once

#include <atomic>
#include <thread>

#include "remo/datasets.hpp"

namespace remo {

struct LeastSquaresReport {
  VectorXd solution;
  double residual_rms = 0.0;
  int rank = 0;
  double condition_estimate = 0.0;
  bool underdetermined = false;  // fewer samples than unknowns

  bool ill_conditioned() const { return condition_estimate > 1e8; }
};

// Minimizes ||design x - targets||_2 through an SVD; rank-deficient
// systems get the minimum-norm solution. Normal equations are avoided
// because they square the condition number.
inline LeastSquaresReport fit_least_squares(const MatrixXd& design,
                                            const VectorXd& targets) {
  const int n = static_cast<int>(design.rows());
  const int w = static_cast<int>(design.cols());
  if (n < 1) throw std::invalid_argument("fit_least_squares: no samples");
  if (targets.size() != n)
    throw std::invalid_argument("fit_least_squares: target length mismatch");
  if (!design.allFinite() || !targets.allFinite())
    throw std::invalid_argument("fit_least_squares: non-finite entries");

  Eigen::BDCSVD<MatrixXd> svd(design,
                              Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  const double tol =
      smax * static_cast<double>(std::max(n, w)) *
      std::numeric_limits<double>::epsilon();

  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++rank;

  LeastSquaresReport report;
  report.rank = rank;
  report.underdetermined = n < w;
  report.condition_estimate =
      rank > 0 ? smax / sv[rank - 1] : std::numeric_limits<double>::infinity();

  // Truncated pseudo-inverse applied to the targets.
  VectorXd y = svd.matrixU().transpose() * targets;
  for (int i = 0; i < sv.size(); ++i) y[i] = i < rank ? y[i] / sv[i] : 0.0;
  report.solution = svd.matrixV() * y;

  report.residual_rms =
      (design * report.solution - targets).norm() / std::sqrt(double(n));
  return report;
}

// Least squares with unit-norm column equilibration. The scaling leaves
// the row space (and so per-coordinate identifiability) unchanged while
// keeping the decomposition well conditioned across mixed units.
inline LeastSquaresReport fit_least_squares_equilibrated(
    const MatrixXd& design, const VectorXd& targets) {
  const int w = static_cast<int>(design.cols());
  VectorXd scale(w);
  for (int k = 0; k < w; ++k) {
    const double nrm = design.col(k).norm();
    scale[k] = nrm > 0.0 ? nrm : 1.0;
  }
  MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  LeastSquaresReport report = fit_least_squares(scaled, targets);
  report.solution = report.solution.cwiseQuotient(scale);
  report.residual_rms =
      (design * report.solution - targets).norm() /
      std::sqrt(static_cast<double>(design.rows()));
  return report;
}

// A parameter coordinate is identifiable when its basis direction lies
// in the row space of the design matrix, i.e. has no component in the
// null space. The null space is taken from an equilibrated SVD for a
// reliable rank, then mapped back to the original column units and
// orthonormalized there: a coordinate's projection onto that basis
// bounds how far the fitted value can drift from any exact solution.
inline std::vector<bool> identifiable_parameters(const MatrixXd& design,
                                                 double tol = 1e-6) {
  const int w = static_cast<int>(design.cols());
  VectorXd scale(w);
  for (int k = 0; k < w; ++k) {
    const double nrm = design.col(k).norm();
    scale[k] = nrm > 0.0 ? nrm : 1.0;
  }
  const MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  Eigen::BDCSVD<MatrixXd> svd(scaled, Eigen::ComputeFullV);
  const VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  const double rank_tol =
      smax *
      static_cast<double>(std::max(design.rows(), design.cols())) *
      std::numeric_limits<double>::epsilon();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > rank_tol) ++rank;

  if (rank == w) return std::vector<bool>(w, true);

  // Null basis in original coordinates: scaled null vectors divided by
  // the column scales, re-orthonormalized.
  MatrixXd null_basis = svd.matrixV().rightCols(w - rank);
  for (int k = 0; k < w; ++k) null_basis.row(k) /= scale[k];
  const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(null_basis)
                         .householderQ() *
                     MatrixXd::Identity(w, w - rank);
  std::vector<bool> mask(w, false);
  for (int k = 0; k < w; ++k) mask[k] = q.row(k).norm() < tol;
  return mask;
}

namespace detail {

template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  const unsigned threads =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                         static_cast<unsigned>(n) > 0 ? n : 1);
  if (threads <= 1 || n < 256) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::atomic<int> next{0};
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      constexpr int kChunk = 64;
      for (;;) {
        const int begin = next.fetch_add(kChunk);
        if (begin >= n) return;
        const int end = std::min(begin + kChunk, n);
        for (int i = begin; i < end; ++i) fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Regressor rows for every sample and joint. designs[j] is samples x
// total_count; offsets is samples x dof. Rows are written to
// preallocated positions, so the result is independent of thread count.
struct DynamicDesign {
  std::vector<MatrixXd> designs;
  MatrixXd offsets;
};

inline DynamicDesign assemble_dynamic_design(const RobotDescription& robot,
                                             const OperationalDataset& dataset,
                                             const ParameterLayout& layout) {
  const int dof = robot.dof();
  const int n = dataset.samples();
  const int w = layout.total_count();
  DynamicDesign design;
  design.offsets.resize(n, dof);
  design.designs.assign(dof, MatrixXd(n, w));
  detail::parallel_for(n, [&](int k) {
    const RegressorBatch batch =
        dynamic_regressor(robot, dataset.state_at(k), layout);
    design.offsets.row(k) = batch.offset.transpose();
    for (int j = 0; j < dof; ++j) design.designs[j].row(k) = batch.coeffs.row(j);
  });
  return design;
}

struct DynamicFit {
  DynamicParameters params;
  std::vector<LeastSquaresReport> reports;  // one per joint
};

// Per-joint independent least squares on targets with the known offset
// removed.
inline DynamicFit train_dynamic_model(const RobotDescription& robot,
                                      const OperationalDataset& dataset,
                                      const ParameterLayout& layout) {
  robot.validate();
  dataset.validate(robot.dof());
  if (!dataset.has_meas())
    throw std::invalid_argument(
        "train_dynamic_model: dataset has no torque/current channel");
  const int dof = robot.dof();
  const DynamicDesign design = assemble_dynamic_design(robot, dataset, layout);

  DynamicFit fit;
  fit.params.layout = layout;
  fit.params.per_joint.resize(dof);
  fit.reports.resize(dof);
  for (int j = 0; j < dof; ++j) {
    const VectorXd targets = dataset.meas.col(j) - design.offsets.col(j);
    fit.reports[j] = fit_least_squares_equilibrated(design.designs[j], targets);
    fit.params.per_joint[j] = fit.reports[j].solution;
  }
  return fit;
}

struct PowerFit {
  PowerParameters params;
  LeastSquaresReport report;
};

inline MatrixXd assemble_power_design(const RobotDescription& robot,
                                      const OperationalDataset& dataset,
                                      BackEmfForm emf_form) {
  const int n = dataset.samples();
  if (n < 2)
    throw std::invalid_argument(
        "power training needs >= 2 samples to estimate derivatives");
  const MatrixXd dmeas = differentiate_columns(dataset.meas, dataset.t);
  const auto motors = effective_motors(robot);
  MatrixXd design(n, 1 + 4 * robot.dof());
  detail::parallel_for(n, [&](int k) {
    design.row(k) = power_regressor_row(
        dataset.meas.row(k).transpose(), dmeas.row(k).transpose(),
        dataset.dq.row(k).transpose(), robot.sensor_kind, motors, emf_form)
        .transpose();
  });
  return design;
}

inline PowerFit train_power_model(const RobotDescription& robot,
                                  const OperationalDataset& dataset,
                                  BackEmfForm emf_form = BackEmfForm::Signed) {
  robot.validate();
  dataset.validate(robot.dof());
  if (!dataset.has_meas())
    throw std::invalid_argument(
        "train_power_model: dataset has no torque/current channel");
  if (!dataset.has_power())
    throw std::invalid_argument("train_power_model: dataset has no power channel");
  const MatrixXd design = assemble_power_design(robot, dataset, emf_form);
  PowerFit fit;
  fit.report = fit_least_squares_equilibrated(design, dataset.power);
  fit.params.k = fit.report.solution;
  return fit;
}

struct TrainingMeta {
  std::size_t sample_count = 0;
  double t_begin = 0.0;
  double t_end = 0.0;

  bool underdetermined(int unknowns) const {
    return sample_count < static_cast<std::size_t>(unknowns);
  }
};

struct TrainedModel {
  std::string name;
  RobotDescription robot;
  ParameterLayout layout;
  DynamicParameters dynamic_params;
  PowerParameters power_params;
  BackEmfForm emf_form = BackEmfForm::Signed;
  TrainingMeta meta;
  std::vector<LeastSquaresReport> joint_reports;
  LeastSquaresReport power_report;
};

struct TrainingOptions {
  bool estimate_payload = false;
  BackEmfForm emf_form = BackEmfForm::Signed;
};

// End-to-end pipeline: layout generation, per-joint dynamic fits, power
// fit. Persistence is the caller's concern (see model_io.hpp).
inline TrainedModel gen_train_model(const RobotDescription& robot,
                                    const OperationalDataset& dataset,
                                    const std::string& name,
                                    const TrainingOptions& options = {}) {
  robot.validate();
  dataset.validate(robot.dof());
  const ParameterLayout layout = build_layout(robot, options.estimate_payload);
  DynamicFit dyn = train_dynamic_model(robot, dataset, layout);
  PowerFit pow = train_power_model(robot, dataset, options.emf_form);

  TrainedModel model;
  model.name = name;
  model.robot = robot;
  model.layout = layout;
  model.dynamic_params = std::move(dyn.params);
  model.power_params = std::move(pow.params);
  model.emf_form = options.emf_form;
  model.meta.sample_count = static_cast<std::size_t>(dataset.samples());
  model.meta.t_begin = dataset.t[0];
  model.meta.t_end = dataset.t[dataset.samples() - 1];
  model.joint_reports = std::move(dyn.reports);
  model.power_report = std::move(pow.report);
  return model;
}

}  // namespace remo
