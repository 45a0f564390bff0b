#ifndef FSVI_EXPERIMENTS_BLR_HPP
#define FSVI_EXPERIMENTS_BLR_HPP

#include <cstdint>

#include "fsvi/baselines/exact_blr.hpp"
#include "fsvi/experiments/common.hpp"
#include "fsvi/fit.hpp"
#include "fsvi/models/rbf.hpp"

namespace fsvi::experiments {

// RBF Bayesian linear regression on y = 2 cos x sin x - 0.1 x^2 + noise.
struct BlrSetup {
  Index data = 60;
  Index params = 20;  // M: M - 1 RBF centres plus the bias
  double width = 1.0;
  double noise_sd = 0.2;
  Index grid_points = 200;
  std::uint64_t data_seed = 7;
};

struct BlrProblem {
  RegressionData data;
  RbfDesign design;
  Mat features;
};

inline BlrProblem make_blr_problem(const BlrSetup& setup) {
  RegressionData data =
      synth_regression_data(setup.data, setup.data_seed, setup.noise_sd);
  Mat inputs = column(data.inputs);
  RbfDesign design =
      RbfDesign::from_inputs(inputs, setup.width, setup.params - 1);
  Mat features = design.features(inputs);
  return {std::move(data), std::move(design), std::move(features)};
}

inline FitConfig blr_fit_defaults() {
  FitConfig c;
  c.samples = 100;
  return c;
}

struct BlrResult {
  FitReport report;
  GaussianPosteriorExact exact;  // at the fitted alpha, beta
  Vec grid;
  Vec exact_mean_prediction;
  Vec proposed_mean_prediction;
  double prediction_rmse = 0.0;
  double covariance_rel_frobenius = 0.0;
};

// Fits the proposed posterior and compares it with exact inference at the
// same hyperparameters on an evenly spaced grid over [-6, 6].
inline BlrResult run_blr(const BlrSetup& setup, const FitConfig& config,
                         std::uint64_t seed) {
  BlrProblem problem = make_blr_problem(setup);
  LinearGaussianModel model(problem.features, problem.data.targets);
  BlrResult out;
  out.report = fit(model, config, seed);
  out.exact = exact_blr_posterior(problem.features, problem.data.targets,
                                  out.report.hyper.alpha,
                                  *out.report.hyper.beta);

  out.grid = Vec::LinSpaced(setup.grid_points, -6.0, 6.0);
  const Mat grid_features = problem.design.features(column(out.grid));
  out.exact_mean_prediction = grid_features * out.exact.mean;
  out.proposed_mean_prediction = grid_features * out.report.posterior.mean();
  out.prediction_rmse =
      std::sqrt((out.exact_mean_prediction - out.proposed_mean_prediction)
                    .squaredNorm() /
                static_cast<double>(setup.grid_points));
  out.covariance_rel_frobenius =
      (out.report.posterior.covariance() - out.exact.covariance).norm() /
      out.exact.covariance.norm();
  return out;
}

struct OverfitResult {
  FitReport report;
  Generalisation verdict = Generalisation::kOk;
};

// The overfitting study: S draws for training, S' for the holdout monitor.
inline FitConfig blr_overfit_config(Index samples, Index holdout = 500) {
  FitConfig c = blr_fit_defaults();
  c.samples = samples;
  c.holdout_samples = holdout;
  return c;
}

inline OverfitResult run_blr_overfit(const BlrSetup& setup,
                                     const FitConfig& config,
                                     std::uint64_t seed) {
  BlrProblem problem = make_blr_problem(setup);
  LinearGaussianModel model(problem.features, problem.data.targets);
  OverfitResult out;
  out.report = fit(model, config, seed);
  out.verdict = monitor_generalisation(out.report.trace);
  return out;
}

}  // namespace fsvi::experiments

#endif  // FSVI_EXPERIMENTS_BLR_HPP
