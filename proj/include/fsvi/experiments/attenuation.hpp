#ifndef FSVI_EXPERIMENTS_ATTENUATION_HPP
#define FSVI_EXPERIMENTS_ATTENUATION_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fsvi/baselines/laplace.hpp"
#include "fsvi/eval/metrics.hpp"
#include "fsvi/experiments/common.hpp"
#include "fsvi/fit.hpp"
#include "fsvi/models/attenuation.hpp"

namespace fsvi::experiments {

struct AttenuationSetup {
  Index pool = 600;     // records generated once
  Index train = 100;    // per split; the remaining records are the test set
  Index splits = 10;
  Index sources = 8;    // E, giving E + 3 parameters
  double noise_sd = 0.5;
  int predictive_draws = 200;
  // Laplace rejects -H whose smallest eigenvalue falls below this fraction
  // of the largest. Weakly identified source terms make the stand-in's
  // Hessian positive definite but badly conditioned, so the library
  // default would reject it.
  double laplace_min_curvature = 1e-12;
  std::uint64_t data_seed = 21;
};

inline FitConfig attenuation_fit_defaults() {
  FitConfig c;
  c.samples = 1000;
  c.holdout_samples = 0;
  c.max_iter = 200;
  c.init_scale = 0.01;
  // Start mu at the likelihood maximum.
  c.ml_warm_start = true;
  return c;
}

// Average over parameter draws of the test mean squared error. A failed
// Laplace fit is reported as NaN.
struct AttenuationSplit {
  double proposed_mse = 0.0;
  double laplace_mse = 0.0;
  std::string laplace_failure;
};

struct AttenuationResult {
  std::vector<AttenuationSplit> splits;
  MeanStd proposed;
  MeanStd laplace;      // over splits where Laplace succeeded
  Index laplace_failures = 0;
};

namespace pipeline {

// Mean over draws w ~ N(mean, factor factor^T) of mse(predict(w), y).
inline double sampled_mse(const AttenuationModel& test_model, const Vec& mean,
                          const Mat& factor, int draws, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Vec z(mean.size());
  double total = 0.0;
  for (int d = 0; d < draws; ++d) {
    for (Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    total += mse(test_model.predict(mean + factor * z), test_model.targets());
  }
  return total / static_cast<double>(draws);
}

}  // namespace pipeline

// Repeated random train/test splits of one synthetic record pool. Each
// split fits the proposed posterior (flat prior, Gaussian noise) and a
// Laplace approximation with beta = N / RSS at the mode, and scores both by
// the draw-averaged test MSE. Split i uses seed + i.
inline AttenuationResult run_attenuation(const AttenuationSetup& setup,
                                         const FitConfig& config,
                                         std::uint64_t seed) {
  const AttenuationProblem problem = synth_attenuation_problem(
      setup.pool, setup.data_seed, setup.sources, setup.noise_sd);
  detail::require(setup.train < setup.pool, ErrorKind::kConfig,
                        "training size must be below the pool size");

  AttenuationResult out;
  std::vector<double> proposed, laplace;
  for (Index i = 1; i <= setup.splits; ++i) {
    const std::uint64_t split_seed = seed + static_cast<std::uint64_t>(i);
    std::vector<Index> rows(static_cast<size_t>(setup.pool));
    std::iota(rows.begin(), rows.end(), Index{0});
    Rng rng(split_seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    const std::vector<Index> train_rows(rows.begin(), rows.begin() + setup.train);
    const std::vector<Index> test_rows(rows.begin() + setup.train, rows.end());
    const AttenuationModel train_model(problem.data.subset(train_rows),
                                       problem.corner_base);
    const AttenuationModel test_model(problem.data.subset(test_rows),
                                      problem.corner_base);

    AttenuationSplit split;
    AttenuationModel fit_model = train_model;
    FitConfig c = config;
    if (!c.init_mean) c.init_mean = Vec::Zero(train_model.dim());
    const FitReport report = fit(fit_model, c, split_seed);
    split.proposed_mse = pipeline::sampled_mse(
        test_model, report.posterior.mean(), report.posterior.factor(),
        setup.predictive_draws, split_seed + 1);
    proposed.push_back(split.proposed_mse);

    try {
      LaplaceOptions opt;
      opt.seed = split_seed;
      opt.min_curvature = setup.laplace_min_curvature;
      Hyperparameters unit_noise;
      unit_noise.beta = 1.0;
      const Vec mode = laplace_fit(train_model, unit_noise,
                                   Vec::Zero(train_model.dim()), opt)
                           .posterior.mean;
      Hyperparameters hyper;
      hyper.beta = static_cast<double>(train_model.num_observations()) /
                   train_model.squared_residual(mode);
      opt.restarts = 1;
      const GaussianPosteriorExact lap =
          laplace_approximation(train_model, hyper, mode, opt);
      const Eigen::LLT<Mat> chol(lap.covariance);
      split.laplace_mse = pipeline::sampled_mse(test_model, lap.mean,
                                              chol.matrixL(),
                                              setup.predictive_draws,
                                              split_seed + 1);
      laplace.push_back(split.laplace_mse);
    } catch (const Error& e) {
      split.laplace_mse = std::numeric_limits<double>::quiet_NaN();
      split.laplace_failure = e.what();
      ++out.laplace_failures;
    }
    out.splits.push_back(split);
  }
  out.proposed = mean_std(proposed);
  out.laplace = mean_std(laplace);
  return out;
}

}  // namespace fsvi::experiments

#endif  // FSVI_EXPERIMENTS_ATTENUATION_HPP
