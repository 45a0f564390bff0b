#ifndef FSVI_EXPERIMENTS_BIVARIATE_HPP
#define FSVI_EXPERIMENTS_BIVARIATE_HPP

#include <cstdint>
#include <vector>

#include "fsvi/baselines/laplace.hpp"
#include "fsvi/eval/kld.hpp"
#include "fsvi/experiments/common.hpp"
#include "fsvi/fit.hpp"
#include "fsvi/models/azzalini.hpp"

namespace fsvi::experiments {

inline FitConfig bivariate_fit_defaults() {
  FitConfig c;
  c.samples = 50;
  c.holdout_samples = 0;
  return c;
}

struct BivariateRow {
  AzzaliniTarget::Coefficients coefficients{};
  GaussianPosteriorExact proposed;
  GaussianPosteriorExact laplace;
  // KL(target || approximation) and KL(approximation || target)
  double proposed_target_to_approx = 0.0;
  double proposed_approx_to_target = 0.0;
  double laplace_target_to_approx = 0.0;
  double laplace_approx_to_target = 0.0;
  FitReport report;
};

struct BivariateSetup {
  double half_width = 8.0;
  Index resolution = 256;
};

inline BivariateRow run_bivariate_one(const AzzaliniTarget::Coefficients& a,
                                      const BivariateSetup& setup,
                                      const FitConfig& config,
                                      std::uint64_t seed) {
  AzzaliniTarget target(a);
  BivariateRow row;
  row.coefficients = a;
  row.report = fit(target, config, seed);
  row.proposed.mean = row.report.posterior.mean();
  row.proposed.covariance = row.report.posterior.covariance();

  LaplaceOptions lopt;
  lopt.seed = seed;
  row.laplace = laplace_approximation(target, Hyperparameters{}, Vec::Zero(2),
                                      lopt);

  const Grid2D grid = Grid2D::square(setup.half_width, setup.resolution);
  auto log_target = [&](double w1, double w2) {
    return target.log_density(w1, w2);
  };
  const GaussianLogDensity proposed(row.proposed.mean, row.proposed.covariance);
  const GaussianLogDensity laplace(row.laplace.mean, row.laplace.covariance);
  row.proposed_target_to_approx =
      kld_numerical_2d(log_target, proposed, grid, KldDirection::kPToQ);
  row.proposed_approx_to_target =
      kld_numerical_2d(log_target, proposed, grid, KldDirection::kQToP);
  row.laplace_target_to_approx =
      kld_numerical_2d(log_target, laplace, grid, KldDirection::kPToQ);
  row.laplace_approx_to_target =
      kld_numerical_2d(log_target, laplace, grid, KldDirection::kQToP);
  return row;
}

// The three benchmark targets.
inline std::vector<BivariateRow> run_bivariate(const BivariateSetup& setup,
                                               const FitConfig& config,
                                               std::uint64_t seed) {
  std::vector<BivariateRow> rows;
  for (const auto& a : kBivariateBenchmarks)
    rows.push_back(run_bivariate_one(a, setup, config, seed));
  return rows;
}

}  // namespace fsvi::experiments

#endif  // FSVI_EXPERIMENTS_BIVARIATE_HPP
