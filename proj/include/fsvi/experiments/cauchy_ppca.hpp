#ifndef FSVI_EXPERIMENTS_CAUCHY_PPCA_HPP
#define FSVI_EXPERIMENTS_CAUCHY_PPCA_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "fsvi/baselines/ppca.hpp"
#include "fsvi/eval/metrics.hpp"
#include "fsvi/experiments/common.hpp"
#include "fsvi/fit.hpp"
#include "fsvi/models/cauchy_ppca.hpp"

namespace fsvi::experiments {

struct ImageSetup {
  Index rows = 24;
  Index cols = 21;
  Index count = 200;            // split into equal train and test halves
  Index rank = 2;               // q
  double corruption = 1.0 / 3.0;
  double pixel_noise_sd = 2.0;  // small Gaussian noise on clean images
};

struct ImageData {
  Mat clean;      // d x N, pixel values in [0, 255]
  Mat corrupted;  // same shape
};

// Rank-q smooth images: a mean image plus q sinusoidal patterns weighted by
// standard-normal latents. A `corruption` fraction of the pixels of each
// image is then replaced by a uniform draw from [0, 255].
inline ImageData synth_low_rank_images(const ImageSetup& setup,
                                       std::uint64_t seed) {
  const Index d = setup.rows * setup.cols;
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;

  Mat basis(d, setup.rank);
  Vec offset(d);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<double> phases(static_cast<size_t>(2 * setup.rank));
  for (double& p : phases) p = phase(rng);
  for (Index r = 0; r < setup.rows; ++r)
    for (Index c = 0; c < setup.cols; ++c) {
      const Index i = r * setup.cols + c;
      const double u = static_cast<double>(r) / static_cast<double>(setup.rows);
      const double v = static_cast<double>(c) / static_cast<double>(setup.cols);
      offset[i] = 128.0 + 30.0 * (u - 0.5) - 20.0 * (v - 0.5);
      for (Index k = 0; k < setup.rank; ++k) {
        const double fk = static_cast<double>(k + 1);
        basis(i, k) = 35.0 *
                      std::sin(2.0 * std::numbers::pi * fk * u +
                               phases[static_cast<size_t>(2 * k)]) *
                      std::cos(std::numbers::pi * fk * v +
                               phases[static_cast<size_t>(2 * k + 1)]);
      }
    }

  ImageData out{Mat(d, setup.count), Mat(d, setup.count)};
  Vec x(setup.rank);
  for (Index n = 0; n < setup.count; ++n) {
    for (Index k = 0; k < setup.rank; ++k) x[k] = normal(rng);
    for (Index i = 0; i < d; ++i) {
      const double clean =
          offset[i] + basis.row(i).dot(x) + setup.pixel_noise_sd * normal(rng);
      out.clean(i, n) = std::clamp(clean, 0.0, 255.0);
    }
  }
  out.corrupted = out.clean;
  for (Index n = 0; n < setup.count; ++n)
    for (Index i = 0; i < d; ++i)
      if (unit(rng) < setup.corruption) out.corrupted(i, n) = 255.0 * unit(rng);
  return out;
}

inline FitConfig cauchy_ppca_fit_defaults() {
  FitConfig c;
  c.samples = 10;
  c.holdout_samples = 0;
  c.max_iter = 30;
  c.tolerance = 1e-2;
  // Latent prior N(0, I) is fixed.
  c.init_alpha = 1.0;
  c.update_alpha = false;
  return c;
}

inline double mean_reconstruction_error(const Mat& clean, const Mat& rec) {
  double total = 0.0;
  for (Index n = 0; n < clean.cols(); ++n)
    total += reconstruction_error(clean.col(n), rec.col(n));
  return total / static_cast<double>(clean.cols());
}

struct CauchyPpcaResult {
  double ppca_error = 0.0;    // mean over test images
  double cauchy_error = 0.0;
  CauchyPpcaParams params;    // fitted W, xi, gamma
  FitReport train_report;
  FitReport test_report;
  Mat test_reconstruction;
};

namespace pipeline {

inline Vec stacked_latents(const Mat& latents) {
  return Eigen::Map<const Vec>(latents.data(), latents.size());
}

}  // namespace pipeline

// Trains ML-PPCA and Cauchy-PPCA on the corrupted first half and scores
// reconstructions of the second half against its clean images. Cauchy-PPCA
// starts from the ML-PPCA solution; test latents are then fitted with W, xi
// and gamma frozen and the reconstruction is W mu + xi.
inline CauchyPpcaResult run_cauchy_ppca(const ImageData& images, Index rank,
                                        const FitConfig& config,
                                        std::uint64_t seed) {
  const Index half = images.clean.cols() / 2;
  detail::require(half > rank, ErrorKind::kConfig,
                  "too few images for the requested latent dimension");
  const Mat train = images.corrupted.leftCols(half);
  const Mat test = images.corrupted.rightCols(images.clean.cols() - half);
  const Mat test_clean = images.clean.rightCols(test.cols());

  CauchyPpcaResult out;
  const PpcaFit ppca = ml_ppca_fit(train, rank);
  out.ppca_error = mean_reconstruction_error(test_clean, ppca.reconstruct(test));

  CauchyPpcaParams init{ppca.loading, ppca.mean,
                        std::sqrt(std::max(ppca.noise_var, 1e-6))};
  CauchyPpcaModel train_model(train, init);
  FitConfig train_config = config;
  train_config.layout = train_model.layout();
  train_config.init_mean = pipeline::stacked_latents(ppca.latents(train));
  out.train_report = fit(train_model, train_config, seed);
  out.params = train_model.params();

  CauchyPpcaModel test_model(test, out.params);
  FitConfig test_config = config;
  test_config.layout = test_model.layout();
  test_config.update_model_hyper = false;
  // Start from the least-squares latents under the fitted loading.
  const Mat gram = out.params.loading.transpose() * out.params.loading;
  const Mat start = gram.ldlt().solve(
      out.params.loading.transpose() * (test.colwise() - out.params.offset));
  test_config.init_mean = pipeline::stacked_latents(start);
  out.test_report = fit(test_model, test_config, seed + 1);

  const Eigen::Map<const Mat> mu(out.test_report.posterior.mean().data(),
                                 rank, test.cols());
  out.test_reconstruction = out.params.loading * mu;
  out.test_reconstruction.colwise() += out.params.offset;
  out.cauchy_error =
      mean_reconstruction_error(test_clean, out.test_reconstruction);
  return out;
}

}  // namespace fsvi::experiments

#endif  // FSVI_EXPERIMENTS_CAUCHY_PPCA_HPP
