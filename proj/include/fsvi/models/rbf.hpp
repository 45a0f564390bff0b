#ifndef FSVI_MODELS_RBF_HPP
#define FSVI_MODELS_RBF_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "fsvi/error.hpp"
#include "fsvi/model.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

// Gaussian radial basis features phi_n = [exp(-|x_n - c_m|^2 / 2r^2)..., 1].
// Centres are rows of centres(); the trailing 1 is the bias.
class RbfDesign {
 public:
  RbfDesign(Mat centres, double width)
      : centres_(std::move(centres)), width_(width) {
    detail::require(width_ > 0.0, ErrorKind::kConfig,
                    "RBF width must be positive");
  }

  // Centres taken from the first `count` rows of the inputs (all when
  // count is 0 or exceeds the number of rows).
  static RbfDesign from_inputs(const Mat& inputs, double width,
                               Index count = 0) {
    const Index n = (count <= 0 || count > inputs.rows()) ? inputs.rows()
                                                          : count;
    return RbfDesign(inputs.topRows(n), width);
  }

  Index num_features() const { return centres_.rows() + 1; }
  Index input_dim() const { return centres_.cols(); }
  double width() const { return width_; }
  const Mat& centres() const { return centres_; }

  Mat features(const Mat& inputs) const {
    detail::require(inputs.cols() == input_dim(), ErrorKind::kDimension,
                    "input width differs from RBF centre width");
    const Index n = inputs.rows(), m = centres_.rows();
    const double scale = -0.5 / (width_ * width_);
    Mat phi(n, m + 1);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < m; ++j)
        phi(i, j) = std::exp(scale *
                             (inputs.row(i) - centres_.row(j)).squaredNorm());
      phi(i, m) = 1.0;
    }
    return phi;
  }

 private:
  Mat centres_;
  double width_;
};

// (N/2) ln beta - (N/2) ln 2 pi - (beta/2)|Y - Phi w|^2, optional gradient
// beta Phi^T (Y - Phi w).
inline double rbf_regression_loglik(const Vec& w, const Mat& design,
                                    const Vec& targets, double beta,
                                    Vec* grad = nullptr) {
  detail::require(design.cols() == w.size(), ErrorKind::kDimension,
                  "design width differs from parameter length");
  detail::require(design.rows() == targets.size(), ErrorKind::kDimension,
                  "design rows differ from number of targets");
  detail::require(beta > 0.0, ErrorKind::kConfig, "beta must be positive");
  const Vec r = targets - design * w;
  if (grad) *grad = beta * design.transpose() * r;
  const double n = static_cast<double>(targets.size());
  return 0.5 * n * (std::log(beta) - std::log(2.0 * std::numbers::pi)) -
         0.5 * beta * r.squaredNorm();
}

// Linear-in-parameters regression y = phi^T w with Gaussian noise.
class LinearGaussianModel : public GaussianNoiseModel {
 public:
  LinearGaussianModel(Mat design, Vec targets,
                      PriorKind prior = PriorKind::kGaussian)
      : GaussianNoiseModel(prior), design_(std::move(design)),
        targets_(std::move(targets)) {
    detail::require(design_.rows() == targets_.size(), ErrorKind::kDimension,
                    "design rows differ from number of targets");
  }

  Index dim() const override { return design_.cols(); }
  Vec predict(const Vec& w) const override { return design_ * w; }
  Vec jacobian_transpose_times(const Vec&, const Vec& r) const override {
    return design_.transpose() * r;
  }
  Mat predict_batch(const Mat& ws) const override { return design_ * ws; }
  Mat jacobian_transpose_times_batch(const Mat&, const Mat& r) const override {
    return design_.transpose() * r;
  }
  const Vec& targets() const override { return targets_; }
  const Mat& design() const { return design_; }

 private:
  Mat design_;
  Vec targets_;
};

struct RegressionData {
  Vec inputs;
  Vec targets;
};

inline double regression_truth(double x) {
  return 2.0 * std::cos(x) * std::sin(x) - 0.1 * x * x;
}

// Inputs uniform on [-6, 6]; targets = truth + N(0, 0.2^2).
inline RegressionData synth_regression_data(Index n, std::uint64_t seed,
                                            double noise_sd = 0.2) {
  detail::require(n >= 1, ErrorKind::kConfig, "need at least one datum");
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform(-6.0, 6.0);
  std::normal_distribution<double> noise(0.0, noise_sd);
  RegressionData d{Vec(n), Vec(n)};
  for (Index i = 0; i < n; ++i) {
    d.inputs[i] = uniform(rng);
    d.targets[i] = regression_truth(d.inputs[i]) + noise(rng);
  }
  return d;
}

}  // namespace fsvi

#endif  // FSVI_MODELS_RBF_HPP
