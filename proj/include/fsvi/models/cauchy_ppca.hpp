#ifndef FSVI_MODELS_CAUCHY_PPCA_HPP
#define FSVI_MODELS_CAUCHY_PPCA_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "fsvi/error.hpp"
#include "fsvi/model.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

// y = W x + xi + eps with independent Cauchy(0, gamma) noise per pixel.
struct CauchyPpcaParams {
  Mat loading;  // W, d x q
  Vec offset;   // xi, length d
  double gamma = 1.0;

  Index data_dim() const { return loading.rows(); }
  Index latent_dim() const { return loading.cols(); }

  void validate() const {
    detail::require(gamma > 0.0 && std::isfinite(gamma), ErrorKind::kConfig,
                    "Cauchy scale gamma must be positive");
    detail::require(latent_dim() < data_dim(), ErrorKind::kConfig,
                    "latent dimension must be below data dimension");
    detail::require(offset.size() == data_dim(), ErrorKind::kDimension,
                    "offset length differs from data dimension");
  }
};

struct CauchyPpcaGradient {
  Mat latents;  // q x N
  Mat loading;  // d x q
  Vec offset;   // d
  double log_gamma = 0.0;
};

// sum_n sum_j [-ln pi - ln gamma - ln(1 + (r_nj / gamma)^2)] with residuals
// r_n = y_n - W x_n - xi. Data and latents are stored one column per datum.
inline double cauchy_ppca_loglik(const Mat& latents,
                                 const CauchyPpcaParams& params,
                                 const Mat& data,
                                 CauchyPpcaGradient* grad = nullptr) {
  params.validate();
  detail::require(latents.rows() == params.latent_dim() &&
                      data.rows() == params.data_dim() &&
                      latents.cols() == data.cols(),
                  ErrorKind::kDimension, "Cauchy-PPCA dimensions inconsistent");
  Mat resid = data - params.loading * latents;
  resid.colwise() -= params.offset;
  const double g2 = params.gamma * params.gamma;
  const double count = static_cast<double>(resid.size());
  const double ll =
      -count * (std::log(std::numbers::pi) + std::log(params.gamma)) -
      (1.0 + resid.array().square() / g2).log().sum();
  if (grad) {
    // psi = d ll / d r = -2 r / (gamma^2 + r^2); residuals enter with -W, -xi.
    const Mat psi = (2.0 * resid.array() / (g2 + resid.array().square()))
                        .matrix();
    grad->latents = params.loading.transpose() * psi;
    grad->loading = psi * latents.transpose();
    grad->offset = psi.rowwise().sum();
    grad->log_gamma =
        -count + (2.0 * resid.array().square() / (g2 + resid.array().square()))
                     .sum();
  }
  return ll;
}

// Cauchy-PPCA as a target over the stacked latents (q per datum, N data).
// W, xi and log gamma are trainable model hyperparameters.
class CauchyPpcaModel : public TargetModel {
 public:
  CauchyPpcaModel(Mat data, CauchyPpcaParams params)
      : data_(std::move(data)), params_(std::move(params)) {
    params_.validate();
    detail::require(data_.rows() == params_.data_dim(), ErrorKind::kDimension,
                    "data rows differ from loading rows");
  }

  Index dim() const override { return latent_dim() * num_data(); }
  Index latent_dim() const { return params_.latent_dim(); }
  Index num_data() const { return data_.cols(); }
  const CauchyPpcaParams& params() const { return params_; }
  const Mat& data() const { return data_; }
  BlockLayout layout() const {
    return BlockLayout::uniform(num_data(), latent_dim());
  }

  double log_lik(const Vec& w, double) const override {
    return cauchy_ppca_loglik(latents(w), params_, data_);
  }

  double log_lik_grad(const Vec& w, double, Vec& grad) const override {
    CauchyPpcaGradient g;
    const double ll = cauchy_ppca_loglik(latents(w), params_, data_, &g);
    grad = Eigen::Map<const Vec>(g.latents.data(), g.latents.size());
    return ll;
  }

  Index num_model_hyper() const override {
    return params_.loading.size() + params_.offset.size() + 1;
  }

  // [vec(W); xi; ln gamma]
  Vec model_hyper() const override {
    Vec theta(num_model_hyper());
    const Index nw = params_.loading.size(), d = params_.data_dim();
    theta.head(nw) = Eigen::Map<const Vec>(params_.loading.data(), nw);
    theta.segment(nw, d) = params_.offset;
    theta[nw + d] = std::log(params_.gamma);
    return theta;
  }

  void set_model_hyper(const Vec& theta) override {
    detail::require(theta.size() == num_model_hyper(), ErrorKind::kDimension,
                    "hyperparameter vector has wrong length");
    const Index nw = params_.loading.size(), d = params_.data_dim();
    params_.loading =
        Eigen::Map<const Mat>(theta.data(), d, params_.latent_dim());
    params_.offset = theta.segment(nw, d);
    params_.gamma = std::exp(theta[nw + d]);
  }

  double log_lik_hyper_grad(const Vec& w, Vec& grad) const override {
    if (!(params_.gamma > 0.0 && std::isfinite(params_.gamma))) {
      grad = Vec::Zero(num_model_hyper());
      return -std::numeric_limits<double>::infinity();
    }
    CauchyPpcaGradient g;
    const double ll = cauchy_ppca_loglik(latents(w), params_, data_, &g);
    const Index nw = params_.loading.size(), d = params_.data_dim();
    grad.resize(num_model_hyper());
    grad.head(nw) = Eigen::Map<const Vec>(g.loading.data(), nw);
    grad.segment(nw, d) = g.offset;
    grad[nw + d] = g.log_gamma;
    return ll;
  }

 private:
  Eigen::Map<const Mat> latents(const Vec& w) const {
    detail::require(w.size() == dim(), ErrorKind::kDimension,
                    "latent vector has wrong length");
    return Eigen::Map<const Mat>(w.data(), latent_dim(), num_data());
  }

  Mat data_;
  CauchyPpcaParams params_;
};

}  // namespace fsvi

#endif  // FSVI_MODELS_CAUCHY_PPCA_HPP
