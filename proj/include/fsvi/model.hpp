#ifndef FSVI_MODEL_HPP
#define FSVI_MODEL_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

#include "fsvi/error.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

enum class PriorKind { kGaussian, kFlat };

// A differentiable log-likelihood (or unnormalised log-target) over a
// parameter vector w of length dim(). Evaluation must be free of side
// effects; only set_model_hyper() mutates, and the fit loop calls it
// sequentially.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual Index dim() const = 0;
  virtual PriorKind prior() const { return PriorKind::kGaussian; }

  // log p(Y | w, beta). beta is ignored unless has_noise_precision().
  virtual double log_lik(const Vec& w, double beta) const = 0;
  // Same value; also writes d/dw into grad.
  virtual double log_lik_grad(const Vec& w, double beta, Vec& grad) const = 0;

  // Evaluates every column of ws (dim x S) and returns the S values. When
  // grads is given it receives the gradients column by column. Models
  // override this when a batch is cheaper than a loop.
  virtual Vec log_lik_batch(const Mat& ws, double beta, Mat* grads) const {
    Vec values(ws.cols());
    if (grads) grads->resize(ws.rows(), ws.cols());
    Vec w, g;
    for (Index s = 0; s < ws.cols(); ++s) {
      w = ws.col(s);
      if (grads) {
        values[s] = log_lik_grad(w, beta, g);
        grads->col(s) = g;
      } else {
        values[s] = log_lik(w, beta);
      }
    }
    return values;
  }

  virtual bool has_noise_precision() const { return false; }
  // ||Y - f(X; w)||^2 and N, for Gaussian-noise likelihoods.
  virtual double squared_residual(const Vec&) const {
    detail::fail(ErrorKind::kConfig, "model has no Gaussian noise term");
  }
  virtual Vec squared_residual_batch(const Mat& ws) const {
    Vec out(ws.cols());
    for (Index s = 0; s < ws.cols(); ++s) out[s] = squared_residual(ws.col(s));
    return out;
  }
  virtual Index num_observations() const {
    detail::fail(ErrorKind::kConfig, "model has no Gaussian noise term");
  }

  // Trainable model hyperparameters optimised on the bound alongside the
  // variational parameters.
  virtual Index num_model_hyper() const { return 0; }
  virtual Vec model_hyper() const { return Vec(); }
  virtual void set_model_hyper(const Vec&) {
    detail::fail(ErrorKind::kConfig, "model has no trainable hyperparameters");
  }
  // log-likelihood at w with gradient with respect to model_hyper().
  virtual double log_lik_hyper_grad(const Vec&, Vec&) const {
    detail::fail(ErrorKind::kConfig, "model has no trainable hyperparameters");
  }
};

// Likelihood prod_n N(y_n | f(x_n; w), 1/beta). Subclasses supply the
// regression function and its Jacobian-transpose product.
class GaussianNoiseModel : public TargetModel {
 public:
  explicit GaussianNoiseModel(PriorKind prior = PriorKind::kGaussian)
      : prior_(prior) {}

  virtual Vec predict(const Vec& w) const = 0;
  virtual Vec jacobian_transpose_times(const Vec& w, const Vec& r) const = 0;
  virtual const Vec& targets() const = 0;

  // Batched forms over the columns of ws; the defaults loop.
  virtual Mat predict_batch(const Mat& ws) const {
    Mat out(num_observations(), ws.cols());
    for (Index s = 0; s < ws.cols(); ++s) out.col(s) = predict(ws.col(s));
    return out;
  }
  virtual Mat jacobian_transpose_times_batch(const Mat& ws,
                                             const Mat& r) const {
    Mat out(ws.rows(), ws.cols());
    for (Index s = 0; s < ws.cols(); ++s)
      out.col(s) = jacobian_transpose_times(ws.col(s), r.col(s));
    return out;
  }

  PriorKind prior() const override { return prior_; }
  bool has_noise_precision() const override { return true; }
  Index num_observations() const override { return targets().size(); }

  double squared_residual(const Vec& w) const override {
    return (targets() - predict(w)).squaredNorm();
  }

  double log_lik(const Vec& w, double beta) const override {
    return value_from_sq(squared_residual(w), beta);
  }

  double log_lik_grad(const Vec& w, double beta, Vec& grad) const override {
    const Vec r = targets() - predict(w);
    grad = beta * jacobian_transpose_times(w, r);
    return value_from_sq(r.squaredNorm(), beta);
  }

  Vec squared_residual_batch(const Mat& ws) const override {
    return residuals(ws).colwise().squaredNorm().transpose();
  }

  Vec log_lik_batch(const Mat& ws, double beta, Mat* grads) const override {
    const Mat r = residuals(ws);
    if (grads) *grads = beta * jacobian_transpose_times_batch(ws, r);
    Vec values(ws.cols());
    for (Index s = 0; s < ws.cols(); ++s)
      values[s] = value_from_sq(r.col(s).squaredNorm(), beta);
    return values;
  }

 private:
  double value_from_sq(double sq, double beta) const {
    const double n = static_cast<double>(num_observations());
    return 0.5 * n * (std::log(beta) - std::log(2.0 * std::numbers::pi)) -
           0.5 * beta * sq;
  }

  Mat residuals(const Mat& ws) const {
    Mat r = -predict_batch(ws);
    r.colwise() += targets();
    return r;
  }

  PriorKind prior_;
};

// A model assembled from callables; the hook for externally supplied
// targets such as densities fitted directly or third-party simulators.
class FunctionModel : public TargetModel {
 public:
  using ValueGrad = std::function<double(const Vec&, Vec&)>;

  FunctionModel(Index dim, ValueGrad fn, PriorKind prior = PriorKind::kGaussian)
      : dim_(dim), fn_(std::move(fn)), prior_(prior) {}

  Index dim() const override { return dim_; }
  PriorKind prior() const override { return prior_; }

  double log_lik(const Vec& w, double) const override {
    Vec g(dim_);
    return fn_(w, g);
  }
  double log_lik_grad(const Vec& w, double, Vec& grad) const override {
    grad.resize(dim_);
    return fn_(w, grad);
  }

 private:
  Index dim_;
  ValueGrad fn_;
  PriorKind prior_;
};

}  // namespace fsvi

#endif  // FSVI_MODEL_HPP
