#ifndef FSVI_BOUND_HPP
#define FSVI_BOUND_HPP

#include <cmath>
#include <limits>
#include <numbers>

#include "fsvi/error.hpp"
#include "fsvi/linalg.hpp"
#include "fsvi/model.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

// KL(q || N(0, alpha^-1 I)), with ln|alpha L L^T| = M ln alpha + 2 ln|det L|.
inline double kl_gaussian_prior(const VariationalPosterior& post,
                                 double alpha) {
  detail::require(alpha > 0.0, ErrorKind::kConfig, "alpha must be positive");
  const double m = static_cast<double>(post.dim());
  const LogDet ld = log_abs_det(post);
  return 0.5 * (alpha * (trace_covariance(post) + post.mean().squaredNorm()) -
                m - m * std::log(alpha) - 2.0 * ld.log_abs);
}

// H[q] = (M/2) ln(2 pi e) + ln|det L|.
inline double entropy(const VariationalPosterior& post) {
  const double m = static_cast<double>(post.dim());
  return 0.5 * m * std::log(2.0 * std::numbers::pi * std::numbers::e) +
         log_abs_det(post).log_abs;
}

namespace detail {

inline void check_dims(const TargetModel& model,
                       const VariationalPosterior& post,
                       const SampleSet& samples) {
  require(model.dim() == post.dim(), ErrorKind::kDimension,
          "model dimension differs from posterior dimension");
  require(samples.dim() == post.dim(), ErrorKind::kDimension,
          "sample dimension differs from posterior dimension");
}

inline double noise_beta(const TargetModel& model, const Hyperparameters& h) {
  if (!model.has_noise_precision()) return 1.0;
  require(h.beta.has_value(), ErrorKind::kConfig,
          "Gaussian-noise model requires beta");
  return *h.beta;
}

}  // namespace detail

// (1/S) sum_s log p(Y | mu + L z_s).
inline double expected_log_lik(const TargetModel& model,
                               const VariationalPosterior& post,
                               const Hyperparameters& hyper,
                               const SampleSet& samples) {
  detail::check_dims(model, post, samples);
  const double beta = detail::noise_beta(model, hyper);
  return model.log_lik_batch(post.transform_batch(samples.draws()), beta,
                             nullptr)
      .mean();
}

// The regulariser subtracted from the sampled term: KL to the Gaussian
// prior, or -H[q] for a flat prior.
inline double prior_penalty(const TargetModel& model,
                            const VariationalPosterior& post,
                            const Hyperparameters& hyper) {
  return model.prior() == PriorKind::kGaussian
             ? kl_gaussian_prior(post, hyper.alpha)
             : -entropy(post);
}

inline double lower_bound_fs(const TargetModel& model,
                             const VariationalPosterior& post,
                             const Hyperparameters& hyper,
                             const SampleSet& samples) {
  detail::check_dims(model, post, samples);
  const double penalty = prior_penalty(model, post, hyper);
  return expected_log_lik(model, post, hyper, samples) - penalty;
}

struct BoundGradient {
  double value = 0.0;
  Vec mu;
  Mat factor;  // zero outside the diagonal blocks
};

// Bound value together with d/dmu and d/dL in one pass over the samples.
inline BoundGradient bound_and_gradient(const TargetModel& model,
                                        const VariationalPosterior& post,
                                        const Hyperparameters& hyper,
                                        const SampleSet& samples,
                                        bool want_factor = true) {
  detail::check_dims(model, post, samples);
  const double beta = detail::noise_beta(model, hyper);
  const Index m = post.dim();
  const BlockLayout& layout = post.layout();
  const double inv_s = 1.0 / static_cast<double>(samples.size());

  const Mat& zs = samples.draws();
  Mat grads;
  const Vec values =
      model.log_lik_batch(post.transform_batch(zs), beta, &grads);

  BoundGradient out;
  out.mu = grads.rowwise().sum() * inv_s;
  if (want_factor) {
    out.factor = Mat::Zero(m, m);
    for (size_t b = 0; b < layout.count(); ++b) {
      const Index o = layout.offset(b), sz = layout.size(b);
      out.factor.block(o, o, sz, sz).noalias() =
          inv_s * grads.middleRows(o, sz) * zs.middleRows(o, sz).transpose();
    }
  }
  const double acc = values.sum();

  const double penalty = prior_penalty(model, post, hyper);
  out.value = acc * inv_s - penalty;
  if (model.prior() == PriorKind::kGaussian) {
    out.mu -= hyper.alpha * post.mean();
    if (want_factor) out.factor -= hyper.alpha * post.factor();
  }
  if (want_factor) out.factor += pseudo_inverse_transpose(post);
  return out;
}

inline Vec grad_mu(const TargetModel& model, const VariationalPosterior& post,
                   const Hyperparameters& hyper, const SampleSet& samples) {
  return bound_and_gradient(model, post, hyper, samples, false).mu;
}

inline Mat grad_L(const TargetModel& model, const VariationalPosterior& post,
                  const Hyperparameters& hyper, const SampleSet& samples) {
  return bound_and_gradient(model, post, hyper, samples, true).factor;
}

// d/dtheta of the bound for the model's trainable hyperparameters. The
// prior penalty does not depend on them.
inline double bound_model_hyper_gradient(const TargetModel& model,
                                         const VariationalPosterior& post,
                                         const Hyperparameters& hyper,
                                         const SampleSet& samples,
                                         Vec& grad) {
  detail::check_dims(model, post, samples);
  const double inv_s = 1.0 / static_cast<double>(samples.size());
  grad = Vec::Zero(model.num_model_hyper());
  Vec g;
  double acc = 0.0;
  const Mat ws = post.transform_batch(samples.draws());
  for (Index s = 0; s < samples.size(); ++s) {
    const double v = model.log_lik_hyper_grad(ws.col(s), g);
    if (!std::isfinite(v)) return -std::numeric_limits<double>::infinity();
    acc += v;
    grad += g;
  }
  grad *= inv_s;
  return acc * inv_s - prior_penalty(model, post, hyper);
}

// alpha = M / (mu^T mu + tr(L L^T)). For a block-diagonal (factorised)
// posterior over K stacked classes M is the total dimension K*M_k, which
// is the stationary point of the shared-alpha bound.
inline double update_alpha(const VariationalPosterior& post) {
  const double denom = post.mean().squaredNorm() + trace_covariance(post);
  detail::require(denom > 0.0 && std::isfinite(denom), ErrorKind::kDegenerate,
                  "alpha update: mu^T mu + tr(L L^T) is zero");
  return static_cast<double>(post.dim()) / denom;
}

// beta = S N / sum_s ||Y - f(X; mu + L z_s)||^2.
inline double update_beta(const TargetModel& model,
                          const VariationalPosterior& post,
                          const SampleSet& samples) {
  detail::check_dims(model, post, samples);
  const double sq =
      model.squared_residual_batch(post.transform_batch(samples.draws())).sum();
  detail::require(sq > 0.0, ErrorKind::kDegenerate,
                  "beta update: all residuals are zero");
  return static_cast<double>(samples.size()) *
         static_cast<double>(model.num_observations()) / sq;
}

}  // namespace fsvi

#endif  // FSVI_BOUND_HPP
