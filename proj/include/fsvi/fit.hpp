#ifndef FSVI_FIT_HPP
#define FSVI_FIT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fsvi/bound.hpp"
#include "fsvi/error.hpp"
#include "fsvi/linalg.hpp"
#include "fsvi/model.hpp"
#include "fsvi/scg.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

struct FitConfig {
  Index samples = 100;                   // S
  std::optional<Index> holdout_samples;  // S'; defaults to 5 S, 0 disables
  int inner_iters = 10;                  // J
  int max_iter = 1000;
  double tolerance = 1e-4;
  double grad_tol = 1e-6;  // inner SCG gradient tolerance

  double init_alpha = 0.1;
  double init_beta = 0.1;
  double init_scale = 0.1;  // L = c I
  std::optional<Vec> init_mean;
  std::optional<Mat> init_factor;
  std::optional<BlockLayout> layout;
  // Maximise the likelihood first and start mu there.
  bool ml_warm_start = false;

  bool update_alpha = true;
  bool update_beta = true;
  // Keep the model's own trainable hyperparameters fixed when false.
  bool update_model_hyper = true;

  Index holdout_count() const { return holdout_samples.value_or(5 * samples); }

  void validate() const {
    using detail::require;
    require(samples >= 1, ErrorKind::kConfig, "S must be at least 1");
    require(holdout_count() >= 0, ErrorKind::kConfig, "S' must be >= 0");
    require(holdout_count() == 0 || holdout_count() > samples,
            ErrorKind::kConfig, "S' must exceed S when monitoring is enabled");
    require(inner_iters >= 1, ErrorKind::kConfig, "J must be at least 1");
    require(max_iter >= 1, ErrorKind::kConfig, "MaxIter must be at least 1");
    require(tolerance > 0.0, ErrorKind::kConfig, "tolerance must be positive");
    require(init_scale != 0.0 && std::isfinite(init_scale), ErrorKind::kConfig,
            "initial factor scale must be nonzero");
    require(init_alpha > 0.0 && init_beta > 0.0, ErrorKind::kConfig,
            "initial alpha and beta must be positive");
  }
};

namespace detail {

// Independent streams for initialisation, Z and Z'.
struct FitSeeds {
  std::uint64_t init, train, holdout;
  explicit FitSeeds(std::uint64_t seed) {
    Rng master(seed);
    init = master();
    train = master();
    holdout = master();
  }
};

inline double finite_or_fail(double v, int iteration, const char* what) {
  if (!std::isfinite(v)) throw NumericalFailure(iteration, what);
  return v;
}

inline Vec ml_estimate(const TargetModel& model, Vec start, double beta) {
  auto objective = [&](const Vec& w, Vec& g) {
    return model.log_lik_grad(w, beta, g);
  };
  ScgOptions opt;
  opt.max_iters = 200;
  opt.grad_tol = 1e-8;
  return scg_maximise(objective, std::move(start), opt).x;
}

}  // namespace detail

// Alternating optimisation of the finite-sample bound: J SCG steps on mu,
// J on L, closed-form alpha/beta, then J on any model hyperparameters,
// until successive bounds differ by less than the tolerance.
inline FitReport fit(TargetModel& model, const FitConfig& config,
                     std::uint64_t seed) {
  config.validate();
  const Index m = model.dim();
  const detail::FitSeeds seeds(seed);
  const BlockLayout layout = config.layout.value_or(BlockLayout(m));
  detail::require(layout.dim() == m, ErrorKind::kConfig,
                  "block layout does not match model dimension");

  Hyperparameters hyper;
  hyper.alpha = config.init_alpha;
  if (model.has_noise_precision()) hyper.beta = config.init_beta;
  const bool gaussian_prior = model.prior() == PriorKind::kGaussian;

  Vec mu;
  if (config.init_mean) {
    detail::require(config.init_mean->size() == m, ErrorKind::kConfig,
                    "initial mean has wrong length");
    mu = *config.init_mean;
  } else {
    Rng rng(seeds.init);
    std::normal_distribution<double> normal;
    mu.resize(m);
    for (Index i = 0; i < m; ++i) mu[i] = normal(rng);
  }
  if (config.ml_warm_start)
    mu = detail::ml_estimate(model, std::move(mu), hyper.beta.value_or(1.0));

  Mat factor = config.init_factor ? *config.init_factor
                                  : Mat(config.init_scale * Mat::Identity(m, m));
  VariationalPosterior post(std::move(mu), std::move(factor), layout);

  const SampleSet train = SampleSet::standard_normal(config.samples, m,
                                                     seeds.train);
  std::optional<SampleSet> holdout;
  if (config.holdout_count() > 0)
    holdout = SampleSet::standard_normal(config.holdout_count(), m,
                                         seeds.holdout);

  FitReport report;
  double bound = detail::finite_or_fail(
      lower_bound_fs(model, post, hyper, train), 0, "initial bound not finite");

  ScgOptions inner;
  inner.max_iters = config.inner_iters;
  inner.grad_tol = config.grad_tol;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double neg_inf = -std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    const double previous = bound;
    try {
      // mu phase
      {
        VariationalPosterior trial = post;
        auto objective = [&](const Vec& x, Vec& g) {
          trial.set_mean(x);
          BoundGradient bg = bound_and_gradient(model, trial, hyper, train,
                                                false);
          g = std::move(bg.mu);
          return bg.value;
        };
        post.set_mean(scg_maximise(objective, post.mean(), inner).x);
      }
      // L phase; steps that flip the sign of det L are rejected.
      {
        const int sign0 = log_abs_det(post).sign;
        VariationalPosterior trial = post;
        auto objective = [&](const Vec& x, Vec& g) {
          trial.unpack_factor(x);
          g = Vec::Zero(x.size());
          try {
            if (log_abs_det(trial).sign != sign0) return neg_inf;
          } catch (const Error&) {
            return neg_inf;
          }
          BoundGradient bg = bound_and_gradient(model, trial, hyper, train);
          g = trial.pack_matrix(bg.factor);
          return bg.value;
        };
        post.unpack_factor(scg_maximise(objective, post.pack_factor(), inner).x);
      }
    } catch (const NumericalFailure&) {
      throw;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kInvalidStart ||
          e.kind() == ErrorKind::kNumericalFailure)
        throw NumericalFailure(iter, e.what());
      throw;
    }

    if (config.update_alpha && gaussian_prior) hyper.alpha = update_alpha(post);
    if (config.update_beta && model.has_noise_precision())
      hyper.beta = update_beta(model, post, train);

    if (config.update_model_hyper && model.num_model_hyper() > 0) {
      auto objective = [&](const Vec& theta, Vec& g) {
        model.set_model_hyper(theta);
        return bound_model_hyper_gradient(model, post, hyper, train, g);
      };
      const Vec start = model.model_hyper();
      try {
        model.set_model_hyper(scg_maximise(objective, start, inner).x);
      } catch (const Error& e) {
        model.set_model_hyper(start);
        throw NumericalFailure(iter, e.what());
      }
    }

    bound = detail::finite_or_fail(lower_bound_fs(model, post, hyper, train),
                                   iter, "bound not finite");
    const double held =
        holdout ? lower_bound_fs(model, post, hyper, *holdout) : nan;
    report.trace.push_back({iter, bound, held});
    report.iterations = iter;
    if (bound < previous) report.monotone = false;
    if (std::abs(bound - previous) < config.tolerance) {
      report.converged = true;
      break;
    }
  }

  report.posterior = std::move(post);
  report.hyper = hyper;
  report.model_hyper = model.model_hyper();
  return report;
}

enum class Generalisation { kOk, kOverfitting };

// Overfitting to Z shows up as the holdout bound L_FS(Z') falling from its
// running maximum while the training bound keeps rising. The fall must
// exceed margin_fraction of the holdout bound's range over the trace.
inline Generalisation monitor_generalisation(
    const std::vector<TraceRow>& trace, double margin_fraction = 0.01) {
  detail::require(trace.size() >= 10, ErrorKind::kInsufficientData,
                  "generalisation monitor needs at least 10 iterations");
  for (const TraceRow& row : trace)
    detail::require(std::isfinite(row.holdout_bound),
                    ErrorKind::kInsufficientData,
                    "trace has no holdout bounds");

  double lo = trace.front().holdout_bound, hi = lo;
  size_t argmax = 0;
  for (size_t t = 0; t < trace.size(); ++t) {
    const double h = trace[t].holdout_bound;
    lo = std::min(lo, h);
    if (h > hi) {
      hi = h;
      argmax = t;
    }
  }
  const TraceRow& last = trace.back();
  const double margin = margin_fraction * (hi - lo);
  const bool held_fell = last.holdout_bound < hi - margin;
  const bool train_rose = last.train_bound > trace[argmax].train_bound;
  return held_fell && train_rose ? Generalisation::kOverfitting
                                 : Generalisation::kOk;
}

}  // namespace fsvi

#endif  // FSVI_FIT_HPP
