#ifndef FSVI_SCG_HPP
#define FSVI_SCG_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "fsvi/error.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

// Scaled conjugate gradients (Moller 1993). Maximises an objective
// given as   double objective(const Vec& x, Vec& grad)   returning the
// value and writing the gradient. Internally it minimises the negation.

struct ScgOptions {
  int max_iters = 100;
  double grad_tol = 1e-6;
  double sigma0 = 1e-4;
  double lambda0 = 1e-6;
  double lambda_min = 1e-15;
  double lambda_max = 1e15;
  // Successful steps between steepest-descent restarts; 0 means the
  // problem dimension.
  int restart_every = 0;
  // Consecutive non-finite evaluations tolerated before giving up.
  int max_nonfinite = 60;
};

enum class ScgStop { kGradient, kMaxIters, kStepUnderflow };

struct ScgState {
  Vec point;
  Vec direction;
  double lambda = 1e-6;
  bool success = true;
  int iteration = 0;
};

struct ScgResult {
  Vec x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  ScgStop stop = ScgStop::kMaxIters;
};

template <class Objective>
ScgResult scg_maximise(Objective&& objective, Vec start,
                       const ScgOptions& opt = {}) {
  const Index n = start.size();
  const double eps = std::numeric_limits<double>::epsilon();
  // f and g refer to the minimised function -objective.
  auto eval = [&](const Vec& x, Vec& g) {
    const double v = objective(x, g);
    g = -g;
    return -v;
  };

  ScgState st;
  st.point = std::move(start);
  st.lambda = opt.lambda0;
  Vec g(n), g_old(n), g_plus(n), g_new(n);
  double f_now = eval(st.point, g);
  if (!std::isfinite(f_now) || !g.allFinite())
    detail::fail(ErrorKind::kInvalidStart,
                 "objective or gradient not finite at the start point");

  ScgResult res;
  auto finish = [&](ScgStop stop) {
    res.x = st.point;
    res.value = -f_now;
    res.iterations = st.iteration;
    res.stop = stop;
    res.converged = stop == ScgStop::kGradient;
    return res;
  };
  if (g.norm() < opt.grad_tol) return finish(ScgStop::kGradient);

  const int restart = opt.restart_every > 0 ? opt.restart_every
                                            : static_cast<int>(std::max<Index>(n, 1));
  st.direction = -g;
  int n_success = 0;
  int n_nonfinite = 0;
  double mu = 0.0, kappa = 0.0, theta = 0.0;

  while (st.iteration < opt.max_iters) {
    if (st.success) {
      mu = st.direction.dot(g);
      if (mu >= 0.0) {
        st.direction = -g;
        mu = st.direction.dot(g);
      }
      kappa = st.direction.squaredNorm();
      if (kappa < eps * eps) return finish(ScgStop::kStepUnderflow);
      // Curvature along the direction from a small probe step.
      double sigma = opt.sigma0 / std::sqrt(kappa);
      bool probed = false;
      for (int shrink = 0; shrink < opt.max_nonfinite; ++shrink) {
        const double f_plus = eval(st.point + sigma * st.direction, g_plus);
        if (std::isfinite(f_plus) && g_plus.allFinite()) {
          probed = true;
          break;
        }
        sigma *= 0.5;
      }
      if (!probed)
        detail::fail(ErrorKind::kNumericalFailure,
                     "objective not finite near the current point");
      theta = st.direction.dot(g_plus - g) / sigma;
    }

    double delta = theta + st.lambda * kappa;
    if (delta <= 0.0) {
      delta = st.lambda * kappa;
      st.lambda = std::clamp(st.lambda - theta / kappa, opt.lambda_min,
                             opt.lambda_max);
    }
    const double step = -mu / delta;
    Vec x_new = st.point + step * st.direction;
    const double f_new = eval(x_new, g_new);

    double ratio = -std::numeric_limits<double>::infinity();
    bool plateau = false;
    if (std::isfinite(f_new) && g_new.allFinite()) {
      n_nonfinite = 0;
      ratio = 2.0 * (f_new - f_now) / (step * mu);
      // Close to an optimum the change in value drops below rounding and
      // the ratio is noise. The trapezoid rule on the directional
      // derivatives estimates the same change without cancellation.
      const double noise = 64.0 * eps * (std::abs(f_now) + std::abs(f_new));
      if (std::abs(f_new - f_now) <= noise) {
        const double slope_sum = mu + st.direction.dot(g_new);
        ratio = slope_sum / mu;
        plateau = slope_sum < 0.0;
      }
    } else if (++n_nonfinite > opt.max_nonfinite) {
      detail::fail(ErrorKind::kNumericalFailure,
                   "objective repeatedly non-finite along search direction");
    }

    ++st.iteration;
    double f_old = f_now;
    if (plateau || (ratio >= 0.0 && f_new <= f_now)) {
      st.success = true;
      ++n_success;
      st.point = std::move(x_new);
      f_now = f_new;
      g_old = g;
      g = g_new;
      if (g.norm() < opt.grad_tol) return finish(ScgStop::kGradient);
      const double moved = std::abs(step) * std::sqrt(kappa);
      if (!plateau && moved <= eps * (1.0 + st.point.norm()) &&
          std::abs(f_now - f_old) <= eps * (1.0 + std::abs(f_now)))
        return finish(ScgStop::kStepUnderflow);
    } else {
      st.success = false;
    }

    if (ratio < 0.25)
      st.lambda = std::min(4.0 * st.lambda, opt.lambda_max);
    if (ratio > 0.75)
      st.lambda = std::max(0.5 * st.lambda, opt.lambda_min);
    if (!st.success && st.lambda >= opt.lambda_max)
      return finish(ScgStop::kStepUnderflow);

    if (n_success == restart) {
      st.direction = -g;
      n_success = 0;
    } else if (st.success) {
      const double gamma = (g_old - g).dot(g) / mu;
      st.direction = gamma * st.direction - g;
    }
  }
  return finish(ScgStop::kMaxIters);
}

}  // namespace fsvi

#endif  // FSVI_SCG_HPP
