#ifndef FSVI_BASELINES_LAPLACE_HPP
#define FSVI_BASELINES_LAPLACE_HPP

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "fsvi/baselines/exact_blr.hpp"
#include "fsvi/error.hpp"
#include "fsvi/model.hpp"
#include "fsvi/scg.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

class IndefiniteHessian : public Error {
 public:
  explicit IndefiniteHessian(Vec eigenvalues)
      : Error(ErrorKind::kIndefiniteHessian, describe(eigenvalues)),
        eigenvalues_(std::move(eigenvalues)) {}

  // Eigenvalues of the negated Hessian at the mode.
  const Vec& eigenvalues() const { return eigenvalues_; }

 private:
  static std::string describe(const Vec& ev) {
    std::ostringstream os;
    os << "negative Hessian at the mode is not positive definite; "
          "eigenvalues:";
    for (Index i = 0; i < ev.size(); ++i) os << ' ' << ev[i];
    return os.str();
  }

  Vec eigenvalues_;
};

struct LaplaceOptions {
  int restarts = 10;  // including the supplied start
  std::uint64_t seed = 0;
  double restart_spread = 1.0;
  int max_iters = 2000;
  double grad_tol = 1e-10;
  // Smallest admissible curvature, relative to max(1, largest curvature).
  double min_curvature = 1e-6;
};

// Log-joint ln p(Y|w) + ln p(w), dropping w-independent constants.
inline double log_joint_grad(const TargetModel& model,
                             const Hyperparameters& hyper, const Vec& w,
                             Vec& grad) {
  const double beta = hyper.beta.value_or(1.0);
  double v = model.log_lik_grad(w, beta, grad);
  if (model.prior() == PriorKind::kGaussian) {
    v -= 0.5 * hyper.alpha * w.squaredNorm();
    grad -= hyper.alpha * w;
  }
  return v;
}

// Central differences of the analytic gradient, step 1e-5 (1 + |w_i|),
// symmetrised.
inline Mat finite_difference_hessian(const TargetModel& model,
                                     const Hyperparameters& hyper,
                                     const Vec& w) {
  const Index m = w.size();
  Mat h(m, m);
  Vec gp(m), gm(m), x = w;
  for (Index j = 0; j < m; ++j) {
    const double step = 1e-5 * (1.0 + std::abs(w[j]));
    x[j] = w[j] + step;
    log_joint_grad(model, hyper, x, gp);
    x[j] = w[j] - step;
    log_joint_grad(model, hyper, x, gm);
    x[j] = w[j];
    h.col(j) = (gp - gm) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

struct LaplaceResult {
  GaussianPosteriorExact posterior;
  double log_joint_at_mode = 0.0;
};

// N(mode, (-H)^-1). The mode is the best of `restarts` SCG runs: the
// supplied start and seed-derived Gaussian perturbations of it.
inline LaplaceResult laplace_fit(const TargetModel& model,
                                 const Hyperparameters& hyper, const Vec& start,
                                 const LaplaceOptions& opt = {}) {
  detail::require(start.size() == model.dim(), ErrorKind::kDimension,
                  "start point has wrong length");
  auto objective = [&](const Vec& w, Vec& g) {
    return log_joint_grad(model, hyper, w, g);
  };
  ScgOptions scg;
  scg.max_iters = opt.max_iters;
  scg.grad_tol = opt.grad_tol;

  Rng rng(opt.seed);
  std::normal_distribution<double> normal(0.0, opt.restart_spread);
  std::optional<ScgResult> best;
  std::optional<Error> last_error;
  for (int r = 0; r < std::max(opt.restarts, 1); ++r) {
    Vec x0 = start;
    if (r > 0)
      for (Index i = 0; i < x0.size(); ++i) x0[i] += normal(rng);
    try {
      ScgResult res = scg_maximise(objective, std::move(x0), scg);
      if (!best || res.value > best->value) best = std::move(res);
    } catch (const Error& e) {
      last_error = e;
    }
  }
  if (!best) throw *last_error;

  const Mat neg_h = -finite_difference_hessian(model, hyper, best->x);
  Eigen::SelfAdjointEigenSolver<Mat> eig(neg_h);
  const Vec& ev = eig.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (!ev.allFinite() || ev.minCoeff() <= opt.min_curvature * scale)
    throw IndefiniteHessian(ev);

  LaplaceResult out;
  out.posterior.mean = best->x;
  out.posterior.covariance = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                             eig.eigenvectors().transpose();
  out.log_joint_at_mode = best->value;
  return out;
}

inline GaussianPosteriorExact laplace_approximation(
    const TargetModel& model, const Hyperparameters& hyper, const Vec& start,
    const LaplaceOptions& opt = {}) {
  return laplace_fit(model, hyper, start, opt).posterior;
}

}  // namespace fsvi

#endif  // FSVI_BASELINES_LAPLACE_HPP
