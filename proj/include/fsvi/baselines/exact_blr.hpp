#ifndef FSVI_BASELINES_EXACT_BLR_HPP
#define FSVI_BASELINES_EXACT_BLR_HPP

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>

#include "fsvi/bound.hpp"
#include "fsvi/error.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

struct GaussianPosteriorExact {
  Vec mean;
  Mat covariance;
};

// Conjugate posterior of y = Phi w + N(0, 1/beta), w ~ N(0, I/alpha):
// covariance (alpha I + beta Phi^T Phi)^-1, mean beta cov Phi^T Y. Both
// come from one Cholesky factorisation of the precision.
inline GaussianPosteriorExact exact_blr_posterior(const Mat& design,
                                                  const Vec& targets,
                                                  double alpha, double beta) {
  detail::require(alpha > 0.0 && beta >= 0.0, ErrorKind::kConfig,
                  "exact BLR needs alpha > 0 and beta >= 0");
  detail::require(design.rows() == targets.size(), ErrorKind::kDimension,
                  "design rows differ from number of targets");
  const Index m = design.cols();
  Mat precision = beta * design.transpose() * design;
  precision.diagonal().array() += alpha;
  const Eigen::LLT<Mat> llt(precision);
  GaussianPosteriorExact out;
  out.covariance = llt.solve(Mat::Identity(m, m));
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  out.mean = llt.solve(beta * (design.transpose() * targets));
  return out;
}

// The untruncated variational bound for the linear-Gaussian model, in
// closed form: E_q ln p(Y|w) uses E|Y - Phi w|^2 = |Y - Phi mu|^2 +
// tr(Phi L L^T Phi^T).
inline double blr_exact_bound(const Mat& design, const Vec& targets,
                              const VariationalPosterior& post,
                              const Hyperparameters& hyper) {
  detail::require(hyper.beta.has_value(), ErrorKind::kConfig,
                  "linear-Gaussian bound needs beta");
  const double beta = *hyper.beta;
  const double n = static_cast<double>(targets.size());
  const double sq = (targets - design * post.mean()).squaredNorm() +
                    (design * post.factor()).squaredNorm();
  const double expected = 0.5 * n * (std::log(beta) -
                                     std::log(2.0 * std::numbers::pi)) -
                          0.5 * beta * sq;
  return expected - kl_gaussian_prior(post, hyper.alpha);
}

}  // namespace fsvi

#endif  // FSVI_BASELINES_EXACT_BLR_HPP
