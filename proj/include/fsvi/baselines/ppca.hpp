#ifndef FSVI_BASELINES_PPCA_HPP
#define FSVI_BASELINES_PPCA_HPP

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fsvi/error.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

// Maximum-likelihood probabilistic PCA. Data are stored one column per
// datum (d x N).
struct PpcaFit {
  Mat loading;  // W, d x q
  Vec mean;     // xi
  double noise_var = 0.0;

  // Posterior-mean latent (W^T W + s2 I)^-1 W^T (y - xi).
  Mat latents(const Mat& data) const {
    Mat m = loading.transpose() * loading;
    m.diagonal().array() += noise_var;
    Mat centred = data.colwise() - mean;
    return m.ldlt().solve(loading.transpose() * centred);
  }

  Mat reconstruct(const Mat& data) const {
    Mat rec = loading * latents(data);
    rec.colwise() += mean;
    return rec;
  }

  // Marginal log-likelihood with C = W W^T + s2 I (dense in d).
  double log_likelihood(const Mat& data) const {
    const Index d = loading.rows();
    const double n = static_cast<double>(data.cols());
    Mat c = loading * loading.transpose();
    c.diagonal().array() += noise_var;
    const Eigen::LLT<Mat> llt(c);
    detail::require(llt.info() == Eigen::Success, ErrorKind::kDegenerate,
                    "PPCA covariance is not positive definite");
    const Mat centred = data.colwise() - mean;
    const double logdet =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double quad = (llt.matrixL().solve(centred)).squaredNorm();
    return -0.5 * n * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) +
                       logdet) -
           0.5 * quad;
  }
};

// Closed form: xi = sample mean, s2 = mean of the discarded eigenvalues of
// the sample covariance, W = U_q (Lambda_q - s2 I)^(1/2).
inline PpcaFit ml_ppca_fit(const Mat& data, Index q) {
  const Index d = data.rows(), n = data.cols();
  detail::require(q >= 1 && q < d, ErrorKind::kConfig, "need 1 <= q < d");
  detail::require(n > q, ErrorKind::kConfig, "need more data than q");
  PpcaFit fit;
  fit.mean = data.rowwise().mean();
  const Mat centred = data.colwise() - fit.mean;
  Eigen::BDCSVD<Mat> svd(centred, Eigen::ComputeThinU);
  const Vec eig = svd.singularValues().array().square() / static_cast<double>(n);
  const double tol = 1e-12 * std::max(1.0, eig.size() ? eig[0] : 0.0);
  Index positive = 0;
  for (Index i = 0; i < eig.size(); ++i) positive += eig[i] > tol;
  detail::require(positive >= q, ErrorKind::kDegenerate,
                  "sample covariance has fewer than q positive eigenvalues");

  const double total = centred.squaredNorm() / static_cast<double>(n);
  const double kept = eig.head(q).sum();
  fit.noise_var = std::max(0.0, (total - kept) / static_cast<double>(d - q));
  if (fit.noise_var < tol) fit.noise_var = 0.0;
  const Vec scale = (eig.head(q).array() - fit.noise_var).max(0.0).sqrt();
  fit.loading = svd.matrixU().leftCols(q) * scale.asDiagonal();
  return fit;
}

}  // namespace fsvi

#endif  // FSVI_BASELINES_PPCA_HPP
