#ifndef FSVI_LINALG_HPP
#define FSVI_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

#include "fsvi/types.hpp"

namespace fsvi {

// ln|det L| and sign(det L) of a block-diagonal factor.
struct LogDet {
  double log_abs = 0.0;
  int sign = 1;
};

inline constexpr double kSingularDetThreshold = 1e-300;

// Pivoted LU per block. A block whose |det| falls below 1e-300 (or whose
// pivot is exactly zero) is singular.
inline LogDet log_abs_det(const VariationalPosterior& post) {
  LogDet out;
  const BlockLayout& layout = post.layout();
  for (size_t b = 0; b < layout.count(); ++b) {
    const Index o = layout.offset(b), s = layout.size(b);
    Eigen::PartialPivLU<Mat> lu(post.factor().block(o, o, s, s));
    const Mat& packed = lu.matrixLU();
    double log_abs = 0.0;
    int sign = lu.permutationP().determinant();
    for (Index i = 0; i < s; ++i) {
      const double d = packed(i, i);
      if (d == 0.0 || !std::isfinite(d))
        detail::fail(ErrorKind::kInvalidPosterior, "posterior factor L is singular");
      if (d < 0) sign = -sign;
      log_abs += std::log(std::abs(d));
    }
    if (log_abs < std::log(kSingularDetThreshold))
      detail::fail(ErrorKind::kInvalidPosterior, "posterior factor L is singular");
    out.log_abs += log_abs;
    out.sign *= sign;
  }
  return out;
}

// Moore-Penrose pseudo-inverse by SVD, singular values below
// size * eps * sigma_max treated as zero.
inline Mat pseudo_inverse(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(a.rows(), a.cols())) *
                        std::numeric_limits<double>::epsilon() *
                        (sv.size() ? sv[0] : 0.0);
  Vec inv = Vec::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) inv[i] = 1.0 / sv[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

// (L^+)^T restricted to the block pattern of the posterior.
inline Mat pseudo_inverse_transpose(const VariationalPosterior& post) {
  const BlockLayout& layout = post.layout();
  Mat out = Mat::Zero(post.dim(), post.dim());
  for (size_t b = 0; b < layout.count(); ++b) {
    const Index o = layout.offset(b), s = layout.size(b);
    out.block(o, o, s, s) =
        pseudo_inverse(post.factor().block(o, o, s, s)).transpose();
  }
  return out;
}

// Squared Frobenius norm of the factor, i.e. tr(L L^T).
inline double trace_covariance(const VariationalPosterior& post) {
  return post.factor().squaredNorm();
}

}  // namespace fsvi

#endif  // FSVI_LINALG_HPP
