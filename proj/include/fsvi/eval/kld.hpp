#ifndef FSVI_EVAL_KLD_HPP
#define FSVI_EVAL_KLD_HPP

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fsvi/error.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

// Tensor trapezoidal rule on [x0, x1] x [y0, y1] with nx x ny nodes.
class Grid2D {
 public:
  Grid2D(double x0, double x1, double y0, double y1, Index nx, Index ny)
      : x0_(x0), x1_(x1), y0_(y0), y1_(y1), nx_(nx), ny_(ny) {
    detail::require(nx >= 64 && ny >= 64, ErrorKind::kConfig,
                    "grid resolution must be at least 64 per axis");
    detail::require(x1 > x0 && y1 > y0, ErrorKind::kConfig,
                    "grid bounds must be increasing");
    wx_ = weights(x1 - x0, nx);
    wy_ = weights(y1 - y0, ny);
  }

  static Grid2D square(double half_width, Index n) {
    return Grid2D(-half_width, half_width, -half_width, half_width, n, n);
  }

  Index nx() const { return nx_; }
  Index ny() const { return ny_; }
  double x(Index i) const { return x0_ + (x1_ - x0_) * i / double(nx_ - 1); }
  double y(Index j) const { return y0_ + (y1_ - y0_) * j / double(ny_ - 1); }
  double weight(Index i, Index j) const { return wx_[i] * wy_[j]; }
  double area() const { return (x1_ - x0_) * (y1_ - y0_); }

  // Node weights as an nx x ny matrix.
  Mat weight_matrix() const { return wx_ * wy_.transpose(); }

  // Log-density tabulated on the nodes.
  template <class LogDensity>
  Mat tabulate(LogDensity&& log_density) const {
    Mat out(nx_, ny_);
    for (Index j = 0; j < ny_; ++j)
      for (Index i = 0; i < nx_; ++i) out(i, j) = log_density(x(i), y(j));
    return out;
  }

 private:
  static Vec weights(double length, Index n) {
    const double h = length / static_cast<double>(n - 1);
    Vec w = Vec::Constant(n, h);
    w[0] = w[n - 1] = 0.5 * h;
    return w;
  }

  double x0_, x1_, y0_, y1_;
  Index nx_, ny_;
  Vec wx_, wy_;
};

enum class KldDirection { kPToQ, kQToP };

inline constexpr double kMinGridCoverage = 1.0 - 1e-6;

namespace detail {

// ln of the quadrature mass of exp(log_density); rejects poor coverage.
inline double log_grid_mass(const Mat& log_density, const Mat& weights,
                            const char* name) {
  const double top = log_density.maxCoeff();
  const double mass_scaled =
      (weights.array() * (log_density.array() - top).exp()).sum();
  const double log_mass = top + std::log(mass_scaled);
  if (!(std::exp(log_mass) >= kMinGridCoverage)) {
    std::ostringstream os;
    os << "grid holds mass " << std::exp(log_mass) << " of density " << name
       << ", below " << kMinGridCoverage;
    fail(ErrorKind::kCoverage, os.str());
  }
  return log_mass;
}

}  // namespace detail

// KL divergence between two 2-D densities given as log-densities, by
// trapezoidal quadrature. Both are renormalised on the grid first.
// kPToQ gives KL(p || q), kQToP gives KL(q || p).
template <class LogP, class LogQ>
double kld_numerical_2d(LogP&& log_p, LogQ&& log_q, const Grid2D& grid,
                        KldDirection direction) {
  const Mat weights = grid.weight_matrix();
  Mat lp = grid.tabulate(log_p);
  Mat lq = grid.tabulate(log_q);
  lp.array() -= detail::log_grid_mass(lp, weights, "p");
  lq.array() -= detail::log_grid_mass(lq, weights, "q");
  const Mat& la = direction == KldDirection::kPToQ ? lp : lq;
  const Mat& lb = direction == KldDirection::kPToQ ? lq : lp;
  double kl = 0.0;
  for (Index j = 0; j < la.cols(); ++j)
    for (Index i = 0; i < la.rows(); ++i) {
      const double a = std::exp(la(i, j));
      if (a == 0.0) continue;
      kl += weights(i, j) * a * (la(i, j) - lb(i, j));
    }
  return kl;
}

// Log-density of N(mean, cov) in any dimension.
class GaussianLogDensity {
 public:
  GaussianLogDensity(Vec mean, const Mat& cov) : mean_(std::move(mean)) {
    Eigen::LLT<Mat> llt(cov);
    detail::require(llt.info() == Eigen::Success, ErrorKind::kInvalidPosterior,
                    "covariance is not positive definite");
    chol_ = llt.matrixL();
    const double d = static_cast<double>(mean_.size());
    norm_ = -0.5 * d * std::log(2.0 * std::numbers::pi) -
            chol_.diagonal().array().log().sum();
  }

  double operator()(const Vec& w) const {
    const Vec u = chol_.triangularView<Eigen::Lower>().solve(w - mean_);
    return norm_ - 0.5 * u.squaredNorm();
  }

  double operator()(double w1, double w2) const {
    Vec w(2);
    w << w1, w2;
    return (*this)(w);
  }

 private:
  Vec mean_;
  Mat chol_;
  double norm_;
};

// Closed-form KL(N(m0, S0) || N(m1, S1)).
inline double gaussian_kld(const Vec& m0, const Mat& s0, const Vec& m1,
                           const Mat& s1) {
  const Eigen::LLT<Mat> l0(s0), l1(s1);
  detail::require(l0.info() == Eigen::Success && l1.info() == Eigen::Success,
                  ErrorKind::kInvalidPosterior,
                  "covariance is not positive definite");
  const double d = static_cast<double>(m0.size());
  const Mat l1m = l1.matrixL();
  const Mat l0m = l0.matrixL();
  const double trace = l1m.triangularView<Eigen::Lower>().solve(l0m).squaredNorm();
  const double quad =
      l1m.triangularView<Eigen::Lower>().solve(m1 - m0).squaredNorm();
  const double logdet = 2.0 * (l1m.diagonal().array().log().sum() -
                               l0m.diagonal().array().log().sum());
  return 0.5 * (trace + quad - d + logdet);
}

}  // namespace fsvi

#endif  // FSVI_EVAL_KLD_HPP
