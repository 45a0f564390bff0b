#include <gtest/gtest.h>

#include <cmath>

#include "fsvi/experiments/bivariate.hpp"
#include "test_support.hpp"

using namespace fsvi;
using namespace fsvi::testing;
using namespace fsvi::experiments;

namespace {

TEST(ExactBlr, ScalarConjugateUpdate) {
  const GaussianPosteriorExact p =
      exact_blr_posterior(Mat::Identity(1, 1), Vec::Ones(1), 1.0, 1.0);
  EXPECT_NEAR(p.mean[0], 0.5, 1e-15);
  EXPECT_NEAR(p.covariance(0, 0), 0.5, 1e-15);
}

TEST(ExactBlr, NoDataLimitIsPrior) {
  Rng rng(1);
  const Mat phi = random_matrix(8, 3, rng);
  const Vec y = random_vector(8, rng);
  const GaussianPosteriorExact p = exact_blr_posterior(phi, y, 2.0, 0.0);
  EXPECT_LT(p.mean.norm(), 1e-15);
  EXPECT_LT((p.covariance - 0.5 * Mat::Identity(3, 3)).norm(), 1e-14);
}

TEST(ExactBlr, NormalEquationsAndInverse) {
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const Mat phi = random_matrix(12, 5, rng);
    const Vec y = random_vector(12, rng);
    const double alpha = 0.3 + t * 0.1, beta = 4.0;
    const GaussianPosteriorExact p = exact_blr_posterior(phi, y, alpha, beta);
    Mat precision = beta * phi.transpose() * phi;
    precision.diagonal().array() += alpha;
    EXPECT_LT((precision * p.covariance - Mat::Identity(5, 5)).norm(), 1e-10);
    EXPECT_LT((precision * p.mean - beta * phi.transpose() * y).norm(), 1e-10);
  }
}

// A log-likelihood that is exactly a Gaussian log-density in w.
class GaussianTarget : public TargetModel {
 public:
  GaussianTarget(Vec m, const Mat& cov, PriorKind prior = PriorKind::kFlat)
      : m_(std::move(m)), prec_(cov.inverse()), prior_(prior) {}
  Index dim() const override { return m_.size(); }
  PriorKind prior() const override { return prior_; }
  double log_lik(const Vec& w, double) const override {
    const Vec d = w - m_;
    return -0.5 * d.dot(prec_ * d);
  }
  double log_lik_grad(const Vec& w, double b, Vec& g) const override {
    g = -prec_ * (w - m_);
    return log_lik(w, b);
  }

 private:
  Vec m_;
  Mat prec_;
  PriorKind prior_;
};

TEST(Laplace, ExactOnGaussianTargets) {
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    const Mat b = random_matrix(3, 3, rng);
    const Mat cov = b * b.transpose() + 0.5 * Mat::Identity(3, 3);
    const Vec m = random_vector(3, rng, 2.0);
    const GaussianTarget target(m, cov);
    const GaussianPosteriorExact p =
        laplace_approximation(target, Hyperparameters{}, Vec::Zero(3));
    EXPECT_LT((p.mean - m).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((p.covariance - cov).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Laplace, GaussianPriorAddsAlpha) {
  const GaussianTarget target(Vec::Ones(1), Mat::Identity(1, 1), PriorKind::kGaussian);
  const GaussianPosteriorExact p =
      laplace_approximation(target, Hyperparameters{1.0, std::nullopt}, Vec::Zero(1));
  EXPECT_NEAR(p.mean[0], 0.5, 1e-8);
  EXPECT_NEAR(p.covariance(0, 0), 0.5, 1e-6);
}

TEST(Laplace, FlatCurvatureIsRejected) {
  const FunctionModel quartic(
      1,
      [](const Vec& w, Vec& g) {
        g = Vec::Constant(1, -4.0 * std::pow(w[0], 3));
        return -std::pow(w[0], 4);
      },
      PriorKind::kFlat);
  try {
    laplace_approximation(quartic, Hyperparameters{}, Vec::Zero(1));
    FAIL();
  } catch (const IndefiniteHessian& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIndefiniteHessian);
    ASSERT_EQ(e.eigenvalues().size(), 1);
    EXPECT_LT(std::abs(e.eigenvalues()[0]), 1e-5);
  }
}

TEST(Laplace, AzzaliniKldNearPrintedValue) {
  FitConfig config = bivariate_fit_defaults();
  const BivariateRow row = run_bivariate_one(kBivariateBenchmarks[0], BivariateSetup{},
                                             config, 1);
  // Printed Laplace value 4.570, accepted within a factor of two.
  EXPECT_GT(row.laplace_approx_to_target, 4.570 / 2);
  EXPECT_LT(row.laplace_approx_to_target, 4.570 * 2);
}

TEST(Laplace, HessianIsFiniteDifferenceOfGradient) {
  Rng rng(4);
  const Mat b = random_matrix(4, 4, rng);
  const Mat cov = b * b.transpose() + Mat::Identity(4, 4);
  const GaussianTarget target(Vec::Zero(4), cov);
  const Mat h = finite_difference_hessian(target, Hyperparameters{}, random_vector(4, rng));
  EXPECT_LT((h + cov.inverse()).cwiseAbs().maxCoeff(), 1e-7);
}

// ---- PPCA ----------------------------------------------------------------

TEST(Ppca, NoiselessSubspaceIsReproduced) {
  Rng rng(5);
  const Mat w = random_matrix(6, 2, rng);
  const Mat x = random_matrix(2, 40, rng);
  Mat y = w * x;
  y.colwise() += random_vector(6, rng);
  const PpcaFit fit = ml_ppca_fit(y, 2);
  EXPECT_EQ(fit.noise_var, 0.0);
  EXPECT_LT((fit.reconstruct(y) - y).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Ppca, IsotropicDataGivesVanishingLoading) {
  Rng rng(6);
  std::vector<double> norms;
  for (Index n : {200, 2000, 20000}) {
    const PpcaFit fit = ml_ppca_fit(random_matrix(4, n, rng), 1);
    norms.push_back(fit.loading.squaredNorm());
  }
  // |W|^2 is the top eigenvalue minus the noise variance, i.e. the gap.
  EXPECT_GT(norms[0], norms[2]);
  EXPECT_LT(norms[2], 0.05);
}

TEST(Ppca, FitIsLocallyOptimal) {
  Rng rng(7);
  const Mat w = random_matrix(5, 2, rng);
  const Mat y = w * random_matrix(2, 300, rng) + random_matrix(5, 300, rng, 0.3);
  const PpcaFit fit = ml_ppca_fit(y, 2);
  const double best = fit.log_likelihood(y);
  std::uniform_real_distribution<double> scale(0.8, 1.25);
  for (int t = 0; t < 20; ++t) {
    PpcaFit other = fit;
    other.loading += random_matrix(5, 2, rng, 0.05);
    other.noise_var *= scale(rng);
    EXPECT_GE(best, other.log_likelihood(y));
  }
}

TEST(Ppca, ReconstructionErrorNonIncreasingInRank) {
  Rng rng(8);
  const Mat y = random_matrix(6, 3, rng) * random_matrix(3, 100, rng) +
                random_matrix(6, 100, rng, 0.5);
  double prev = std::numeric_limits<double>::infinity();
  for (Index q = 1; q < 6; ++q) {
    const PpcaFit fit = ml_ppca_fit(y, q);
    // Orthogonal projection onto the fitted subspace.
    const Mat u = fit.loading.householderQr().householderQ() * Mat::Identity(6, q);
    const Mat c = y.colwise() - fit.mean;
    const double err = (c - u * (u.transpose() * c)).squaredNorm();
    EXPECT_LE(err, prev + 1e-9);
    prev = err;
  }
}

TEST(Ppca, RankDeficientDataRejected) {
  Mat y = Mat::Zero(4, 10);
  y.row(0).setLinSpaced(10, 0.0, 1.0);
  try {
    ml_ppca_fit(y, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerate);
  }
}

}  // namespace
